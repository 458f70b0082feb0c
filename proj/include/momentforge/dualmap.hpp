#pragma once

#include <map>
#include <string>
#include <vector>

#include "momentforge/error.hpp"
#include "momentforge/multi_index.hpp"
#include "momentforge/polynomial.hpp"
#include "momentforge/positivity.hpp"
#include "momentforge/sequence.hpp"

namespace momentforge {

/// T = sum_a q_a d^a with finitely many terms, one per a.
template <Scalar S>
class DifferentialOperator {
public:
  using scalar_type = S;

  explicit DifferentialOperator(std::size_t n) : n_(n) {
    if (n == 0) throw DimensionMismatch("dimension must be at least 1");
  }

  /// Multiplication by q.
  static DifferentialOperator multiplication(const Polynomial<S>& q) {
    DifferentialOperator t(q.dim());
    t.add_term(MultiIndex::zero(q.dim()), q);
    return t;
  }

  /// sum_{|a| <= degree} c_a / a! x^a d^a, the truncated diagonal operator.
  static DifferentialOperator from_diagonal_c(const Sequence<S>& c) {
    DifferentialOperator t(c.dim());
    for (std::size_t i = 0; i < c.size(); ++i) {
      const auto& a = c.basis()[i];
      if constexpr (is_exact_v<S>) {
        t.add_term(a, Polynomial<S>::monomial(a, c.at_position(i) / Rational(a.factorial())));
      } else {
        t.add_term(a, Polynomial<S>::monomial(a, c.at_position(i) / a.factorial().get_d()));
      }
    }
    return t;
  }

  std::size_t dim() const noexcept { return n_; }
  const std::map<MultiIndex, Polynomial<S>>& terms() const noexcept { return terms_; }

  /// Adds q to the coefficient of d^a.
  void add_term(const MultiIndex& alpha, const Polynomial<S>& q) {
    if (alpha.dim() != n_ || q.dim() != n_) throw DimensionMismatch("term has wrong dimension");
    auto [it, inserted] = terms_.try_emplace(alpha, q);
    if (!inserted) it->second += q;
    if (it->second.is_zero()) terms_.erase(it);
  }

  const Polynomial<S>* coefficient(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? nullptr : &it->second;
  }

  /// Largest degree of T x^b over |b| <= degree.
  unsigned image_degree(unsigned degree) const {
    unsigned d = 0;
    for (const auto& [a, q] : terms_)
      if (a.total() <= degree) d = std::max(d, degree - a.total() + q.degree());
    return d;
  }

  friend bool operator==(const DifferentialOperator&, const DifferentialOperator&) = default;

private:
  std::size_t n_;
  std::map<MultiIndex, Polynomial<S>> terms_;
};

template <Scalar S>
Polynomial<S> apply_diffop(const DifferentialOperator<S>& t, const Polynomial<S>& p) {
  if (t.dim() != p.dim()) throw DimensionMismatch("operator and polynomial dimensions differ");
  Polynomial<S> r(p.dim());
  for (const auto& [a, q] : t.terms()) {
    auto dp = p.derivative(a);
    if (!dp.is_zero()) r += q * dp;
  }
  return r;
}

/// (M_q s)_a = sum_b q_b s_{a+b} for |a| <= out_degree.
template <Scalar S>
Sequence<S> shift_apply(const Polynomial<S>& q, const Sequence<S>& s, unsigned out_degree) {
  if (q.dim() != s.dim()) throw DimensionMismatch("polynomial and sequence dimensions differ");
  if (out_degree + q.degree() > s.degree())
    throw DegreeError("shift by a degree-" + std::to_string(q.degree()) + " polynomial to degree " +
                      std::to_string(out_degree) + " needs the sequence to degree " +
                      std::to_string(out_degree + q.degree()));
  return Sequence<S>::generate(s.dim(), out_degree, [&](const MultiIndex& alpha) {
    S acc(0);
    for (const auto& [b, coeff] : q.terms()) acc += coeff * s[alpha + b];
    return acc;
  });
}

/// Largest output window: s.degree() - deg q.
template <Scalar S>
Sequence<S> shift_apply(const Polynomial<S>& q, const Sequence<S>& s) {
  if (q.degree() > s.degree()) throw DegreeError("shift polynomial degree exceeds the sequence degree");
  return shift_apply(q, s, s.degree() - q.degree());
}

/// (T* s)_a = L_s(T x^a): the adjoint action on sequences.
template <Scalar S>
Sequence<S> dual_apply(const DifferentialOperator<S>& t, const Sequence<S>& s, unsigned out_degree) {
  if (t.dim() != s.dim()) throw DimensionMismatch("operator and sequence dimensions differ");
  const unsigned need = t.image_degree(out_degree);
  if (need > s.degree())
    throw DegreeError("dual action to degree " + std::to_string(out_degree) + " needs the sequence to degree " +
                      std::to_string(need));
  return Sequence<S>::generate(s.dim(), out_degree, [&](const MultiIndex& alpha) {
    return riesz(s, apply_diffop(t, Polynomial<S>::monomial(alpha)));
  });
}

template <Scalar S>
struct SampleVerdict {
  std::vector<S> y;
  Sequence<S> sequence;
  MembershipReport<S> report;
};

template <Scalar S>
struct KMomentReport {
  Cone cone = Cone::FullSpace;
  unsigned level = 0;
  std::vector<SampleVerdict<S>> samples;
  /// NotPSD when any sample refutes.
  PsdStatus status = PsdStatus::PSD;
  /// Terms of order above the window, not seen by the check.
  std::size_t ignored_terms = 0;
  static constexpr const char* note =
      "finite sample of points and finite Hankel level: a pass is evidence, not proof";
};

/// For every sample y in K, tests (a! q_a(y))_a for membership in the
/// (K - y)-moment cone at the given level.
template <Scalar S>
KMomentReport<S> k_moment_preservation_check(const DifferentialOperator<S>& t, const std::vector<std::vector<S>>& ys,
                                             unsigned level, Cone cone, const PsdOptions& opts = {}) {
  const std::size_t n = t.dim();
  const unsigned window = 2 * level + (cone == Cone::NonnegOrthant ? 1 : 0);
  KMomentReport<S> out;
  out.cone = cone;
  out.level = level;
  for (const auto& [a, q] : t.terms())
    if (a.total() > window) ++out.ignored_terms;
  for (const auto& y : ys) {
    if (y.size() != n) throw DimensionMismatch("sample point has wrong dimension");
    if (cone == Cone::NonnegOrthant)
      for (const auto& v : y)
        if (v < 0) throw DomainError("sample point lies outside the nonnegative orthant");
    Sequence<S> u(n, window);
    for (const auto& [a, q] : t.terms()) {
      if (a.total() > window) continue;
      u[a] = from_integer<S>(a.factorial()) * q.evaluate(y);
    }
    std::vector<std::pair<std::string, Polynomial<S>>> localizers;
    if (cone == Cone::NonnegOrthant) {
      for (std::size_t i = 0; i < n; ++i)
        localizers.emplace_back("localizing x" + std::to_string(i + 1) + "+y" + std::to_string(i + 1),
                                Polynomial<S>::variable(n, i) + Polynomial<S>::constant(n, y[i]));
    }
    auto report = membership_check_with(u, level, localizers, opts);
    if (report.status == PsdStatus::NotPSD) {
      out.status = PsdStatus::NotPSD;
    } else if (report.status == PsdStatus::Inconclusive && out.status == PsdStatus::PSD) {
      out.status = PsdStatus::Inconclusive;
    }
    out.samples.push_back({y, std::move(u), std::move(report)});
  }
  return out;
}

}  // namespace momentforge
