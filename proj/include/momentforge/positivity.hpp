#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "momentforge/error.hpp"
#include "momentforge/multi_index.hpp"
#include "momentforge/polynomial.hpp"
#include "momentforge/scalar.hpp"
#include "momentforge/sequence.hpp"

namespace momentforge {

/// Relative tolerance used by the floating PSD test unless overridden.
inline constexpr double kDefaultFloatTolerance = 1e-9;

/// Dense symmetric matrix, optionally labelled by the monomial basis it was
/// built on.
template <Scalar S>
class SymMatrix {
public:
  explicit SymMatrix(std::size_t order) : m_(order), a_(order * order, S(0)) {}

  /// Validates symmetry: exact for rationals, 1e-12 relative for doubles.
  SymMatrix(std::size_t order, std::vector<S> row_major, std::vector<MultiIndex> labels = {})
      : m_(order), a_(std::move(row_major)), labels_(std::move(labels)) {
    if (a_.size() != m_ * m_) throw DimensionMismatch("matrix data does not match its order");
    if (!labels_.empty() && labels_.size() != m_) throw DimensionMismatch("label count does not match order");
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = i + 1; j < m_; ++j) {
        const S& x = a_[i * m_ + j];
        const S& y = a_[j * m_ + i];
        bool ok;
        if constexpr (is_exact_v<S>) {
          ok = x == y;
        } else {
          ok = near(x, y, 1e-12);
        }
        if (!ok) throw DomainError("matrix is not symmetric");
      }
    }
  }

  static SymMatrix identity(std::size_t order) {
    SymMatrix m(order);
    for (std::size_t i = 0; i < order; ++i) m.set(i, i, S(1));
    return m;
  }

  std::size_t order() const noexcept { return m_; }
  const S& operator()(std::size_t i, std::size_t j) const { return a_[i * m_ + j]; }
  void set(std::size_t i, std::size_t j, const S& v) {
    a_[i * m_ + j] = v;
    a_[j * m_ + i] = v;
  }
  const std::vector<MultiIndex>& labels() const noexcept { return labels_; }
  void set_labels(std::vector<MultiIndex> labels) { labels_ = std::move(labels); }

  S quadratic_form(const std::vector<S>& v) const {
    if (v.size() != m_) throw DimensionMismatch("vector length does not match matrix order");
    S acc(0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (v[i] == S(0)) continue;
      S row(0);
      for (std::size_t j = 0; j < m_; ++j) row += (*this)(i, j) * v[j];
      acc += v[i] * row;
    }
    return acc;
  }

  /// Entries compared, labels ignored.
  friend bool operator==(const SymMatrix& a, const SymMatrix& b) { return a.m_ == b.m_ && a.a_ == b.a_; }

private:
  std::size_t m_;
  std::vector<S> a_;
  std::vector<MultiIndex> labels_;
};

enum class PsdStatus { PSD, NotPSD, Inconclusive };

inline std::string_view to_string(PsdStatus s) {
  switch (s) {
    case PsdStatus::PSD:
      return "PSD";
    case PsdStatus::NotPSD:
      return "NOT_PSD";
    case PsdStatus::Inconclusive:
      return "INCONCLUSIVE";
  }
  return "?";
}

/// P A P^T = (S^-1 L) D (S^-1 L)^T with L unit lower triangular, D >= 0 and
/// S = diag(scaling) (all ones in exact mode). Entries beyond `rank` in D are
/// zero.
template <Scalar S>
struct LdlCertificate {
  std::vector<std::size_t> permutation;  // position k holds original index permutation[k]
  std::vector<S> lower;                  // row-major, order x order
  std::vector<S> diagonal;
  std::vector<S> scaling;
  std::size_t rank = 0;
};

template <Scalar S>
struct PsdVerdict {
  PsdStatus status = PsdStatus::Inconclusive;
  std::optional<LdlCertificate<S>> factorization;
  /// v with v^T A v < 0 (NOT_PSD only); integral and primitive in exact mode.
  std::optional<std::vector<S>> witness;
  /// v^T A v for the witness, recomputed on the input matrix.
  std::optional<S> witness_value;
  /// Smallest pivot (scaled in float mode); 0 when rank deficient, negative
  /// when refuted.
  double margin = 0.0;
  std::size_t rank = 0;
};

/// Rebuilds the matrix a certificate describes.
template <Scalar S>
SymMatrix<S> reconstruct(const LdlCertificate<S>& cert) {
  const std::size_t m = cert.diagonal.size();
  SymMatrix<S> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      S acc(0);
      for (std::size_t k = 0; k <= j; ++k)
        acc += cert.lower[i * m + k] * cert.diagonal[k] * cert.lower[j * m + k];
      const std::size_t oi = cert.permutation[i];
      const std::size_t oj = cert.permutation[j];
      if constexpr (is_exact_v<S>) {
        out.set(oi, oj, acc);
      } else {
        out.set(oi, oj, acc / (cert.scaling[oi] * cert.scaling[oj]));
      }
    }
  }
  return out;
}

namespace detail {

/// Symmetric elimination with diagonal pivoting on W (modified in place).
/// `tol` is 0 in exact mode. Produces either a factorization or a witness
/// in the coordinates of W.
template <Scalar S>
PsdVerdict<S> pivoted_ldl(std::vector<S> w, std::size_t m, const S& tol) {
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<S> lower(m * m, S(0));
  std::vector<S> diag(m, S(0));
  auto W = [&](std::size_t i, std::size_t j) -> S& { return w[i * m + j]; };
  auto L = [&](std::size_t i, std::size_t j) -> S& { return lower[i * m + j]; };

  auto swap_positions = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < m; ++j) std::swap(W(a, j), W(b, j));
    for (std::size_t i = 0; i < m; ++i) std::swap(W(i, a), W(i, b));
    for (std::size_t j = 0; j < m; ++j) std::swap(L(a, j), L(b, j));
    std::swap(perm[a], perm[b]);
  };

  // Lifts a residual vector x2 (positions >= k) to a full vector x with
  // x^T (P A P^T) x = x2^T R x2.
  auto lift = [&](std::size_t k, std::vector<S> x) {
    for (std::size_t c = k; c-- > 0;) {
      S acc(0);
      for (std::size_t r = c + 1; r < m; ++r) acc += L(r, c) * x[r];
      x[c] = -acc;
    }
    std::vector<S> v(m, S(0));
    for (std::size_t pos = 0; pos < m; ++pos) v[perm[pos]] = x[pos];
    return v;
  };

  PsdVerdict<S> verdict;
  std::size_t rank = m;
  double min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t jmin = k;
    std::size_t jmax = k;
    for (std::size_t j = k + 1; j < m; ++j) {
      if (W(j, j) < W(jmin, jmin)) jmin = j;
      if (W(j, j) > W(jmax, jmax)) jmax = j;
    }
    if (W(jmin, jmin) < -tol) {
      std::vector<S> x(m, S(0));
      x[jmin] = S(1);
      verdict.status = PsdStatus::NotPSD;
      verdict.margin = to_double(W(jmin, jmin));
      verdict.witness = lift(k, std::move(x));
      verdict.rank = k;
      return verdict;
    }
    if (W(jmax, jmax) > tol) {
      swap_positions(k, jmax);
      const S pivot = W(k, k);
      diag[k] = pivot;
      L(k, k) = S(1);
      min_pivot = std::min(min_pivot, to_double(pivot));
      for (std::size_t i = k + 1; i < m; ++i) L(i, k) = W(i, k) / pivot;
      for (std::size_t i = k + 1; i < m; ++i) {
        if (L(i, k) == S(0)) continue;
        for (std::size_t j = k + 1; j <= i; ++j) {
          W(i, j) -= L(i, k) * W(k, j);
          W(j, i) = W(i, j);
        }
      }
      for (std::size_t i = k + 1; i < m; ++i) {
        W(i, k) = S(0);
        W(k, i) = S(0);
      }
      continue;
    }
    // Residual diagonal is (numerically) zero: the block must vanish.
    std::size_t bi = k;
    std::size_t bj = k;
    S big(0);
    for (std::size_t i = k; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        if (abs_value(W(i, j)) > big) {
          big = abs_value(W(i, j));
          bi = i;
          bj = j;
        }
      }
    }
    if (big <= tol) {
      for (std::size_t i = k; i < m; ++i) L(i, i) = S(1);
      rank = k;
      min_pivot = 0.0;
      break;
    }
    std::vector<S> x(m, S(0));
    x[bi] = S(1);
    x[bj] = sign_of(W(bi, bj)) > 0 ? S(-1) : S(1);
    const S value = W(bi, bi) + W(bj, bj) - S(2) * big;
    verdict.margin = to_double(value);
    verdict.rank = k;
    verdict.status = value < -tol ? PsdStatus::NotPSD : PsdStatus::Inconclusive;
    if (verdict.status == PsdStatus::NotPSD) verdict.witness = lift(k, std::move(x));
    return verdict;
  }
  verdict.rank = rank;
  verdict.status = PsdStatus::PSD;
  verdict.margin = m == 0 ? 0.0 : min_pivot;
  verdict.factorization = LdlCertificate<S>{std::move(perm), std::move(lower), std::move(diag), {}, rank};
  return verdict;
}

inline void make_primitive(std::vector<Rational>& v) {
  Integer den_lcm = 1;
  for (const auto& x : v) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), x.get_den_mpz_t());
  Integer num_gcd = 0;
  for (auto& x : v) {
    x *= den_lcm;
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), x.get_num_mpz_t());
  }
  if (num_gcd > 1)
    for (auto& x : v) x /= num_gcd;
}

}  // namespace detail

/// Exact semidefiniteness test by symmetric elimination with diagonal
/// pivoting. Zero pivots are accepted only when their whole residual block
/// vanishes.
inline PsdVerdict<Rational> is_psd(const SymMatrix<Rational>& a) {
  const std::size_t m = a.order();
  std::vector<Rational> w(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) w[i * m + j] = a(i, j);
  auto verdict = detail::pivoted_ldl<Rational>(std::move(w), m, Rational(0));
  if (verdict.witness) {
    detail::make_primitive(*verdict.witness);
    verdict.witness_value = a.quadratic_form(*verdict.witness);
  }
  if (verdict.factorization) verdict.factorization->scaling.assign(m, Rational(1));
  return verdict;
}

/// Floating test on the diagonally scaled matrix D^-1/2 A D^-1/2. A residual
/// block whose entries are all within `tol` counts as zero (semidefinite,
/// reduced rank); a residual that is neither negligible nor refutable by a
/// witness beyond `tol` gives INCONCLUSIVE.
inline PsdVerdict<double> is_psd(const SymMatrix<double>& a, double tol = kDefaultFloatTolerance) {
  const std::size_t m = a.order();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      if (!std::isfinite(a(i, j))) {
        PsdVerdict<double> v;
        v.status = PsdStatus::Inconclusive;
        v.margin = std::numeric_limits<double>::quiet_NaN();
        return v;
      }
    }
  }
  std::vector<double> scale(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double d = std::fabs(a(i, i));
    if (d > 0 && std::isfinite(d)) scale[i] = 1.0 / std::sqrt(d);
  }
  std::vector<double> w(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) w[i * m + j] = a(i, j) * scale[i] * scale[j];
  auto verdict = detail::pivoted_ldl<double>(std::move(w), m, tol);
  if (verdict.witness) {
    for (std::size_t i = 0; i < m; ++i) (*verdict.witness)[i] *= scale[i];
    verdict.witness_value = a.quadratic_form(*verdict.witness);
    if (!(*verdict.witness_value < 0)) {
      verdict.status = PsdStatus::Inconclusive;
      verdict.witness.reset();
      verdict.witness_value.reset();
    }
  }
  if (verdict.factorization) verdict.factorization->scaling = std::move(scale);
  return verdict;
}

/// Entrywise product; labels are dropped.
template <Scalar S>
SymMatrix<S> schur_product(const SymMatrix<S>& a, const SymMatrix<S>& b) {
  if (a.order() != b.order()) throw DimensionMismatch("Schur product needs equal orders");
  SymMatrix<S> r(a.order());
  for (std::size_t i = 0; i < a.order(); ++i)
    for (std::size_t j = 0; j <= i; ++j) r.set(i, j, a(i, j) * b(i, j));
  return r;
}

/// Moment matrix M[b, c] = s_{b+c} over monomials |b| <= level.
template <Scalar S>
SymMatrix<S> hankel(const Sequence<S>& s, unsigned level) {
  if (s.degree() < 2 * level)
    throw DegreeError("Hankel matrix of level " + std::to_string(level) + " needs the sequence to degree " +
                      std::to_string(2 * level));
  const auto basis = MonomialBasis::get(s.dim(), level);
  const std::size_t m = basis->size();
  SymMatrix<S> h(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j) h.set(i, j, s[(*basis)[i] + (*basis)[j]]);
  h.set_labels(basis->elements());
  return h;
}

/// Localizing matrix M_g[b, c] = L_s(g x^{b+c}).
template <Scalar S>
SymMatrix<S> localizing(const Sequence<S>& s, unsigned level, const Polynomial<S>& g) {
  if (g.dim() != s.dim()) throw DimensionMismatch("localizing polynomial has wrong dimension");
  if (s.degree() < 2 * level + g.degree())
    throw DegreeError("localizing matrix of level " + std::to_string(level) + " needs the sequence to degree " +
                      std::to_string(2 * level + g.degree()));
  const auto basis = MonomialBasis::get(s.dim(), level);
  const std::size_t m = basis->size();
  SymMatrix<S> h(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const MultiIndex shift = (*basis)[i] + (*basis)[j];
      S acc(0);
      for (const auto& [gamma, coeff] : g.terms()) acc += coeff * s[shift + gamma];
      h.set(i, j, acc);
    }
  }
  h.set_labels(basis->elements());
  return h;
}

enum class Cone { FullSpace, NonnegOrthant };

inline std::string_view to_string(Cone k) { return k == Cone::FullSpace ? "fullspace" : "orthant"; }

template <Scalar S>
struct NamedVerdict {
  std::string name;
  PsdVerdict<S> verdict;
};

/// Finite-level necessary conditions for membership in the moment cone.
/// A PSD outcome never certifies membership on its own.
template <Scalar S>
struct MembershipReport {
  unsigned level = 0;
  std::vector<NamedVerdict<S>> checks;
  PsdStatus status = PsdStatus::PSD;
  static constexpr bool necessary_only = true;
};

struct PsdOptions {
  double float_tolerance = kDefaultFloatTolerance;
};

template <Scalar S>
PsdVerdict<S> check_psd(const SymMatrix<S>& a, const PsdOptions& opts = {}) {
  if constexpr (is_exact_v<S>) {
    return is_psd(a);
  } else {
    return is_psd(a, opts.float_tolerance);
  }
}

template <Scalar S>
PsdStatus combine(const std::vector<NamedVerdict<S>>& checks) {
  PsdStatus status = PsdStatus::PSD;
  for (const auto& c : checks) {
    if (c.verdict.status == PsdStatus::NotPSD) return PsdStatus::NotPSD;
    if (c.verdict.status == PsdStatus::Inconclusive) status = PsdStatus::Inconclusive;
  }
  return status;
}

/// Hankel check plus one localizing check per supplied polynomial.
template <Scalar S>
MembershipReport<S> membership_check_with(const Sequence<S>& s, unsigned level,
                                          const std::vector<std::pair<std::string, Polynomial<S>>>& localizers,
                                          const PsdOptions& opts = {}) {
  MembershipReport<S> report;
  report.level = level;
  for (const auto& [name, g] : localizers) {
    if (s.degree() < 2 * level + g.degree())
      throw DegreeError("localizing check '" + name + "' needs the sequence to degree " +
                        std::to_string(2 * level + g.degree()));
  }
  report.checks.push_back({"hankel", check_psd(hankel(s, level), opts)});
  for (const auto& [name, g] : localizers) report.checks.push_back({name, check_psd(localizing(s, level, g), opts)});
  report.status = combine(report.checks);
  return report;
}

/// FullSpace: Hankel only. NonnegOrthant: Hankel and localizing g = x_i.
template <Scalar S>
MembershipReport<S> moment_membership_check(const Sequence<S>& s, unsigned level, Cone cone,
                                            const PsdOptions& opts = {}) {
  std::vector<std::pair<std::string, Polynomial<S>>> localizers;
  if (cone == Cone::NonnegOrthant)
    for (std::size_t i = 0; i < s.dim(); ++i)
      localizers.emplace_back("localizing x" + std::to_string(i + 1), Polynomial<S>::variable(s.dim(), i));
  return membership_check_with(s, level, localizers, opts);
}

}  // namespace momentforge
