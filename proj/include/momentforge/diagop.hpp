#pragma once

#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <variant>

#include "momentforge/algebra.hpp"
#include "momentforge/combinatorics.hpp"
#include "momentforge/error.hpp"
#include "momentforge/measure.hpp"
#include "momentforge/polynomial.hpp"
#include "momentforge/positivity.hpp"

namespace momentforge {

/// Which coefficient family describes a diagonal operator:
///   EigT:  T x^a = t_a x^a
///   CoefC: T = sum_a c_a / a! * x^a d^a
///   CoefD: T = sum_a d_a / a! * (x d)^a
enum class Representation { EigT, CoefC, CoefD };

inline std::string_view to_string(Representation r) {
  switch (r) {
    case Representation::EigT:
      return "t";
    case Representation::CoefC:
      return "c";
    case Representation::CoefD:
      return "d";
  }
  return "?";
}

Representation parse_representation(std::string_view text);

/// Diagonal operator on polynomials. Stores one canonical representation;
/// the eigenvalue form is derived on demand and cached.
template <Scalar S>
class DiagonalOperator {
public:
  using scalar_type = S;

  static DiagonalOperator from_eigenvalues(Sequence<S> t) { return DiagonalOperator(Representation::EigT, std::move(t)); }
  static DiagonalOperator from_c(Sequence<S> c) { return DiagonalOperator(Representation::CoefC, std::move(c)); }
  static DiagonalOperator from_d(FiniteSeq<S> d) { return DiagonalOperator(std::move(d)); }

  static DiagonalOperator identity(std::size_t n, unsigned degree) {
    return from_eigenvalues(Sequence<S>::constant(n, degree, S(1)));
  }

  /// p -> p(0), eigenvalues delta_{a,0}.
  static DiagonalOperator evaluation_at_zero(std::size_t n, unsigned degree) {
    Sequence<S> t(n, degree);
    t[MultiIndex::zero(n)] = S(1);
    return from_eigenvalues(std::move(t));
  }

  std::size_t dim() const {
    return std::visit([](const auto& c) { return c.dim(); }, coeffs_);
  }
  Representation representation() const noexcept { return rep_; }

  /// Degree window on which the operator is known; nullopt for the finitely
  /// supported d form, which determines every eigenvalue.
  std::optional<unsigned> window() const {
    if (rep_ == Representation::CoefD) return std::nullopt;
    return std::get<Sequence<S>>(coeffs_).degree();
  }

  const Sequence<S>& dense_coefficients() const { return std::get<Sequence<S>>(coeffs_); }
  const FiniteSeq<S>& d_coefficients() const { return std::get<FiniteSeq<S>>(coeffs_); }

  /// Eigenvalues t_a for |a| <= degree.
  Sequence<S> eigenvalues(unsigned degree) const {
    if (auto w = window(); w && *w < degree)
      throw DegreeError("operator is known to degree " + std::to_string(*w) + ", need " + std::to_string(degree));
    std::lock_guard lock(cache_->mutex);
    if (!cache_->eig || cache_->eig->degree() < degree) {
      switch (rep_) {
        case Representation::EigT:
          cache_->eig = dense_coefficients();
          break;
        case Representation::CoefC:
          cache_->eig = t_from_c(dense_coefficients(), dense_coefficients().degree());
          break;
        case Representation::CoefD:
          cache_->eig = t_from_d(d_coefficients(), degree);
          break;
      }
    }
    return cache_->eig->degree() == degree ? *cache_->eig : cache_->eig->truncate(degree);
  }

  /// Full eigenvalue window (requires a bounded window).
  Sequence<S> eigenvalues() const {
    auto w = window();
    if (!w) throw DegreeError("d-represented operator needs an explicit degree");
    return eigenvalues(*w);
  }

private:
  struct Cache {
    std::mutex mutex;
    std::optional<Sequence<S>> eig;
  };

  DiagonalOperator(Representation rep, Sequence<S> dense)
      : rep_(rep), coeffs_(std::move(dense)), cache_(std::make_shared<Cache>()) {}
  explicit DiagonalOperator(FiniteSeq<S> d)
      : rep_(Representation::CoefD), coeffs_(std::move(d)), cache_(std::make_shared<Cache>()) {}

  Representation rep_;
  std::variant<Sequence<S>, FiniteSeq<S>> coeffs_;
  std::shared_ptr<Cache> cache_;
};

/// A converted operator, with the partial-sum flag of the c -> d series.
template <Scalar S>
struct Conversion {
  DiagonalOperator<S> op;
  bool partial = false;
  double outer_shell = 0.0;
};

/// Converts to `target` on |a| <= degree. Conversions into the d form are
/// partial sums unless the source c coefficients vanish beyond their window.
template <Scalar S>
Conversion<S> convert(const DiagonalOperator<S>& op, Representation target, unsigned degree,
                      Support support = Support::Unknown) {
  switch (target) {
    case Representation::EigT:
      return {DiagonalOperator<S>::from_eigenvalues(op.eigenvalues(degree))};
    case Representation::CoefC:
      if (op.representation() == Representation::CoefD)
        return {DiagonalOperator<S>::from_c(c_from_d(op.d_coefficients(), degree))};
      if (op.representation() == Representation::CoefC)
        return {DiagonalOperator<S>::from_c(op.dense_coefficients().truncate(degree))};
      return {DiagonalOperator<S>::from_c(c_from_t(op.eigenvalues(degree), degree))};
    case Representation::CoefD: {
      if (op.representation() == Representation::CoefD) return {op};
      const Sequence<S> c = op.representation() == Representation::CoefC
                                ? op.dense_coefficients()
                                : c_from_t(op.eigenvalues(), *op.window());
      auto dt = d_from_c(c, degree, support);
      return {DiagonalOperator<S>::from_d(std::move(dt.d)), dt.partial, dt.outer_shell};
    }
  }
  throw DomainError("unknown representation");
}

/// T p: each coefficient of x^a scaled by t_a.
template <Scalar S>
Polynomial<S> apply(const DiagonalOperator<S>& op, const Polynomial<S>& p) {
  if (op.dim() != p.dim()) throw DimensionMismatch("operator and polynomial dimensions differ");
  const auto t = op.eigenvalues(p.degree());
  Polynomial<S> r(p.dim());
  for (const auto& [a, c] : p.terms()) r.add_term(a, c * t[a]);
  return r;
}

namespace detail {

template <Scalar S>
unsigned common_window(const DiagonalOperator<S>& a, const DiagonalOperator<S>& b) {
  auto wa = a.window();
  auto wb = b.window();
  if (!wa && !wb) throw DegreeError("both operators are unbounded; pass an explicit degree");
  if (!wa) return *wb;
  if (!wb) return *wa;
  return std::min(*wa, *wb);
}

}  // namespace detail

/// T S in eigenvalue form: eigenvalues multiply entrywise.
template <Scalar S>
DiagonalOperator<S> compose(const DiagonalOperator<S>& a, const DiagonalOperator<S>& b, unsigned degree) {
  if (a.dim() != b.dim()) throw DimensionMismatch("operator dimensions differ");
  return DiagonalOperator<S>::from_eigenvalues(hadamard(a.eigenvalues(degree), b.eigenvalues(degree)));
}

template <Scalar S>
DiagonalOperator<S> compose(const DiagonalOperator<S>& a, const DiagonalOperator<S>& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("operator dimensions differ");
  return compose(a, b, detail::common_window(a, b));
}

/// exp A with (exp A) x^a = e^{a_a} x^a.
template <Scalar S>
DiagonalOperator<double> exp_op(const DiagonalOperator<S>& a, unsigned degree) {
  const auto t = a.eigenvalues(degree);
  return DiagonalOperator<double>::from_eigenvalues(t.map([](const S& v) { return std::exp(to_double(v)); }));
}

template <Scalar S>
DiagonalOperator<double> exp_op(const DiagonalOperator<S>& a) {
  auto w = a.window();
  if (!w) throw DegreeError("d-represented operator needs an explicit degree");
  return exp_op(a, *w);
}

/// log T with (log T) x^a = ln t_a x^a; needs t_a > 0.
template <Scalar S>
DiagonalOperator<double> log_op(const DiagonalOperator<S>& op, unsigned degree) {
  const auto t = op.eigenvalues(degree);
  for (const auto& v : t.values())
    if (!(v > 0)) throw DomainError("log of a diagonal operator needs positive eigenvalues");
  return DiagonalOperator<double>::from_eigenvalues(t.map([](const S& v) { return std::log(to_double(v)); }));
}

template <Scalar S>
DiagonalOperator<double> log_op(const DiagonalOperator<S>& op) {
  auto w = op.window();
  if (!w) throw DegreeError("d-represented operator needs an explicit degree");
  return log_op(op, *w);
}

/// (T p)(x) = integral of p(x . y) dmu(y), expanded.
template <Scalar S>
Polynomial<S> integral_apply(const AtomicMeasure<S>& mu, const Polynomial<S>& p) {
  if (mu.dim() != p.dim()) throw DimensionMismatch("measure and polynomial dimensions differ");
  Polynomial<S> r(p.dim());
  for (const auto& atom : mu.atoms()) r += p.scale_variables(atom.point) * atom.weight;
  return r;
}

enum class PreserverStatus { NotPreserver, Inconclusive, NecessaryOnly, CertifiedOnWindow };

inline std::string_view to_string(PreserverStatus s) {
  switch (s) {
    case PreserverStatus::NotPreserver:
      return "NOT_PRESERVER";
    case PreserverStatus::Inconclusive:
      return "INCONCLUSIVE";
    case PreserverStatus::NecessaryOnly:
      return "NECESSARY_ONLY";
    case PreserverStatus::CertifiedOnWindow:
      return "CERTIFIED_ON_WINDOW";
  }
  return "?";
}

template <Scalar S>
struct PreserverReport {
  MembershipReport<S> membership;
  PreserverStatus status = PreserverStatus::NecessaryOnly;
  /// Set when a certificate measure was supplied.
  std::optional<bool> certificate_matches;
};

/// Hankel check on the eigenvalues at `level`. A supplied measure whose
/// moments reproduce the eigenvalues on the window upgrades the verdict to
/// CERTIFIED_ON_WINDOW.
template <Scalar S>
PreserverReport<S> preserver_check(const DiagonalOperator<S>& op, unsigned level,
                                   const AtomicMeasure<S>* certificate = nullptr, const PsdOptions& opts = {}) {
  const unsigned need = 2 * level;
  if (auto w = op.window(); w && *w < need)
    throw DegreeError("preserver check at level " + std::to_string(level) + " needs window " + std::to_string(need));
  const auto t = op.eigenvalues(need);
  PreserverReport<S> report{moment_membership_check(t, level, Cone::FullSpace, opts)};
  switch (report.membership.status) {
    case PsdStatus::NotPSD:
      report.status = PreserverStatus::NotPreserver;
      break;
    case PsdStatus::Inconclusive:
      report.status = PreserverStatus::Inconclusive;
      break;
    case PsdStatus::PSD:
      report.status = PreserverStatus::NecessaryOnly;
      break;
  }
  if (certificate) {
    if (certificate->dim() != op.dim()) throw DimensionMismatch("certificate measure has wrong dimension");
    const auto m = moments(*certificate, need);
    bool match = true;
    for (std::size_t i = 0; i < m.size() && match; ++i) {
      if constexpr (is_exact_v<S>) {
        match = m.at_position(i) == t.at_position(i);
      } else {
        match = near(m.at_position(i), t.at_position(i), 1e-12);
      }
    }
    report.certificate_matches = match;
    if (match && report.status != PreserverStatus::NotPreserver) report.status = PreserverStatus::CertifiedOnWindow;
  }
  return report;
}

/// d_a = integral of (ln x)^a dmu for mu on the open positive orthant.
template <Scalar S>
FiniteSeq<double> d_coeffs_from_measure(const AtomicMeasure<S>& mu, unsigned degree) {
  const auto logs = ln_pushforward(mu);
  return FiniteSeq<double>::from_dense(moments(logs, degree));
}

}  // namespace momentforge
