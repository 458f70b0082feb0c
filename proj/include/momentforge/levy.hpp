#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "momentforge/algebra.hpp"
#include "momentforge/combinatorics.hpp"
#include "momentforge/error.hpp"
#include "momentforge/measure.hpp"
#include "momentforge/positivity.hpp"
#include "momentforge/sequence.hpp"

namespace momentforge {

/// Generator data (c0, b, Sigma, nu) of a diagonal positivity-preserving
/// semigroup. nu is atomic with no mass at the origin.
template <Scalar S>
class LevyTriplet {
public:
  using scalar_type = S;

  LevyTriplet(std::size_t n, S c0, std::vector<S> b, SymMatrix<S> sigma, AtomicMeasure<S> nu)
      : n_(n), c0_(std::move(c0)), b_(std::move(b)), sigma_(std::move(sigma)), nu_(std::move(nu)) {
    if (n_ == 0) throw DimensionMismatch("dimension must be at least 1");
    if (b_.size() != n_) throw DimensionMismatch("drift vector has wrong length");
    if (sigma_.order() != n_) throw DimensionMismatch("covariance matrix has wrong order");
    if (nu_.dim() != n_) throw DimensionMismatch("jump measure has wrong dimension");
    const auto verdict = check_psd(sigma_);
    if (verdict.status != PsdStatus::PSD)
      throw DomainError(std::string("covariance matrix is not positive semidefinite (") +
                        std::string(to_string(verdict.status)) + ")");
    for (const auto& atom : nu_.atoms()) {
      bool origin = true;
      for (const auto& x : atom.point) origin = origin && x == S(0);
      if (origin) throw DomainError("jump measure must not charge the origin");
    }
  }

  /// (0, 0, 0, empty): the identity semigroup.
  static LevyTriplet zero(std::size_t n) {
    return LevyTriplet(n, S(0), std::vector<S>(n, S(0)), SymMatrix<S>(n), AtomicMeasure<S>(n));
  }

  std::size_t dim() const noexcept { return n_; }
  const S& c0() const noexcept { return c0_; }
  const std::vector<S>& b() const noexcept { return b_; }
  const SymMatrix<S>& sigma() const noexcept { return sigma_; }
  const AtomicMeasure<S>& nu() const noexcept { return nu_; }

  /// Triplet of the generator scaled by factor >= 0.
  LevyTriplet scaled(const S& factor) const {
    if (factor < 0) throw DomainError("generator scale must be nonnegative");
    std::vector<S> b = b_;
    for (auto& x : b) x *= factor;
    SymMatrix<S> sigma(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i; j < n_; ++j) sigma.set(i, j, sigma_(i, j) * factor);
    return LevyTriplet(n_, c0_ * factor, std::move(b), std::move(sigma), nu_.scaled(factor));
  }

private:
  std::size_t n_;
  S c0_;
  std::vector<S> b_;
  SymMatrix<S> sigma_;
  AtomicMeasure<S> nu_;
};

namespace detail {

/// ||x||_2 >= 1, evaluated exactly in rational mode. The unit sphere counts
/// as outside.
template <Scalar S>
bool outside_unit_ball(const std::vector<S>& x) {
  S r(0);
  for (const auto& v : x) r += v * v;
  return r >= S(1);
}

}  // namespace detail

/// Coefficients c_a of the generator in the x^a d^a / a! basis, |a| <= degree.
template <Scalar S>
Sequence<S> generator_coeffs(const LevyTriplet<S>& tr, unsigned degree) {
  const std::size_t n = tr.dim();
  auto c = Sequence<S>::generate(n, degree, [&](const MultiIndex& alpha) {
    if (alpha.total() < 2 && alpha.total() > 0) return S(0);
    if (alpha.is_zero()) return tr.c0();
    S acc(0);
    for (const auto& atom : tr.nu().atoms()) acc += atom.weight * monomial_value(alpha, atom.point);
    return acc;
  });
  if (degree >= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      S v = tr.b()[i];
      for (const auto& atom : tr.nu().atoms())
        if (detail::outside_unit_ball(atom.point)) v += atom.weight * atom.point[i];
      c[MultiIndex::unit(n, i)] = v;
    }
  }
  if (degree >= 2) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) c[MultiIndex::unit(n, i) + MultiIndex::unit(n, j)] += tr.sigma()(i, j);
  }
  return c;
}

/// Gaussian and drift part of the log-eigenvalue: c0 + sum a_i b_i
/// + sum_{i<j} a_i a_j s_ij + 1/2 sum_i a_i (a_i - 1) s_ii.
template <Scalar S>
S C_alpha(const LevyTriplet<S>& tr, const MultiIndex& alpha) {
  if (alpha.dim() != tr.dim()) throw DimensionMismatch("multi-index has wrong dimension");
  S v = tr.c0();
  const std::size_t n = tr.dim();
  for (std::size_t i = 0; i < n; ++i) {
    const S ai(static_cast<long>(alpha[i]));
    v += ai * tr.b()[i];
    v += ai * (ai - S(1)) * tr.sigma()(i, i) / S(2);
    for (std::size_t j = i + 1; j < n; ++j) v += ai * S(static_cast<long>(alpha[j])) * tr.sigma()(i, j);
  }
  return v;
}

/// Jump part: sum_atoms w [(x+1)^a - 1 - sum_i a_i x_i 1{||x|| < 1}].
template <Scalar S>
S I_alpha(const LevyTriplet<S>& tr, const MultiIndex& alpha) {
  if (alpha.dim() != tr.dim()) throw DimensionMismatch("multi-index has wrong dimension");
  S v(0);
  for (const auto& atom : tr.nu().atoms()) {
    S shifted(1);
    for (std::size_t i = 0; i < alpha.dim(); ++i) shifted *= ipow(S(atom.point[i] + S(1)), alpha[i]);
    S term = shifted - S(1);
    if (!detail::outside_unit_ball(atom.point))
      for (std::size_t i = 0; i < alpha.dim(); ++i) term -= S(static_cast<long>(alpha[i])) * atom.point[i];
    v += atom.weight * term;
  }
  return v;
}

/// Eigenvalues t_a = exp(C_a + I_a), held as logarithms.
template <Scalar S>
struct InfDivMoments {
  Sequence<S> log_values;

  /// exp of the stored logarithm; +inf when it exceeds double range.
  double value(const MultiIndex& alpha) const { return std::exp(to_double(log_values[alpha])); }
  Sequence<double> values() const {
    return log_values.map([](const S& l) { return std::exp(to_double(l)); });
  }
};

template <Scalar S>
InfDivMoments<S> infdiv_moments(const LevyTriplet<S>& tr, unsigned degree) {
  return {Sequence<S>::generate(tr.dim(), degree,
                                [&](const MultiIndex& alpha) -> S { return C_alpha(tr, alpha) + I_alpha(tr, alpha); })};
}

/// ln t_k = c + b k + a k^2 + sum_atoms w [(x+1)^k - 1 - k x 1{|x| < 1}].
template <Scalar S>
S univariate_log_moment(const S& a, const S& b, const S& c, const AtomicMeasure<S>& nu, unsigned k) {
  if (a < 0) throw DomainError("the quadratic coefficient must be nonnegative");
  if (nu.dim() != 1) throw DimensionMismatch("univariate formula needs a one-dimensional measure");
  const S kk(static_cast<long>(k));
  S v = c + b * kk + a * kk * kk;
  for (const auto& atom : nu.atoms()) {
    const S& x = atom.point[0];
    if (x == S(0)) throw DomainError("jump measure must not charge the origin");
    S term = ipow(S(x + S(1)), k) - S(1);
    if (abs_value(x) < S(1)) term -= kk * x;
    v += atom.weight * term;
  }
  return v;
}

struct ConsistencyReport {
  unsigned degree = 0;
  /// max |log t (coefficient path) - log t (closed form)|
  double max_log_deviation = 0.0;
  /// max |t / t' - 1| = expm1 of the above.
  double max_relative_deviation = 0.0;
  std::optional<MultiIndex> worst;
  double tolerance = 1e-10;
  bool passed = true;
};

/// Compares the coefficient path log t = t_from_c(generator_coeffs) against
/// the closed form C_a + I_a.
template <Scalar S>
ConsistencyReport consistency_check(const LevyTriplet<S>& tr, unsigned degree, double tolerance = 1e-10) {
  const auto via_coeffs = t_from_c(generator_coeffs(tr, degree), degree);
  const auto closed = infdiv_moments(tr, degree).log_values;
  ConsistencyReport report;
  report.degree = degree;
  report.tolerance = tolerance;
  for (std::size_t i = 0; i < closed.size(); ++i) {
    const double dev = to_double(abs_value(S(via_coeffs.at_position(i) - closed.at_position(i))));
    if (!(dev <= report.max_log_deviation)) {
      report.max_log_deviation = dev;
      report.worst = closed.basis()[i];
    }
  }
  report.max_relative_deviation = std::expm1(report.max_log_deviation);
  report.passed = report.max_relative_deviation < tolerance;
  return report;
}

struct DivisibilityRow {
  double c = 0.0;
  MembershipReport<double> report;
};

struct DivisibilityReport {
  unsigned level = 0;
  Cone cone = Cone::FullSpace;
  std::vector<DivisibilityRow> rows;
  /// NotPSD as soon as one grid point refutes.
  PsdStatus status = PsdStatus::PSD;
  std::optional<double> refuted_at;
  /// Witnesses refer to the diagonally normalised matrices.
  bool normalised_witnesses = false;
  static constexpr bool necessary_only = true;
};

namespace detail {

inline void require_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("the exponent grid is empty");
  for (double c : grid)
    if (!(c > 0) || !std::isfinite(c)) throw DomainError("grid exponents must be positive and finite");
}

inline void finish(DivisibilityReport& r) {
  for (const auto& row : r.rows) {
    if (row.report.status == PsdStatus::NotPSD) {
      r.status = PsdStatus::NotPSD;
      if (!r.refuted_at) r.refuted_at = row.c;
    } else if (row.report.status == PsdStatus::Inconclusive && r.status == PsdStatus::PSD) {
      r.status = PsdStatus::Inconclusive;
    }
  }
}

/// Unit-diagonal form of the matrix [exp(c * L(b_i + b_j + shift))], built
/// from logarithms so no entry overflows.
inline SymMatrix<double> normalised_from_logs(const Sequence<double>& log_t, unsigned level, double c,
                                              const MultiIndex& shift) {
  const auto basis = MonomialBasis::get(log_t.dim(), level);
  const std::size_t m = basis->size();
  SymMatrix<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double lii = log_t[(*basis)[i] + (*basis)[i] + shift];
    for (std::size_t j = i; j < m; ++j) {
      const double ljj = log_t[(*basis)[j] + (*basis)[j] + shift];
      const double lij = log_t[(*basis)[i] + (*basis)[j] + shift];
      out.set(i, j, std::exp(c * (lij - 0.5 * (lii + ljj))));
    }
  }
  out.set_labels(basis->elements());
  return out;
}

}  // namespace detail

/// For each c in the grid, checks t^c (entrywise) for moment-cone membership
/// at the given level. Needs t_a > 0.
template <Scalar S>
DivisibilityReport divisibility_scan(const Sequence<S>& t, unsigned level, const std::vector<double>& grid,
                                     Cone cone = Cone::FullSpace, const PsdOptions& opts = {}) {
  detail::require_grid(grid);
  const auto td = convert_sequence<double>(t);
  DivisibilityReport r;
  r.level = level;
  r.cone = cone;
  for (double c : grid) r.rows.push_back({c, moment_membership_check(entrywise_power(td, c), level, cone, opts)});
  detail::finish(r);
  return r;
}

/// Same scan from log t, for sequences whose entries exceed double range.
/// Matrices are normalised to unit diagonal before the PSD test.
inline DivisibilityReport divisibility_scan_log(const Sequence<double>& log_t, unsigned level,
                                                const std::vector<double>& grid, Cone cone = Cone::FullSpace,
                                                const PsdOptions& opts = {}) {
  detail::require_grid(grid);
  const unsigned need = 2 * level + (cone == Cone::NonnegOrthant ? 1 : 0);
  if (log_t.degree() < need)
    throw DegreeError("divisibility scan at level " + std::to_string(level) + " needs degree " + std::to_string(need));
  for (const auto& v : log_t.values())
    if (std::isnan(v) || std::isinf(v)) throw DomainError("log-moments must be finite");
  const std::size_t n = log_t.dim();
  DivisibilityReport r;
  r.level = level;
  r.cone = cone;
  r.normalised_witnesses = true;
  for (double c : grid) {
    MembershipReport<double> m;
    m.level = level;
    m.checks.push_back(
        {"hankel", check_psd(detail::normalised_from_logs(log_t, level, c, MultiIndex::zero(n)), opts)});
    if (cone == Cone::NonnegOrthant)
      for (std::size_t i = 0; i < n; ++i)
        m.checks.push_back({"localizing x" + std::to_string(i + 1),
                            check_psd(detail::normalised_from_logs(log_t, level, c, MultiIndex::unit(n, i)), opts)});
    m.status = combine(m.checks);
    r.rows.push_back({c, std::move(m)});
  }
  detail::finish(r);
  return r;
}

template <Scalar S>
DivisibilityReport divisibility_scan(const InfDivMoments<S>& t, unsigned level, const std::vector<double>& grid,
                                     Cone cone = Cone::FullSpace, const PsdOptions& opts = {}) {
  return divisibility_scan_log(convert_sequence<double>(t.log_values), level, grid, cone, opts);
}

}  // namespace momentforge
