#pragma once

#include <cmath>
#include <vector>

#include "momentforge/combinatorics.hpp"
#include "momentforge/error.hpp"
#include "momentforge/measure.hpp"
#include "momentforge/multi_index.hpp"
#include "momentforge/sequence.hpp"

namespace momentforge {

template <Scalar S>
using MomentSequence = Sequence<S>;

namespace detail {

template <Scalar S>
void require_same_dim(const AtomicMeasure<S>& mu, const AtomicMeasure<S>& nu) {
  if (mu.dim() != nu.dim()) throw DimensionMismatch("measure dimensions differ");
}

}  // namespace detail

/// s_alpha = sum over atoms of weight * point^alpha, |alpha| <= degree.
template <Scalar S>
MomentSequence<S> moments(const AtomicMeasure<S>& mu, unsigned degree) {
  return MomentSequence<S>::generate(mu.dim(), degree, [&](const MultiIndex& alpha) {
    S acc(0);
    for (const auto& a : mu.atoms()) acc += a.weight * monomial_value(alpha, a.point);
    return acc;
  });
}

/// Pushforward of mu x nu under (x, y) -> x + y.
template <Scalar S>
AtomicMeasure<S> add_convolve(const AtomicMeasure<S>& mu, const AtomicMeasure<S>& nu) {
  detail::require_same_dim(mu, nu);
  std::vector<Atom<S>> atoms;
  atoms.reserve(mu.size() * nu.size());
  for (const auto& a : mu.atoms()) {
    for (const auto& b : nu.atoms()) {
      Atom<S> c{a.point, a.weight * b.weight};
      for (std::size_t i = 0; i < c.point.size(); ++i) c.point[i] += b.point[i];
      atoms.push_back(std::move(c));
    }
  }
  return AtomicMeasure<S>(mu.dim(), std::move(atoms));
}

/// Pushforward of mu x nu under the componentwise product (x, y) -> x . y.
template <Scalar S>
AtomicMeasure<S> mult_convolve(const AtomicMeasure<S>& mu, const AtomicMeasure<S>& nu) {
  detail::require_same_dim(mu, nu);
  std::vector<Atom<S>> atoms;
  atoms.reserve(mu.size() * nu.size());
  for (const auto& a : mu.atoms()) {
    for (const auto& b : nu.atoms()) {
      Atom<S> c{a.point, a.weight * b.weight};
      for (std::size_t i = 0; i < c.point.size(); ++i) c.point[i] *= b.point[i];
      atoms.push_back(std::move(c));
    }
  }
  return AtomicMeasure<S>(mu.dim(), std::move(atoms));
}

/// mu^{.k} with mu^{.0} = delta at the all-ones point.
template <Scalar S>
AtomicMeasure<S> mult_power(const AtomicMeasure<S>& mu, unsigned k) {
  AtomicMeasure<S> r = AtomicMeasure<S>::unit(mu.dim());
  for (unsigned i = 0; i < k; ++i) r = mult_convolve(r, mu);
  return r;
}

/// Binomial convolution sum_{b<=a} binom(a,b) s_b u_{a-b}: the moments of
/// mu * nu from those of mu and nu.
template <Scalar S>
MomentSequence<S> binomial_convolution(const MomentSequence<S>& s, const MomentSequence<S>& u) {
  require_same_window(s, u);
  return MomentSequence<S>::generate(s.dim(), s.degree(), [&](const MultiIndex& alpha) {
    S acc(0);
    for_each_below(alpha, [&](const MultiIndex& beta) {
      acc += from_integer<S>(multi_binomial(alpha, beta)) * s[beta] * u[alpha - beta];
    });
    return acc;
  });
}

/// Entrywise (Hadamard) product.
template <Scalar S>
MomentSequence<S> hadamard(const MomentSequence<S>& s, const MomentSequence<S>& t) {
  require_same_window(s, t);
  MomentSequence<S> r(s.dim(), s.degree());
  for (std::size_t i = 0; i < s.size(); ++i) r.at_position(i) = s.at_position(i) * t.at_position(i);
  return r;
}

/// t^c entrywise. Exact mode accepts integer exponents only.
template <Scalar S>
MomentSequence<S> entrywise_power(const MomentSequence<S>& t, const S& c) {
  if (!(c > 0)) throw DomainError("entrywise power needs a positive exponent");
  for (const auto& v : t.values())
    if (!(v > 0)) throw DomainError("entrywise power needs strictly positive entries");
  if constexpr (is_exact_v<S>) {
    if (c.get_den() != 1) throw DomainError("non-integer exponents require float mode");
    if (!c.get_num().fits_uint_p()) throw DomainError("exponent too large");
    const unsigned e = static_cast<unsigned>(c.get_num().get_ui());
    return t.map([e](const Rational& v) { return ipow(v, e); });
  } else {
    return t.map([c](double v) { return std::pow(v, c); });
  }
}

/// Moments of the multiplicative exponential e^{.t nu}: exp(t * s_alpha(nu)).
template <Scalar S>
MomentSequence<double> mult_exponential_moments(const AtomicMeasure<S>& nu, double t, unsigned degree) {
  if (t < 0) throw DomainError("the exponential is defined for t >= 0");
  const auto s = moments(convert_measure<double>(nu), degree);
  return s.map([t](double v) { return std::exp(t * v); });
}

/// Partial sum of e^{.t nu} = sum_k t^k nu^{.k} / k!, together with a bound on
/// the mass of the omitted tail.
template <Scalar S>
struct TruncatedExponential {
  AtomicMeasure<S> measure;
  unsigned order;
  /// sum_{k > order} t^k M^k / k!, M the total mass of nu.
  double tail_bound;
};

double exponential_tail(double x, unsigned order);

template <Scalar S>
TruncatedExponential<S> mult_exponential_measure(const AtomicMeasure<S>& nu, const S& t, unsigned order) {
  if (t < 0) throw DomainError("the exponential is defined for t >= 0");
  AtomicMeasure<S> power = AtomicMeasure<S>::unit(nu.dim());
  AtomicMeasure<S> sum = power;
  S coeff(1);
  for (unsigned k = 1; k <= order; ++k) {
    power = mult_convolve(power, nu);
    coeff *= t;
    coeff /= S(k);
    sum = sum + power.scaled(coeff);
  }
  const double x = to_double(t) * to_double(nu.total_mass());
  return {std::move(sum), order, exponential_tail(x, order)};
}

/// f(x) = a_0 + a_1 x + ... + a_D x^D with a nonnegativity flag.
template <Scalar S>
struct EntireSeriesTrunc {
  std::vector<S> coeffs;

  bool nonnegative() const {
    for (const auto& a : coeffs)
      if (a < 0) return false;
    return true;
  }

  S operator()(const S& x) const {
    S v(0);
    for (std::size_t k = coeffs.size(); k-- > 0;) v = v * x + coeffs[k];
    return v;
  }
};

/// Entrywise f(s_alpha) = sum_k a_k s^{.k}.
template <Scalar S>
MomentSequence<S> series_apply(const EntireSeriesTrunc<S>& f, const MomentSequence<S>& s) {
  return s.map([&f](const S& v) { return f(v); });
}

/// f(.mu) = sum_k a_k mu^{.k}; needs a_k >= 0 to stay a measure.
template <Scalar S>
AtomicMeasure<S> series_apply_measure(const EntireSeriesTrunc<S>& f, const AtomicMeasure<S>& mu) {
  if (!f.nonnegative()) throw DomainError("series coefficients must be nonnegative to act on measures");
  AtomicMeasure<S> power = AtomicMeasure<S>::unit(mu.dim());
  AtomicMeasure<S> sum(mu.dim());
  for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
    if (k > 0) power = mult_convolve(power, mu);
    sum = sum + power.scaled(f.coeffs[k]);
  }
  return sum;
}

/// Univariate restriction (s_{k e_axis})_k.
template <Scalar S>
MomentSequence<S> marginal(const MomentSequence<S>& s, std::size_t axis) {
  if (axis >= s.dim()) throw DimensionMismatch("axis " + std::to_string(axis) + " out of range");
  MomentSequence<S> r(1, s.degree());
  for (unsigned k = 0; k <= s.degree(); ++k) {
    MultiIndex alpha(s.dim());
    alpha[axis] = k;
    r[MultiIndex{k}] = s[alpha];
  }
  return r;
}

/// Pushforward under the componentwise natural logarithm. Needs every atom in
/// the open positive orthant.
template <Scalar S>
AtomicMeasure<double> ln_pushforward(const AtomicMeasure<S>& mu) {
  std::vector<Atom<double>> atoms;
  atoms.reserve(mu.size());
  for (const auto& a : mu.atoms()) {
    Atom<double> b{{}, to_double(a.weight)};
    for (const auto& x : a.point) {
      if (!(x > 0)) throw DomainError("log pushforward needs atoms in the open positive orthant");
      b.point.push_back(std::log(to_double(x)));
    }
    atoms.push_back(std::move(b));
  }
  return AtomicMeasure<double>(mu.dim(), std::move(atoms));
}

}  // namespace momentforge
