// Independent reference computations and random generators shared by tests.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "momentforge/measure.hpp"
#include "momentforge/multi_index.hpp"
#include "momentforge/polynomial.hpp"
#include "momentforge/scalar.hpp"
#include "momentforge/sequence.hpp"

namespace oracle {

using momentforge::Integer;
using momentforge::MultiIndex;
using momentforge::Polynomial;
using momentforge::Rational;

inline Integer factorial(unsigned n) {
  Integer f = 1;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return f;
}

/// n! / (k! (n-k)!) by the multiplicative formula.
inline Integer binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  Integer r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

/// Explicit inclusion-exclusion formula.
inline Integer stirling2(unsigned n, unsigned k) {
  Integer sum = 0;
  for (unsigned j = 0; j <= k; ++j) {
    Integer p = 1;
    for (unsigned e = 0; e < n; ++e) p *= k - j;
    if (j % 2) sum -= binomial(k, j) * p;
    else sum += binomial(k, j) * p;
  }
  return sum / factorial(k);
}

/// Coefficient of x^k in x (x+1) ... (x+n-1).
inline Integer stirling1_unsigned(unsigned n, unsigned k) {
  std::vector<Integer> poly{1};
  for (unsigned i = 0; i < n; ++i) {
    std::vector<Integer> next(poly.size() + 1, 0);
    for (std::size_t j = 0; j < poly.size(); ++j) {
      next[j + 1] += poly[j];
      next[j] += poly[j] * i;
    }
    poly = std::move(next);
  }
  return k < poly.size() ? poly[k] : Integer(0);
}

inline Integer factorial_of(const MultiIndex& a) {
  Integer f = 1;
  for (std::size_t i = 0; i < a.dim(); ++i) f *= factorial(a[i]);
  return f;
}

/// Eigenvalue of sum_b c_b / b! x^b d^b on x^alpha, by symbolic differentiation.
template <class Seq>
Rational eigenvalue_from_c(const Seq& c, const MultiIndex& alpha) {
  const auto xa = Polynomial<Rational>::monomial(alpha);
  Polynomial<Rational> out(alpha.dim());
  for (const auto& beta : c.basis().elements()) {
    if (beta.total() > alpha.total()) continue;
    auto term = xa.derivative(beta) * Polynomial<Rational>::monomial(beta);
    out += term * (c[beta] / Rational(factorial_of(beta)));
  }
  return out.coefficient(alpha);
}

/// Eigenvalue of sum_b d_b / b! (x d)^b on x^alpha, applying each Euler
/// operator x_i d_i symbolically.
inline Rational eigenvalue_from_d(const std::vector<std::pair<MultiIndex, Rational>>& d, const MultiIndex& alpha) {
  const std::size_t n = alpha.dim();
  Polynomial<Rational> out(n);
  for (const auto& [beta, value] : d) {
    auto p = Polynomial<Rational>::monomial(alpha);
    for (std::size_t i = 0; i < n; ++i) {
      for (unsigned r = 0; r < beta[i]; ++r) {
        p = Polynomial<Rational>::variable(n, i) * p.derivative(MultiIndex::unit(n, i));
      }
    }
    out += p * (value / Rational(factorial_of(beta)));
  }
  return out.coefficient(alpha);
}

/// Plain double-loop moment sum.
template <class S>
S moment(const momentforge::AtomicMeasure<S>& mu, const MultiIndex& alpha) {
  S acc(0);
  for (const auto& atom : mu.atoms()) {
    S p(1);
    for (std::size_t i = 0; i < alpha.dim(); ++i)
      for (unsigned e = 0; e < alpha[i]; ++e) p *= atom.point[i];
    acc += atom.weight * p;
  }
  return acc;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t m) {
  auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * m + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) off += A(i, j) * A(i, j);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        if (A(p, q) == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < m; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < m; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(m);
  for (std::size_t i = 0; i < m; ++i) ev[i] = A(i, i);
  return ev;
}

// ---- random generators (fixed seeds supplied by callers) ----

using Rng = std::mt19937_64;

inline long uniform_int(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// p/q with |p| <= span, 1 <= q <= den.
inline Rational small_rational(Rng& rng, long span = 9, long den = 6) {
  Rational q(uniform_int(rng, -span, span), uniform_int(rng, 1, den));
  q.canonicalize();
  return q;
}

inline Rational small_positive_rational(Rng& rng, long span = 9, long den = 6) {
  Rational q(uniform_int(rng, 1, span), uniform_int(rng, 1, den));
  q.canonicalize();
  return q;
}

inline momentforge::Sequence<Rational> random_sequence(Rng& rng, std::size_t n, unsigned degree) {
  return momentforge::Sequence<Rational>::generate(n, degree, [&](const MultiIndex&) { return small_rational(rng); });
}

inline momentforge::AtomicMeasure<Rational> random_measure(Rng& rng, std::size_t n, std::size_t atoms,
                                                           bool positive_points = false, long point_span = 5) {
  std::vector<momentforge::Atom<Rational>> out;
  for (std::size_t k = 0; k < atoms; ++k) {
    momentforge::Atom<Rational> a;
    for (std::size_t i = 0; i < n; ++i)
      a.point.push_back(positive_points ? small_positive_rational(rng, point_span, 4) : small_rational(rng, point_span, 4));
    a.weight = small_positive_rational(rng, 5, 4);
    out.push_back(std::move(a));
  }
  return momentforge::AtomicMeasure<Rational>(n, std::move(out));
}

inline Polynomial<Rational> random_polynomial(Rng& rng, std::size_t n, unsigned degree, std::size_t terms) {
  Polynomial<Rational> p(n);
  for (std::size_t k = 0; k < terms; ++k) {
    MultiIndex a(n);
    unsigned budget = static_cast<unsigned>(uniform_int(rng, 0, degree));
    for (std::size_t i = 0; i < n && budget > 0; ++i) {
      const unsigned e = i + 1 == n ? budget : static_cast<unsigned>(uniform_int(rng, 0, budget));
      a[i] = e;
      budget -= e;
    }
    p.add_term(a, small_rational(rng));
  }
  return p;
}

/// Float measures equal up to `tol` in every coordinate and (relatively) in
/// weight, matching atoms regardless of their order.
inline bool same_measure_within(const momentforge::AtomicMeasure<double>& a,
                                const momentforge::AtomicMeasure<double>& b, double tol) {
  if (a.dim() != b.dim() || a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const auto& x : a.atoms()) {
    bool found = false;
    for (std::size_t j = 0; j < b.size() && !found; ++j) {
      if (used[j]) continue;
      const auto& y = b.atoms()[j];
      bool close = momentforge::near(x.weight, y.weight, tol);
      for (std::size_t i = 0; i < a.dim() && close; ++i) close = std::fabs(x.point[i] - y.point[i]) <= tol;
      if (close) used[j] = found = true;
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace oracle
