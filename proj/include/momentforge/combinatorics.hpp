#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "momentforge/error.hpp"
#include "momentforge/multi_index.hpp"
#include "momentforge/scalar.hpp"
#include "momentforge/sequence.hpp"

namespace momentforge {

template <Scalar S>
using CoefficientSeq = Sequence<S>;

enum class TableKind { Binomial, Stirling1Unsigned, Stirling2 };

/// Dense lower-triangular table of exact integers, rows 0..degree.
class TriangularTable {
public:
  TriangularTable(TableKind kind, unsigned degree);

  TableKind kind() const noexcept { return kind_; }
  unsigned degree() const noexcept { return degree_; }

  /// Entry (n, k); zero for k > n. Requires n <= degree.
  const Integer& operator()(unsigned n, unsigned k) const;

  /// Checks the defining recurrence on every interior cell.
  bool satisfies_recurrence() const;

private:
  TableKind kind_;
  unsigned degree_;
  std::vector<std::vector<Integer>> rows_;
  Integer zero_{0};
};

/// Memoized table covering at least `degree` rows. Safe to call from several
/// threads; tables only ever grow.
std::shared_ptr<const TriangularTable> table(TableKind kind, unsigned degree);

Integer binomial(unsigned n, unsigned k);
Integer stirling1_unsigned(unsigned n, unsigned k);
Integer stirling2(unsigned n, unsigned k);

/// prod_i binom(alpha_i, beta_i); 0 unless beta <= alpha.
Integer multi_binomial(const MultiIndex& alpha, const MultiIndex& beta);

/// prod_i of the univariate Stirling numbers (alpha_i over beta_i).
Integer multi_stirling(TableKind kind, const MultiIndex& alpha, const MultiIndex& beta);

/// Calls f(beta) for every beta <= alpha (componentwise).
template <class F>
void for_each_below(const MultiIndex& alpha, F&& f) {
  MultiIndex beta = MultiIndex::zero(alpha.dim());
  const std::size_t n = alpha.dim();
  while (true) {
    f(static_cast<const MultiIndex&>(beta));
    std::size_t i = 0;
    while (i < n && beta[i] == alpha[i]) {
      beta[i] = 0;
      ++i;
    }
    if (i == n) return;
    ++beta[i];
  }
}

namespace detail {

inline void require_window(unsigned have, unsigned want, const char* what) {
  if (have < want)
    throw DegreeError(std::string(what) + ": input defined to degree " + std::to_string(have) +
                      ", need " + std::to_string(want));
}

/// alpha^beta as an integer, 0^0 = 1.
inline Integer index_power(const MultiIndex& alpha, const MultiIndex& beta) {
  Integer r = 1;
  for (std::size_t i = 0; i < alpha.dim(); ++i) {
    Integer p;
    mpz_ui_pow_ui(p.get_mpz_t(), alpha[i], beta[i]);
    r *= p;
  }
  return r;
}

template <Scalar S>
S ratio(const Integer& num, const Integer& den) {
  if constexpr (is_exact_v<S>) {
    Rational q(num, den);
    q.canonicalize();
    return q;
  } else {
    return Rational(num, den).get_d();
  }
}

}  // namespace detail

/// Eigenvalues from x^a d^a coefficients: t_a = sum_{b<=a} binom(a,b) c_b.
template <Scalar S>
CoefficientSeq<S> t_from_c(const CoefficientSeq<S>& c, unsigned degree) {
  detail::require_window(c.degree(), degree, "t_from_c");
  return CoefficientSeq<S>::generate(c.dim(), degree, [&](const MultiIndex& alpha) {
    S acc(0);
    for_each_below(alpha, [&](const MultiIndex& beta) {
      acc += from_integer<S>(multi_binomial(alpha, beta)) * c[beta];
    });
    return acc;
  });
}

/// Inverse binomial transform: c_a = sum_{b<=a} (-1)^{|a-b|} binom(a,b) t_b.
template <Scalar S>
CoefficientSeq<S> c_from_t(const CoefficientSeq<S>& t, unsigned degree) {
  detail::require_window(t.degree(), degree, "c_from_t");
  return CoefficientSeq<S>::generate(t.dim(), degree, [&](const MultiIndex& alpha) {
    S acc(0);
    const unsigned total = alpha.total();
    for_each_below(alpha, [&](const MultiIndex& beta) {
      S term = from_integer<S>(multi_binomial(alpha, beta)) * t[beta];
      if ((total - beta.total()) % 2 == 0) {
        acc += term;
      } else {
        acc -= term;
      }
    });
    return acc;
  });
}

/// Eigenvalues from (x d)^a coefficients: t_a = sum_b a^b / b! * d_b.
/// Exact because d is finitely supported.
template <Scalar S>
CoefficientSeq<S> t_from_d(const FiniteSeq<S>& d, unsigned degree) {
  return CoefficientSeq<S>::generate(d.dim(), degree, [&](const MultiIndex& alpha) {
    S acc(0);
    for (const auto& [beta, value] : d.terms())
      acc += detail::ratio<S>(detail::index_power(alpha, beta), beta.factorial()) * value;
    return acc;
  });
}

/// c_a = sum_{b>=a} a!/b! * S2(b, a) * d_b, over the finite support of d.
template <Scalar S>
CoefficientSeq<S> c_from_d(const FiniteSeq<S>& d, unsigned degree) {
  return CoefficientSeq<S>::generate(d.dim(), degree, [&](const MultiIndex& alpha) {
    S acc(0);
    const Integer alpha_fact = alpha.factorial();
    for (const auto& [beta, value] : d.terms()) {
      if (!alpha.divides(beta)) continue;
      const Integer s2 = multi_stirling(TableKind::Stirling2, beta, alpha);
      if (s2 == 0) continue;
      acc += detail::ratio<S>(alpha_fact * s2, beta.factorial()) * value;
    }
    return acc;
  });
}

/// Whether a coefficient sequence is known to vanish beyond its window.
enum class Support { Unknown, WithinWindow };

/// Result of the c -> d conversion. The defining series runs over all
/// beta >= alpha, so on a truncated input the value is a partial sum unless
/// the input is known to vanish beyond its window.
template <Scalar S>
struct DTransform {
  FiniteSeq<S> d;
  bool partial = true;
  /// Last degree included in every partial sum.
  unsigned summed_through = 0;
  /// max_alpha |contribution of the outermost shell |beta| = summed_through|;
  /// a large value flags a series that is far from converged.
  double outer_shell = 0.0;
};

/// d_a = sum_{b>=a} (-1)^{|b-a|} a!/b! * c1(b, a) * c_b, c1 unsigned Stirling
/// numbers of the first kind. Output covers |alpha| <= degree.
template <Scalar S>
DTransform<S> d_from_c(const CoefficientSeq<S>& c, unsigned degree, Support support = Support::Unknown) {
  detail::require_window(c.degree(), degree, "d_from_c");
  const unsigned window = c.degree();
  DTransform<S> out{FiniteSeq<S>(c.dim()), support != Support::WithinWindow, window, 0.0};
  const auto& basis = MonomialBasis::get(c.dim(), window);
  for (const auto& alpha : MonomialBasis::get(c.dim(), degree)->elements()) {
    const Integer alpha_fact = alpha.factorial();
    S acc(0);
    S shell(0);
    for (const auto& beta : basis->elements()) {
      if (!alpha.divides(beta)) continue;
      const Integer s1 = multi_stirling(TableKind::Stirling1Unsigned, beta, alpha);
      if (s1 == 0) continue;
      S term = detail::ratio<S>(alpha_fact * s1, beta.factorial()) * c[beta];
      if ((beta.total() - alpha.total()) % 2 != 0) term = -term;
      acc += term;
      if (beta.total() == window) shell += term;
    }
    out.d.set(alpha, acc);
    out.outer_shell = std::max(out.outer_shell, std::fabs(to_double(shell)));
  }
  return out;
}

/// t -> d through the c representation.
template <Scalar S>
DTransform<S> d_from_t(const CoefficientSeq<S>& t, unsigned degree, Support support = Support::Unknown) {
  return d_from_c(c_from_t(t, t.degree()), degree, support);
}

}  // namespace momentforge
