#pragma once

#include <map>
#include <vector>

#include "momentforge/error.hpp"
#include "momentforge/multi_index.hpp"
#include "momentforge/scalar.hpp"
#include "momentforge/sequence.hpp"

namespace momentforge {

/// Sparse multivariate polynomial, terms keyed by exponent. Zero
/// coefficients are never stored.
template <Scalar S>
class Polynomial {
public:
  using scalar_type = S;

  explicit Polynomial(std::size_t n) : n_(n) {
    if (n == 0) throw DimensionMismatch("dimension must be at least 1");
  }

  static Polynomial constant(std::size_t n, const S& c) {
    Polynomial p(n);
    p.add_term(MultiIndex::zero(n), c);
    return p;
  }

  static Polynomial monomial(const MultiIndex& alpha, const S& c = S(1)) {
    Polynomial p(alpha.dim());
    p.add_term(alpha, c);
    return p;
  }

  /// x_i
  static Polynomial variable(std::size_t n, std::size_t i) { return monomial(MultiIndex::unit(n, i)); }

  std::size_t dim() const noexcept { return n_; }
  const std::map<MultiIndex, S>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [a, c] : terms_) d = std::max(d, a.total());
    return d;
  }

  S coefficient(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? S(0) : it->second;
  }

  void add_term(const MultiIndex& alpha, const S& c) {
    if (alpha.dim() != n_) throw DimensionMismatch("term exponent has wrong dimension");
    if (c == S(0)) return;
    auto [it, inserted] = terms_.try_emplace(alpha, c);
    if (!inserted) {
      it->second += c;
      if (it->second == S(0)) terms_.erase(it);
    }
  }

  S evaluate(const std::vector<S>& point) const {
    if (point.size() != n_) throw DimensionMismatch("evaluation point has wrong dimension");
    S v(0);
    for (const auto& [a, c] : terms_) v += c * monomial_value(a, point);
    return v;
  }

  /// d^alpha p
  Polynomial derivative(const MultiIndex& alpha) const {
    if (alpha.dim() != n_) throw DimensionMismatch("derivative order has wrong dimension");
    Polynomial r(n_);
    for (const auto& [a, c] : terms_) {
      if (!alpha.divides(a)) continue;
      // falling factorial prod_i a_i (a_i - 1) ... (a_i - alpha_i + 1)
      Integer f = 1;
      for (std::size_t i = 0; i < n_; ++i)
        for (unsigned k = 0; k < alpha[i]; ++k) f *= a[i] - k;
      r.add_term(a - alpha, from_integer<S>(f) * c);
    }
    return r;
  }

  /// x -> (x_1 y_1, ..., x_n y_n)
  Polynomial scale_variables(const std::vector<S>& y) const {
    if (y.size() != n_) throw DimensionMismatch("scaling vector has wrong dimension");
    Polynomial r(n_);
    for (const auto& [a, c] : terms_) r.add_term(a, c * monomial_value(a, y));
    return r;
  }

  Polynomial& operator+=(const Polynomial& o) {
    require_same(o);
    for (const auto& [a, c] : o.terms_) add_term(a, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    require_same(o);
    for (const auto& [a, c] : o.terms_) add_term(a, -c);
    return *this;
  }
  Polynomial& operator*=(const S& s) {
    if (s == S(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [a, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const S& s) { return a *= s; }
  friend Polynomial operator*(const S& s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.require_same(b);
    Polynomial r(a.n_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) r.add_term(ea + eb, ca * cb);
    return r;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
  void require_same(const Polynomial& o) const {
    if (o.n_ != n_) throw DimensionMismatch("polynomial dimensions differ");
  }

  std::size_t n_;
  std::map<MultiIndex, S> terms_;
};

/// Riesz functional L_s(p) = sum_alpha p_alpha s_alpha.
template <Scalar S>
S riesz(const Sequence<S>& s, const Polynomial<S>& p) {
  if (s.dim() != p.dim()) throw DimensionMismatch("sequence and polynomial dimensions differ");
  if (p.degree() > s.degree())
    throw DegreeError("Riesz functional needs the sequence to degree " + std::to_string(p.degree()));
  S v(0);
  for (const auto& [a, c] : p.terms()) v += c * s[a];
  return v;
}

/// Coefficient pairing <s, p> with a polynomial given as a dense sequence of
/// coefficients; used where both sides are sequences.
template <Scalar S>
S pairing(const Sequence<S>& s, const Sequence<S>& coeffs) {
  require_same_window(s, coeffs);
  S v(0);
  for (std::size_t i = 0; i < s.size(); ++i) v += s.at_position(i) * coeffs.at_position(i);
  return v;
}

}  // namespace momentforge
