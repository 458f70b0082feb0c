#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "momentforge/error.hpp"
#include "momentforge/scalar.hpp"

namespace momentforge {

/// Exponent tuple alpha in N_0^n. Indexes sequences, polynomial terms and
/// operator coefficients alike.
class MultiIndex {
public:
  using value_type = std::uint32_t;

  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : exps_(n, 0) {}
  MultiIndex(std::initializer_list<value_type> exps) : exps_(exps) {}
  explicit MultiIndex(std::vector<value_type> exps) : exps_(std::move(exps)) {}

  static MultiIndex zero(std::size_t n) { return MultiIndex(n); }
  static MultiIndex unit(std::size_t n, std::size_t i) {
    MultiIndex e(n);
    e.exps_.at(i) = 1;
    return e;
  }

  std::size_t dim() const noexcept { return exps_.size(); }
  value_type operator[](std::size_t i) const { return exps_[i]; }
  value_type& operator[](std::size_t i) { return exps_[i]; }
  const std::vector<value_type>& exponents() const noexcept { return exps_; }

  /// |alpha|
  unsigned total() const noexcept {
    unsigned s = 0;
    for (auto e : exps_) s += e;
    return s;
  }

  bool is_zero() const noexcept { return total() == 0; }

  /// alpha!, exact.
  Integer factorial() const;

  /// Componentwise order: this <= other in every coordinate.
  bool divides(const MultiIndex& other) const;

  MultiIndex operator+(const MultiIndex& other) const;
  /// Componentwise difference; requires other <= this.
  MultiIndex operator-(const MultiIndex& other) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  /// Lexicographic on the exponent vector.
  friend auto operator<=>(const MultiIndex& a, const MultiIndex& b) { return a.exps_ <=> b.exps_; }

  std::string to_string() const;

private:
  std::vector<value_type> exps_;
};

void require_same_dim(const MultiIndex& a, const MultiIndex& b);

/// x^alpha evaluated at a point.
template <Scalar S>
S monomial_value(const MultiIndex& alpha, const std::vector<S>& point) {
  S v(1);
  for (std::size_t i = 0; i < alpha.dim(); ++i) v *= ipow(point[i], alpha[i]);
  return v;
}

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& a) const noexcept {
    std::size_t h = a.dim();
    for (auto e : a.exponents()) h = h * 1000003U ^ std::hash<std::uint32_t>{}(e);
    return h;
  }
};

/// All alpha in N_0^n with |alpha| <= degree, in graded order (by |alpha|,
/// then lexicographically descending within a degree). Instances are shared
/// through a process-wide cache.
class MonomialBasis {
public:
  static std::shared_ptr<const MonomialBasis> get(std::size_t n, unsigned degree);

  MonomialBasis(std::size_t n, unsigned degree);

  std::size_t dim() const noexcept { return n_; }
  unsigned degree() const noexcept { return degree_; }
  std::size_t size() const noexcept { return elems_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return elems_[i]; }
  const std::vector<MultiIndex>& elements() const noexcept { return elems_; }

  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }

  /// Position of alpha; throws DegreeError if |alpha| > degree.
  std::size_t index_of(const MultiIndex& alpha) const;
  bool contains(const MultiIndex& alpha) const;

private:
  std::size_t n_;
  unsigned degree_;
  std::vector<MultiIndex> elems_;
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> index_;
};

/// Number of monomials of total degree <= d in n variables.
std::size_t monomial_count(std::size_t n, unsigned d);

}  // namespace momentforge
