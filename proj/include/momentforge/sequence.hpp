#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "momentforge/multi_index.hpp"
#include "momentforge/scalar.hpp"

namespace momentforge {

/// A multi-indexed real sequence truncated to |alpha| <= degree, dense on that
/// window. Serves as moment sequence, diagonal (eigenvalue) sequence and
/// operator coefficient sequence.
template <Scalar S>
class Sequence {
public:
  using scalar_type = S;

  Sequence(std::size_t n, unsigned degree)
      : basis_(MonomialBasis::get(n, degree)), values_(basis_->size(), S(0)) {}

  /// Fills every entry from f(alpha).
  template <class F>
  static Sequence generate(std::size_t n, unsigned degree, F&& f) {
    Sequence s(n, degree);
    for (std::size_t i = 0; i < s.size(); ++i) s.values_[i] = f(s.basis()[i]);
    return s;
  }

  static Sequence constant(std::size_t n, unsigned degree, const S& value) {
    Sequence s(n, degree);
    for (auto& v : s.values_) v = value;
    return s;
  }

  std::size_t dim() const noexcept { return basis_->dim(); }
  unsigned degree() const noexcept { return basis_->degree(); }
  std::size_t size() const noexcept { return values_.size(); }
  const MonomialBasis& basis() const noexcept { return *basis_; }
  static constexpr ScalarMode mode() noexcept { return scalar_mode_v<S>; }

  const S& operator[](const MultiIndex& alpha) const { return values_[basis_->index_of(alpha)]; }
  S& operator[](const MultiIndex& alpha) { return values_[basis_->index_of(alpha)]; }
  const S& at_position(std::size_t i) const { return values_.at(i); }
  S& at_position(std::size_t i) { return values_.at(i); }
  const std::vector<S>& values() const noexcept { return values_; }

  bool covers(const MultiIndex& alpha) const { return basis_->contains(alpha); }

  /// Restriction to a smaller window.
  Sequence truncate(unsigned degree) const {
    if (degree > this->degree()) throw DegreeError("cannot truncate to a larger degree");
    return generate(dim(), degree, [&](const MultiIndex& a) { return (*this)[a]; });
  }

  template <class F>
  auto map(F&& f) const {
    using R = std::decay_t<decltype(f(std::declval<const S&>()))>;
    Sequence<R> out(dim(), degree());
    for (std::size_t i = 0; i < size(); ++i) out.at_position(i) = f(values_[i]);
    return out;
  }

  friend bool operator==(const Sequence& a, const Sequence& b) {
    return a.dim() == b.dim() && a.degree() == b.degree() && a.values_ == b.values_;
  }

private:
  std::shared_ptr<const MonomialBasis> basis_;
  std::vector<S> values_;
};

template <Scalar To, Scalar From>
Sequence<To> convert_sequence(const Sequence<From>& s) {
  return s.map([](const From& x) { return convert_scalar<To>(x); });
}

/// Requires equal dimension and degree.
template <Scalar S>
void require_same_window(const Sequence<S>& a, const Sequence<S>& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("sequence dimensions differ");
  if (a.degree() != b.degree()) throw DegreeError("sequence windows differ");
}

/// A finitely supported coefficient sequence (used for the (x d)^alpha
/// coefficients, whose transforms are only finite sums under finite support).
/// Zero entries are not stored.
template <Scalar S>
class FiniteSeq {
public:
  explicit FiniteSeq(std::size_t n) : n_(n) {
    if (n == 0) throw DimensionMismatch("dimension must be at least 1");
  }

  std::size_t dim() const noexcept { return n_; }

  void set(const MultiIndex& alpha, const S& v) {
    if (alpha.dim() != n_) throw DimensionMismatch("multi-index has wrong dimension");
    if (v == S(0)) {
      terms_.erase(alpha);
    } else {
      terms_[alpha] = v;
    }
  }

  S get(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? S(0) : it->second;
  }

  /// Largest |alpha| in the support (0 when empty).
  unsigned support_degree() const {
    unsigned d = 0;
    for (const auto& [a, v] : terms_) d = std::max(d, a.total());
    return d;
  }

  const std::map<MultiIndex, S>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  static FiniteSeq from_dense(const Sequence<S>& s) {
    FiniteSeq f(s.dim());
    for (std::size_t i = 0; i < s.size(); ++i) f.set(s.basis()[i], s.at_position(i));
    return f;
  }

  Sequence<S> to_dense(unsigned degree) const {
    Sequence<S> s(n_, degree);
    for (const auto& [a, v] : terms_) {
      if (a.total() > degree) throw DegreeError("support exceeds requested window");
      s[a] = v;
    }
    return s;
  }

  friend bool operator==(const FiniteSeq&, const FiniteSeq&) = default;

private:
  std::size_t n_;
  std::map<MultiIndex, S> terms_;
};

}  // namespace momentforge
