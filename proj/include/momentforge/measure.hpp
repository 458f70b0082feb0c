#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "momentforge/error.hpp"
#include "momentforge/scalar.hpp"

namespace momentforge {

template <Scalar S>
struct Atom {
  std::vector<S> point;
  S weight;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Atoms whose coordinates all differ by at most this are merged in float mode.
inline constexpr double kFloatMergeTolerance = 1e-12;

/// Finite nonnegative combination of point masses. Atoms are kept in
/// canonical form: sorted lexicographically by point, duplicates merged,
/// zero-weight atoms dropped.
template <Scalar S>
class AtomicMeasure {
public:
  using scalar_type = S;

  explicit AtomicMeasure(std::size_t n) : n_(n) {
    if (n == 0) throw DimensionMismatch("dimension must be at least 1");
  }

  AtomicMeasure(std::size_t n, std::vector<Atom<S>> atoms) : n_(n), atoms_(std::move(atoms)) {
    if (n == 0) throw DimensionMismatch("dimension must be at least 1");
    for (const auto& a : atoms_) {
      if (a.point.size() != n_) throw DimensionMismatch("atom point has wrong dimension");
      if (a.weight < 0) throw DomainError("atom weight must be nonnegative");
    }
    canonicalize();
  }

  static AtomicMeasure dirac(std::vector<S> point, S weight = S(1)) {
    const std::size_t n = point.size();
    return AtomicMeasure(n, {Atom<S>{std::move(point), std::move(weight)}});
  }

  /// delta at the all-ones point, the neutral element of the multiplicative
  /// convolution.
  static AtomicMeasure unit(std::size_t n) { return dirac(std::vector<S>(n, S(1))); }

  std::size_t dim() const noexcept { return n_; }
  const std::vector<Atom<S>>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }
  static constexpr ScalarMode mode() noexcept { return scalar_mode_v<S>; }

  S total_mass() const {
    S m(0);
    for (const auto& a : atoms_) m += a.weight;
    return m;
  }

  /// Mass at an exact point (tolerance-matched in float mode).
  S mass_at(const std::vector<S>& point) const {
    for (const auto& a : atoms_)
      if (same_point(a.point, point)) return a.weight;
    return S(0);
  }

  AtomicMeasure scaled(const S& factor) const {
    if (factor < 0) throw DomainError("measures can only be scaled by nonnegative factors");
    auto atoms = atoms_;
    for (auto& a : atoms) a.weight *= factor;
    return AtomicMeasure(n_, std::move(atoms));
  }

  friend AtomicMeasure operator+(const AtomicMeasure& a, const AtomicMeasure& b) {
    if (a.n_ != b.n_) throw DimensionMismatch("measure dimensions differ");
    auto atoms = a.atoms_;
    atoms.insert(atoms.end(), b.atoms_.begin(), b.atoms_.end());
    return AtomicMeasure(a.n_, std::move(atoms));
  }

  friend bool operator==(const AtomicMeasure&, const AtomicMeasure&) = default;

  static bool same_point(const std::vector<S>& p, const std::vector<S>& q) {
    if (p.size() != q.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if constexpr (is_exact_v<S>) {
        if (p[i] != q[i]) return false;
      } else {
        if (std::fabs(p[i] - q[i]) > kFloatMergeTolerance) return false;
      }
    }
    return true;
  }

private:
  void canonicalize() {
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom<S>& a, const Atom<S>& b) { return a.point < b.point; });
    std::vector<Atom<S>> merged;
    merged.reserve(atoms_.size());
    if constexpr (is_exact_v<S>) {
      for (auto& a : atoms_) {
        if (!merged.empty() && merged.back().point == a.point) {
          merged.back().weight += a.weight;
        } else {
          merged.push_back(std::move(a));
        }
      }
    } else {
      // Near-equal points need not be adjacent after a lexicographic sort; scan
      // the run whose leading coordinate is within tolerance.
      std::vector<bool> absorbed(atoms_.size(), false);
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (absorbed[i]) continue;
        Atom<S> acc = atoms_[i];
        for (std::size_t j = i + 1;
             j < atoms_.size() && atoms_[j].point[0] - atoms_[i].point[0] <= kFloatMergeTolerance; ++j) {
          if (!absorbed[j] && same_point(atoms_[i].point, atoms_[j].point)) {
            acc.weight += atoms_[j].weight;
            absorbed[j] = true;
          }
        }
        merged.push_back(std::move(acc));
      }
    }
    std::erase_if(merged, [](const Atom<S>& a) { return a.weight == S(0); });
    atoms_ = std::move(merged);
  }

  std::size_t n_;
  std::vector<Atom<S>> atoms_;
};

template <Scalar To, Scalar From>
AtomicMeasure<To> convert_measure(const AtomicMeasure<From>& mu) {
  std::vector<Atom<To>> atoms;
  atoms.reserve(mu.size());
  for (const auto& a : mu.atoms()) {
    Atom<To> b{{}, convert_scalar<To>(a.weight)};
    for (const auto& x : a.point) b.point.push_back(convert_scalar<To>(x));
    atoms.push_back(std::move(b));
  }
  return AtomicMeasure<To>(mu.dim(), std::move(atoms));
}

}  // namespace momentforge
