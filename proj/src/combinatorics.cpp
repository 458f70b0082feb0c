#include "momentforge/combinatorics.hpp"

#include <array>
#include <mutex>
#include <shared_mutex>

namespace momentforge {

TriangularTable::TriangularTable(TableKind kind, unsigned degree) : kind_(kind), degree_(degree) {
  rows_.resize(degree + 1);
  for (unsigned n = 0; n <= degree; ++n) {
    rows_[n].assign(n + 1, Integer(0));
    if (n == 0) {
      rows_[0][0] = 1;
      continue;
    }
    const auto& prev = rows_[n - 1];
    auto at_prev = [&](unsigned k) -> Integer { return k < prev.size() ? prev[k] : Integer(0); };
    for (unsigned k = 0; k <= n; ++k) {
      const Integer left = k == 0 ? Integer(0) : at_prev(k - 1);
      switch (kind) {
        case TableKind::Binomial:
          rows_[n][k] = left + at_prev(k);
          break;
        case TableKind::Stirling1Unsigned:
          rows_[n][k] = left + Integer(n - 1) * at_prev(k);
          break;
        case TableKind::Stirling2:
          rows_[n][k] = left + Integer(k) * at_prev(k);
          break;
      }
    }
  }
}

const Integer& TriangularTable::operator()(unsigned n, unsigned k) const {
  if (n > degree_) throw DegreeError("table row " + std::to_string(n) + " beyond degree " + std::to_string(degree_));
  return k <= n ? rows_[n][k] : zero_;
}

bool TriangularTable::satisfies_recurrence() const {
  if ((*this)(0, 0) != 1) return false;
  for (unsigned n = 1; n <= degree_; ++n) {
    for (unsigned k = 1; k < n; ++k) {
      const Integer& up = (*this)(n - 1, k);
      const Integer& diag = (*this)(n - 1, k - 1);
      Integer expected;
      switch (kind_) {
        case TableKind::Binomial:
          expected = diag + up;
          break;
        case TableKind::Stirling1Unsigned:
          expected = diag + Integer(n - 1) * up;
          break;
        case TableKind::Stirling2:
          expected = diag + Integer(k) * up;
          break;
      }
      if ((*this)(n, k) != expected) return false;
    }
  }
  return true;
}

std::shared_ptr<const TriangularTable> table(TableKind kind, unsigned degree) {
  static std::shared_mutex mutex;
  static std::array<std::shared_ptr<const TriangularTable>, 3> tables;
  const auto slot = static_cast<std::size_t>(kind);
  {
    std::shared_lock lock(mutex);
    if (tables[slot] && tables[slot]->degree() >= degree) return tables[slot];
  }
  std::unique_lock lock(mutex);
  if (!tables[slot] || tables[slot]->degree() < degree) {
    // Grow geometrically so repeated small extensions stay cheap.
    const unsigned current = tables[slot] ? tables[slot]->degree() : 0U;
    tables[slot] = std::make_shared<const TriangularTable>(kind, std::max({degree, 2 * current, 16U}));
  }
  return tables[slot];
}

Integer binomial(unsigned n, unsigned k) { return (*table(TableKind::Binomial, n))(n, k); }
Integer stirling1_unsigned(unsigned n, unsigned k) { return (*table(TableKind::Stirling1Unsigned, n))(n, k); }
Integer stirling2(unsigned n, unsigned k) { return (*table(TableKind::Stirling2, n))(n, k); }

Integer multi_binomial(const MultiIndex& alpha, const MultiIndex& beta) {
  require_same_dim(alpha, beta);
  Integer r = 1;
  for (std::size_t i = 0; i < alpha.dim(); ++i) {
    if (beta[i] > alpha[i]) return 0;
    r *= binomial(alpha[i], beta[i]);
  }
  return r;
}

Integer multi_stirling(TableKind kind, const MultiIndex& alpha, const MultiIndex& beta) {
  if (kind == TableKind::Binomial) throw DomainError("multi_stirling requires a Stirling table kind");
  require_same_dim(alpha, beta);
  unsigned top = 0;
  for (std::size_t i = 0; i < alpha.dim(); ++i) top = std::max<unsigned>(top, alpha[i]);
  const auto tab = table(kind, top);
  Integer r = 1;
  for (std::size_t i = 0; i < alpha.dim(); ++i) {
    if (beta[i] > alpha[i]) return 0;
    r *= (*tab)(alpha[i], beta[i]);
    if (r == 0) return 0;
  }
  return r;
}

}  // namespace momentforge
