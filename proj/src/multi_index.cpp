#include "momentforge/multi_index.hpp"

#include <map>
#include <mutex>
#include <sstream>
#include <utility>

namespace momentforge {

Integer MultiIndex::factorial() const {
  Integer f = 1;
  for (auto e : exps_) {
    Integer g;
    mpz_fac_ui(g.get_mpz_t(), e);
    f *= g;
  }
  return f;
}

bool MultiIndex::divides(const MultiIndex& other) const {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < exps_.size(); ++i)
    if (exps_[i] > other.exps_[i]) return false;
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  require_same_dim(*this, other);
  MultiIndex r(*this);
  for (std::size_t i = 0; i < exps_.size(); ++i) r.exps_[i] += other.exps_[i];
  return r;
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  require_same_dim(*this, other);
  MultiIndex r(*this);
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (other.exps_[i] > exps_[i]) throw DomainError("multi-index difference would be negative");
    r.exps_[i] -= other.exps_[i];
  }
  return r;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (i) os << ',';
    os << exps_[i];
  }
  os << ')';
  return os.str();
}

void require_same_dim(const MultiIndex& a, const MultiIndex& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("multi-index dimensions differ: " + a.to_string() + " vs " + b.to_string());
}

namespace {

// Appends every alpha with |alpha| == remaining over coordinates [pos, n),
// first coordinate descending.
void enumerate_degree(std::vector<MultiIndex::value_type>& cur, std::size_t pos, unsigned remaining,
                      std::vector<MultiIndex>& out) {
  const std::size_t n = cur.size();
  if (pos + 1 == n) {
    cur[pos] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (unsigned e = remaining + 1; e-- > 0;) {
    cur[pos] = e;
    enumerate_degree(cur, pos + 1, remaining - e, out);
  }
  cur[pos] = 0;
}

}  // namespace

MonomialBasis::MonomialBasis(std::size_t n, unsigned degree) : n_(n), degree_(degree) {
  if (n == 0) throw DimensionMismatch("dimension must be at least 1");
  elems_.reserve(monomial_count(n, degree));
  std::vector<MultiIndex::value_type> cur(n, 0);
  for (unsigned k = 0; k <= degree; ++k) enumerate_degree(cur, 0, k, elems_);
  index_.reserve(elems_.size());
  for (std::size_t i = 0; i < elems_.size(); ++i) index_.emplace(elems_[i], i);
}

std::shared_ptr<const MonomialBasis> MonomialBasis::get(std::size_t n, unsigned degree) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, unsigned>, std::shared_ptr<const MonomialBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, degree}];
  if (!slot) slot = std::make_shared<const MonomialBasis>(n, degree);
  return slot;
}

std::size_t MonomialBasis::index_of(const MultiIndex& alpha) const {
  if (alpha.dim() != n_) throw DimensionMismatch("multi-index " + alpha.to_string() + " has wrong dimension");
  auto it = index_.find(alpha);
  if (it == index_.end())
    throw DegreeError("multi-index " + alpha.to_string() + " exceeds degree " + std::to_string(degree_));
  return it->second;
}

bool MonomialBasis::contains(const MultiIndex& alpha) const {
  return alpha.dim() == n_ && alpha.total() <= degree_;
}

std::size_t monomial_count(std::size_t n, unsigned d) {
  Integer c;
  mpz_bin_uiui(c.get_mpz_t(), d + n, n);
  return c.get_ui();
}

}  // namespace momentforge
