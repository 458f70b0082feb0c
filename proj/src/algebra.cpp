#include "momentforge/algebra.hpp"

#include <cmath>

namespace momentforge {

double exponential_tail(double x, unsigned order) {
  if (x <= 0) return 0.0;
  // First omitted term x^{K+1}/(K+1)! in log space, then sum until the terms
  // stop mattering. Terms decrease once k > x.
  const double k0 = static_cast<double>(order) + 1.0;
  double term = std::exp(k0 * std::log(x) - std::lgamma(k0 + 1.0));
  double sum = 0.0;
  for (double k = k0; k < k0 + 10000.0; k += 1.0) {
    sum += term;
    if (k > x && term <= 1e-17 * sum) break;
    term *= x / (k + 1.0);
  }
  return sum;
}

}  // namespace momentforge
