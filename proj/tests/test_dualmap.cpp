#include <doctest.h>

#include "momentforge/algebra.hpp"
#include "momentforge/combinatorics.hpp"
#include "momentforge/dualmap.hpp"
#include "oracles.hpp"

using namespace momentforge;
using Q = Rational;

namespace {

/// sum_{k <= degree} (-1)^k / k! x^k d^k
DifferentialOperator<Q> truncated_evaluation(unsigned degree) {
  DifferentialOperator<Q> t(1);
  for (unsigned k = 0; k <= degree; ++k)
    t.add_term(MultiIndex{k}, Polynomial<Q>::monomial(MultiIndex{k}, Q(k % 2 ? -1 : 1) / Q(oracle::factorial(k))));
  return t;
}

DifferentialOperator<Q> random_operator(oracle::Rng& rng, std::size_t n, unsigned order, unsigned qdeg) {
  DifferentialOperator<Q> t(n);
  const auto terms = oracle::uniform_int(rng, 1, 4);
  for (long k = 0; k < terms; ++k) {
    const auto& basis = MonomialBasis::get(n, order)->elements();
    const auto& a = basis[static_cast<std::size_t>(oracle::uniform_int(rng, 0, static_cast<long>(basis.size()) - 1))];
    t.add_term(a, oracle::random_polynomial(rng, n, qdeg, 3));
  }
  return t;
}

/// <s, p> = sum_a p_a s_a
Q pairing(const Sequence<Q>& s, const Polynomial<Q>& p) {
  Q acc(0);
  for (const auto& [a, c] : p.terms()) acc += c * s[a];
  return acc;
}

}  // namespace

TEST_CASE("apply_diffop examples") {
  oracle::Rng rng(111);
  const auto q = oracle::random_polynomial(rng, 2, 3, 4);
  const auto p = oracle::random_polynomial(rng, 2, 4, 5);
  CHECK(apply_diffop(DifferentialOperator<Q>::multiplication(q), p) == q * p);

  for (int trial = 0; trial < 10; ++trial) {
    const auto r = oracle::random_polynomial(rng, 1, 6, 5);
    CHECK(apply_diffop(truncated_evaluation(6), r) == Polynomial<Q>::constant(1, r.coefficient(MultiIndex{0})));
  }

  DifferentialOperator<Q> euler(1);
  euler.add_term(MultiIndex{1}, Polynomial<Q>::variable(1, 0));
  CHECK(apply_diffop(euler, Polynomial<Q>::monomial(MultiIndex{3})) == Polynomial<Q>::monomial(MultiIndex{3}, Q(3)));
  CHECK_THROWS_AS(apply_diffop(euler, p), DimensionMismatch);
}

TEST_CASE("terms merge per multi-index") {
  DifferentialOperator<Q> t(1);
  t.add_term(MultiIndex{1}, Polynomial<Q>::constant(1, Q(2)));
  t.add_term(MultiIndex{1}, Polynomial<Q>::variable(1, 0));
  CHECK(t.terms().size() == 1);
  t.add_term(MultiIndex{1}, Polynomial<Q>::constant(1, Q(-2)) - Polynomial<Q>::variable(1, 0));
  CHECK(t.terms().empty());
}

TEST_CASE("shift examples and properties") {
  oracle::Rng rng(113);
  const auto s = oracle::random_sequence(rng, 2, 5);
  CHECK(shift_apply(Polynomial<Q>::constant(2, Q(1)), s) == s);

  const auto halves = moments(AtomicMeasure<Q>::dirac({Q(1, 2)}), 8);
  const auto shifted = shift_apply(Polynomial<Q>::variable(1, 0), halves);
  CHECK(shifted.degree() == 7);
  for (unsigned k = 0; k <= 7; ++k) CHECK(shifted[MultiIndex{k}] == Q(1, 1u << (k + 1)));
  CHECK_THROWS_AS(shift_apply(Polynomial<Q>::variable(1, 0), halves, 8), DegreeError);

  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = static_cast<std::size_t>(oracle::uniform_int(rng, 1, 3));
    const auto mu = oracle::random_measure(rng, n, 3);
    const auto q = oracle::random_polynomial(rng, n, 2, 3);
    // q dmu, reweighted atom by atom; q may be negative so compare signed sums
    const unsigned out = 3;
    const auto lhs = shift_apply(q, moments(mu, out + q.degree()), out);
    for (const auto& a : lhs.basis()) {
      Q direct(0);
      for (const auto& atom : mu.atoms()) direct += atom.weight * q.evaluate(atom.point) * monomial_value(a, atom.point);
      CHECK(lhs[a] == direct);
    }
    const auto q1 = oracle::random_polynomial(rng, n, 2, 2);
    const auto q2 = oracle::random_polynomial(rng, n, 2, 2);
    const auto u = oracle::random_sequence(rng, n, 6);
    const unsigned w = 6 - (q1 * q2).degree();
    CHECK(shift_apply(q1 * q2, u, w) == shift_apply(q1, shift_apply(q2, u, 6 - q2.degree()), w));
  }
}

TEST_CASE("dual action examples") {
  oracle::Rng rng(127);
  const auto s = oracle::random_sequence(rng, 2, 5);
  CHECK(dual_apply(DifferentialOperator<Q>::multiplication(Polynomial<Q>::constant(2, Q(1))), s, 5) == s);

  const auto q = oracle::random_polynomial(rng, 2, 2, 3);
  CHECK(dual_apply(DifferentialOperator<Q>::multiplication(q), s, 5 - q.degree()) == shift_apply(q, s));

  DifferentialOperator<Q> d(1);
  d.add_term(MultiIndex{1}, Polynomial<Q>::constant(1, Q(1)));
  const auto u = oracle::random_sequence(rng, 1, 6);
  const auto du = dual_apply(d, u, 7);
  CHECK(du[MultiIndex{0}] == 0);
  for (unsigned k = 1; k <= 7; ++k) CHECK(du[MultiIndex{k}] == Q(k) * u[MultiIndex{k - 1}]);

  CHECK_THROWS_AS(dual_apply(DifferentialOperator<Q>::multiplication(Polynomial<Q>::variable(1, 0)), u, 6),
                  DegreeError);
}

TEST_CASE("duality identity") {
  oracle::Rng rng(131);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = static_cast<std::size_t>(oracle::uniform_int(rng, 1, 2));
    const auto t = random_operator(rng, n, 2, 2);
    const auto p = oracle::random_polynomial(rng, n, 4, 5);
    const unsigned need = t.image_degree(p.degree());
    const auto s = oracle::random_sequence(rng, n, need);
    CHECK(pairing(dual_apply(t, s, p.degree()), p) == pairing(s, apply_diffop(t, p)));
  }
}

TEST_CASE("diagonal operators act by Hadamard multiplication") {
  oracle::Rng rng(137);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = static_cast<std::size_t>(oracle::uniform_int(rng, 1, 2));
    const unsigned deg = 5;
    const auto c = oracle::random_sequence(rng, n, deg);
    const auto t = DifferentialOperator<Q>::from_diagonal_c(c);
    const auto s = oracle::random_sequence(rng, n, deg);
    CHECK(dual_apply(t, s, deg) == hadamard(t_from_c(c, deg), s));
  }
}

TEST_CASE("K-moment preservation check") {
  const std::vector<std::vector<Q>> ys{{Q(0)}, {Q(1)}, {Q(-3, 2)}, {Q(5)}};
  const auto id = k_moment_preservation_check(DifferentialOperator<Q>::multiplication(Polynomial<Q>::constant(1, Q(1))),
                                              ys, 2, Cone::FullSpace);
  CHECK(id.status == PsdStatus::PSD);
  CHECK(id.samples.size() == ys.size());

  const auto negative = Polynomial<Q>::constant(1, Q(1)) - Polynomial<Q>::monomial(MultiIndex{2});
  const auto refuted =
      k_moment_preservation_check(DifferentialOperator<Q>::multiplication(negative), ys, 1, Cone::FullSpace);
  CHECK(refuted.status == PsdStatus::NotPSD);
  CHECK(refuted.samples[0].report.status == PsdStatus::PSD);
  CHECK(refuted.samples[2].report.status == PsdStatus::NotPSD);

  const auto t0 = k_moment_preservation_check(truncated_evaluation(8), {{Q(1)}}, 3, Cone::FullSpace);
  CHECK(t0.status == PsdStatus::PSD);
  for (unsigned k = 0; k <= 6; ++k) CHECK(t0.samples[0].sequence[MultiIndex{k}] == Q(k % 2 ? -1 : 1));
  CHECK(t0.ignored_terms == 2);

  // x^2 + 1 on the full space, -1 refuted
  const auto q = Polynomial<Q>::monomial(MultiIndex{2, 0}) + Polynomial<Q>::constant(2, Q(1));
  const std::vector<std::vector<Q>> ys2{{Q(0), Q(0)}, {Q(1), Q(-2)}, {Q(-1, 3), Q(4)}};
  CHECK(k_moment_preservation_check(DifferentialOperator<Q>::multiplication(q), ys2, 2, Cone::FullSpace).status ==
        PsdStatus::PSD);
  CHECK(k_moment_preservation_check(DifferentialOperator<Q>::multiplication(Polynomial<Q>::constant(2, Q(-1))), ys2, 2,
                                    Cone::FullSpace)
            .status == PsdStatus::NotPSD);

  // orthant: d/dx moves mass to the left of y and fails the shifted cone at y = 0
  DifferentialOperator<Q> deriv(1);
  deriv.add_term(MultiIndex{1}, Polynomial<Q>::constant(1, Q(1)));
  const auto orthant = k_moment_preservation_check(deriv, {{Q(0)}, {Q(2)}}, 1, Cone::NonnegOrthant);
  CHECK(orthant.samples[0].report.checks.size() == 2);
  CHECK(k_moment_preservation_check(DifferentialOperator<Q>::multiplication(q), {{Q(1), Q(2)}}, 1,
                                    Cone::NonnegOrthant)
            .status == PsdStatus::PSD);
  CHECK_THROWS_AS(k_moment_preservation_check(deriv, {{Q(-1)}}, 1, Cone::NonnegOrthant), DomainError);
  CHECK_THROWS_AS(k_moment_preservation_check(deriv, {{Q(1), Q(1)}}, 1, Cone::FullSpace), DimensionMismatch);
}
