#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "momentforge/diagop.hpp"
#include "momentforge/dualmap.hpp"
#include "momentforge/error.hpp"
#include "momentforge/levy.hpp"
#include "momentforge/measure.hpp"
#include "momentforge/polynomial.hpp"
#include "momentforge/positivity.hpp"
#include "momentforge/sequence.hpp"

namespace momentforge::json_io {

using Json = nlohmann::ordered_json;

/// Parses text, mapping syntax errors to ParseError.
Json parse(const std::string& text);

/// "mode" field; absent means rational.
ScalarMode read_mode(const Json& j);
void write_mode(Json& j, ScalarMode mode);

std::size_t read_dim(const Json& j);
MultiIndex read_multi_index(const Json& j, std::size_t n);
Json write_multi_index(const MultiIndex& alpha);

/// Field lookup that reports the missing key.
const Json& field(const Json& j, const char* key);

/// Rationals travel as "p/q" strings (JSON integers also accepted); doubles
/// as numbers, with "inf", "-inf", "nan" strings for non-finite values.
template <Scalar S>
Json write_scalar(const S& x) {
  if constexpr (is_exact_v<S>) {
    return scalar_to_string(x);
  } else {
    if (std::isfinite(x)) return x;
    return scalar_to_string(x);
  }
}

template <Scalar S>
S read_scalar(const Json& j) {
  if (j.is_string()) return parse_scalar<S>(j.get<std::string>());
  if constexpr (is_exact_v<S>) {
    if (j.is_number_integer()) return Rational(j.dump());
    if (j.is_number()) throw ParseError("rational mode needs exact values; write " + j.dump() + " as a \"p/q\" string");
  } else {
    if (j.is_number()) return j.get<double>();
  }
  throw ParseError("expected a number, got " + j.dump());
}

template <Scalar S>
std::vector<S> read_vector(const Json& j, std::size_t n) {
  if (!j.is_array()) throw ParseError("expected an array, got " + j.dump());
  if (j.size() != n) throw DimensionMismatch("expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
  std::vector<S> v;
  v.reserve(n);
  for (const auto& x : j) v.push_back(read_scalar<S>(x));
  return v;
}

template <Scalar S>
Json write_vector(const std::vector<S>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(write_scalar(x));
  return out;
}

template <Scalar S>
void require_mode(const Json& j) {
  if (read_mode(j) != scalar_mode_v<S>)
    throw ParseError("input is in " + std::string(to_string(read_mode(j))) + " mode, expected " +
                     std::string(to_string(scalar_mode_v<S>)));
}

// measures

template <Scalar S>
Json write_measure(const AtomicMeasure<S>& mu) {
  Json j;
  j["n"] = mu.dim();
  write_mode(j, scalar_mode_v<S>);
  Json atoms = Json::array();
  for (const auto& a : mu.atoms()) atoms.push_back({{"point", write_vector(a.point)}, {"weight", write_scalar(a.weight)}});
  j["atoms"] = std::move(atoms);
  return j;
}

template <Scalar S>
AtomicMeasure<S> read_measure(const Json& j) {
  require_mode<S>(j);
  const std::size_t n = read_dim(j);
  std::vector<Atom<S>> atoms;
  const auto& list = field(j, "atoms");
  if (!list.is_array()) throw ParseError("\"atoms\" must be an array");
  for (const auto& a : list) atoms.push_back({read_vector<S>(field(a, "point"), n), read_scalar<S>(field(a, "weight"))});
  return AtomicMeasure<S>(n, std::move(atoms));
}

// sequences

template <Scalar S>
Json write_entries(const Sequence<S>& s) {
  Json values = Json::array();
  for (std::size_t i = 0; i < s.size(); ++i)
    values.push_back({{"alpha", write_multi_index(s.basis()[i])}, {"value", write_scalar(s.at_position(i))}});
  return values;
}

template <Scalar S>
Json write_sequence(const Sequence<S>& s) {
  Json j;
  j["n"] = s.dim();
  j["degree"] = s.degree();
  write_mode(j, scalar_mode_v<S>);
  j["values"] = write_entries(s);
  return j;
}

/// Dense: every |alpha| <= degree must appear exactly once.
template <Scalar S>
Sequence<S> read_entries(const Json& list, std::size_t n, unsigned degree, const char* key) {
  if (!list.is_array()) throw ParseError(std::string("\"") + key + "\" must be an array");
  Sequence<S> s(n, degree);
  std::vector<bool> seen(s.size(), false);
  for (const auto& e : list) {
    const auto alpha = read_multi_index(field(e, "alpha"), n);
    if (alpha.total() > degree)
      throw DegreeError("entry " + alpha.to_string() + " lies outside degree " + std::to_string(degree));
    const std::size_t pos = s.basis().index_of(alpha);
    if (seen[pos]) throw ParseError("duplicate entry " + alpha.to_string());
    seen[pos] = true;
    s.at_position(pos) = read_scalar<S>(field(e, "value"));
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw ParseError("missing entry " + s.basis()[i].to_string());
  return s;
}

template <Scalar S>
Sequence<S> read_sequence(const Json& j) {
  require_mode<S>(j);
  const std::size_t n = read_dim(j);
  const auto degree = field(j, "degree").get<unsigned>();
  return read_entries<S>(field(j, "values"), n, degree, "values");
}

// polynomials

template <Scalar S>
Json write_terms(const Polynomial<S>& p) {
  Json terms = Json::array();
  for (const auto& [a, c] : p.terms()) terms.push_back({{"alpha", write_multi_index(a)}, {"coeff", write_scalar(c)}});
  return terms;
}

template <Scalar S>
Polynomial<S> read_terms(const Json& list, std::size_t n) {
  if (!list.is_array()) throw ParseError("polynomial terms must be an array");
  Polynomial<S> p(n);
  for (const auto& t : list) p.add_term(read_multi_index(field(t, "alpha"), n), read_scalar<S>(field(t, "coeff")));
  return p;
}

template <Scalar S>
Json write_polynomial(const Polynomial<S>& p) {
  Json j;
  j["n"] = p.dim();
  write_mode(j, scalar_mode_v<S>);
  j["terms"] = write_terms(p);
  return j;
}

template <Scalar S>
Polynomial<S> read_polynomial(const Json& j) {
  require_mode<S>(j);
  return read_terms<S>(field(j, "terms"), read_dim(j));
}

// diagonal operators

template <Scalar S>
Json write_operator(const DiagonalOperator<S>& op) {
  Json j;
  j["n"] = op.dim();
  j["rep"] = std::string(to_string(op.representation()));
  write_mode(j, scalar_mode_v<S>);
  if (op.representation() == Representation::CoefD) {
    j["degree"] = op.d_coefficients().support_degree();
    Json coeffs = Json::array();
    for (const auto& [a, v] : op.d_coefficients().terms())
      coeffs.push_back({{"alpha", write_multi_index(a)}, {"value", write_scalar(v)}});
    j["coeffs"] = std::move(coeffs);
  } else {
    j["degree"] = op.dense_coefficients().degree();
    j["coeffs"] = write_entries(op.dense_coefficients());
  }
  return j;
}

/// The d form is sparse: listed entries only, any degree.
template <Scalar S>
DiagonalOperator<S> read_operator(const Json& j) {
  require_mode<S>(j);
  const std::size_t n = read_dim(j);
  const auto rep = parse_representation(field(j, "rep").get<std::string>());
  const auto& coeffs = field(j, "coeffs");
  if (rep == Representation::CoefD) {
    if (!coeffs.is_array()) throw ParseError("\"coeffs\" must be an array");
    FiniteSeq<S> d(n);
    for (const auto& e : coeffs) {
      const auto alpha = read_multi_index(field(e, "alpha"), n);
      if (d.terms().count(alpha)) throw ParseError("duplicate entry " + alpha.to_string());
      d.set(alpha, read_scalar<S>(field(e, "value")));
    }
    return DiagonalOperator<S>::from_d(std::move(d));
  }
  auto dense = read_entries<S>(coeffs, n, field(j, "degree").get<unsigned>(), "coeffs");
  return rep == Representation::EigT ? DiagonalOperator<S>::from_eigenvalues(std::move(dense))
                                     : DiagonalOperator<S>::from_c(std::move(dense));
}

// Levy triplets

template <Scalar S>
Json write_triplet(const LevyTriplet<S>& tr) {
  Json j;
  j["n"] = tr.dim();
  write_mode(j, scalar_mode_v<S>);
  j["c0"] = write_scalar(tr.c0());
  j["b"] = write_vector(tr.b());
  Json sigma = Json::array();
  for (std::size_t i = 0; i < tr.dim(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < tr.dim(); ++k) row.push_back(write_scalar(tr.sigma()(i, k)));
    sigma.push_back(std::move(row));
  }
  j["sigma"] = std::move(sigma);
  j["nu"] = write_measure(tr.nu());
  return j;
}

template <Scalar S>
SymMatrix<S> read_matrix(const Json& j, std::size_t n) {
  if (!j.is_array() || j.size() != n) throw DimensionMismatch("matrix must have " + std::to_string(n) + " rows");
  std::vector<S> entries;
  for (const auto& row : j) {
    auto r = read_vector<S>(row, n);
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return SymMatrix<S>(n, std::move(entries));
}

template <Scalar S>
LevyTriplet<S> read_triplet(const Json& j) {
  require_mode<S>(j);
  const std::size_t n = read_dim(j);
  // nu inherits n and mode from the triplet when it omits them
  AtomicMeasure<S> nu(n);
  if (j.contains("nu")) {
    Json nu_json = j["nu"];
    if (!nu_json.is_object()) throw ParseError("\"nu\" must be a measure object");
    if (!nu_json.contains("n")) nu_json["n"] = n;
    if (!nu_json.contains("mode")) write_mode(nu_json, scalar_mode_v<S>);
    nu = read_measure<S>(nu_json);
  }
  return LevyTriplet<S>(n, read_scalar<S>(field(j, "c0")), read_vector<S>(field(j, "b"), n),
                        read_matrix<S>(field(j, "sigma"), n), std::move(nu));
}

// differential operators

template <Scalar S>
Json write_diffop(const DifferentialOperator<S>& t) {
  Json j;
  j["n"] = t.dim();
  write_mode(j, scalar_mode_v<S>);
  Json terms = Json::array();
  for (const auto& [a, q] : t.terms()) terms.push_back({{"alpha", write_multi_index(a)}, {"q", write_terms(q)}});
  j["terms"] = std::move(terms);
  return j;
}

template <Scalar S>
DifferentialOperator<S> read_diffop(const Json& j) {
  require_mode<S>(j);
  const std::size_t n = read_dim(j);
  DifferentialOperator<S> t(n);
  const auto& terms = field(j, "terms");
  if (!terms.is_array()) throw ParseError("\"terms\" must be an array");
  for (const auto& e : terms) t.add_term(read_multi_index(field(e, "alpha"), n), read_terms<S>(field(e, "q"), n));
  return t;
}

// verdicts

/// Non-finite margins become strings like every other double.
Json write_margin(double margin);

template <Scalar S>
Json write_verdict(const PsdVerdict<S>& v) {
  Json j;
  j["status"] = std::string(to_string(v.status));
  j["margin"] = write_margin(v.margin);
  j["rank"] = v.rank;
  if (v.witness) {
    j["witness"] = write_vector(*v.witness);
    if (v.witness_value) j["witness_value"] = write_scalar(*v.witness_value);
  }
  return j;
}

template <Scalar S>
Json write_membership(const MembershipReport<S>& r) {
  Json j;
  j["status"] = std::string(to_string(r.status));
  j["level"] = r.level;
  j["necessary_only"] = r.necessary_only;
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json v = write_verdict(c.verdict);
    Json named;
    named["name"] = c.name;
    for (auto& [k, x] : v.items()) named[k] = x;
    checks.push_back(std::move(named));
  }
  j["checks"] = std::move(checks);
  return j;
}

PsdStatus read_status(const std::string& text);

}  // namespace momentforge::json_io
