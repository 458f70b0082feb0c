#include "momentforge/cli.hpp"

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "momentforge/algebra.hpp"
#include "momentforge/diagop.hpp"
#include "momentforge/dualmap.hpp"
#include "momentforge/json_io.hpp"
#include "momentforge/levy.hpp"
#include "momentforge/positivity.hpp"

namespace momentforge::cli {

namespace {

using json_io::Json;

struct Options {
  std::string output = "json";
  std::vector<std::string> inputs;
  unsigned degree = 0;
  std::string conv_mode = "add";
  std::string exponent;
  std::string cone = "fullspace";
  std::string from;
  std::string to;
  bool inverse = false;
  bool within_window = false;
  double tolerance = 1e-10;
  std::vector<double> grid{0.1, 0.25, 0.5, 1.0, 2.0};
  unsigned trials = 100;
  std::uint64_t seed = 20240611;
  unsigned max_order = 6;
  std::string samples;
};

struct Context {
  const Options& opt;
  std::istream& in;
  std::ostream& out;
  PsdOptions psd;
};

Json load(Context& ctx, const std::string& path) {
  std::stringstream buf;
  if (path == "-") {
    buf << ctx.in.rdbuf();
  } else {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open " + path);
    buf << f.rdbuf();
  }
  return json_io::parse(buf.str());
}

/// Calls f.template operator()<S>() for the scalar type named by `mode`.
template <class F>
int with_mode(ScalarMode mode, F&& f) {
  if (mode == ScalarMode::Rational) return f.template operator()<Rational>();
  return f.template operator()<double>();
}

void require_same_mode(const Json& a, const Json& b) {
  if (json_io::read_mode(a) != json_io::read_mode(b)) throw ParseError("inputs are in different scalar modes");
}

Cone parse_cone(const std::string& s) {
  if (s == "fullspace") return Cone::FullSpace;
  if (s == "orthant") return Cone::NonnegOrthant;
  throw ParseError("cone must be fullspace or orthant");
}

// table rendering

std::string cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + cell(v[i]);
    return s + ")";
  }
  return v.dump();
}

bool is_record_list(const Json& v) {
  if (!v.is_array() || v.empty()) return false;
  for (const auto& e : v)
    if (!e.is_object()) return false;
  return true;
}

void render(const Json& j, std::ostream& os, int indent);

void render_rows(const Json& rows, std::ostream& os, int indent) {
  std::vector<std::string> cols;
  for (const auto& [k, v] : rows.front().items())
    if (!v.is_object() && !is_record_list(v)) cols.push_back(k);
  std::vector<std::size_t> width(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    width[c] = cols[c].size();
    for (const auto& r : rows)
      if (r.contains(cols[c])) width[c] = std::max(width[c], cell(r[cols[c]]).size());
  }
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  os << pad;
  for (std::size_t c = 0; c < cols.size(); ++c) os << std::left << std::setw(static_cast<int>(width[c] + 2)) << cols[c];
  os << '\n';
  for (const auto& r : rows) {
    os << pad;
    for (std::size_t c = 0; c < cols.size(); ++c)
      os << std::left << std::setw(static_cast<int>(width[c] + 2)) << (r.contains(cols[c]) ? cell(r[cols[c]]) : "-");
    os << '\n';
    for (const auto& [k, v] : r.items()) {
      if (v.is_object() || is_record_list(v)) {
        os << pad << "  " << k << ":\n";
        render(v, os, indent + 4);
      }
    }
  }
}

void render(const Json& j, std::ostream& os, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (is_record_list(j)) {
    render_rows(j, os, indent);
    return;
  }
  if (!j.is_object()) {
    os << pad << cell(j) << '\n';
    return;
  }
  for (const auto& [k, v] : j.items()) {
    if (v.is_object() || is_record_list(v)) {
      os << pad << k << ":\n";
      render(v, os, indent + 2);
    } else {
      os << pad << k << ": " << cell(v) << '\n';
    }
  }
}

void emit(Context& ctx, const Json& j) {
  if (ctx.opt.output == "table") {
    render(j, ctx.out, 0);
  } else {
    ctx.out << j.dump(2) << '\n';
  }
}

int exit_for(PsdStatus s) { return s == PsdStatus::NotPSD ? kExitRefuted : kExitOk; }

// commands

int cmd_moments(Context& ctx) {
  const Json mu = load(ctx, ctx.opt.inputs.at(0));
  return with_mode(json_io::read_mode(mu), [&]<Scalar S>() {
    emit(ctx, json_io::write_sequence(moments(json_io::read_measure<S>(mu), ctx.opt.degree)));
    return kExitOk;
  });
}

int cmd_convolve(Context& ctx) {
  const Json a = load(ctx, ctx.opt.inputs.at(0));
  const Json b = load(ctx, ctx.opt.inputs.at(1));
  require_same_mode(a, b);
  if (ctx.opt.conv_mode != "add" && ctx.opt.conv_mode != "mult") throw ParseError("--mode must be add or mult");
  return with_mode(json_io::read_mode(a), [&]<Scalar S>() {
    const auto mu = json_io::read_measure<S>(a);
    const auto nu = json_io::read_measure<S>(b);
    emit(ctx, json_io::write_measure(ctx.opt.conv_mode == "add" ? add_convolve(mu, nu) : mult_convolve(mu, nu)));
    return kExitOk;
  });
}

int cmd_hadamard(Context& ctx) {
  const Json a = load(ctx, ctx.opt.inputs.at(0));
  const Json b = load(ctx, ctx.opt.inputs.at(1));
  require_same_mode(a, b);
  return with_mode(json_io::read_mode(a), [&]<Scalar S>() {
    emit(ctx, json_io::write_sequence(hadamard(json_io::read_sequence<S>(a), json_io::read_sequence<S>(b))));
    return kExitOk;
  });
}

int cmd_power(Context& ctx) {
  const Json a = load(ctx, ctx.opt.inputs.at(0));
  return with_mode(json_io::read_mode(a), [&]<Scalar S>() {
    const S c = parse_scalar<S>(ctx.opt.exponent);
    emit(ctx, json_io::write_sequence(entrywise_power(json_io::read_sequence<S>(a), c)));
    return kExitOk;
  });
}

int cmd_hankel_check(Context& ctx) {
  const Json a = load(ctx, ctx.opt.inputs.at(0));
  const Cone cone = parse_cone(ctx.opt.cone);
  return with_mode(json_io::read_mode(a), [&]<Scalar S>() {
    const auto report = moment_membership_check(json_io::read_sequence<S>(a), ctx.opt.degree, cone, ctx.psd);
    Json j = json_io::write_membership(report);
    j["cone"] = std::string(to_string(cone));
    emit(ctx, j);
    return exit_for(report.status);
  });
}

int cmd_convert_rep(Context& ctx) {
  const Json a = load(ctx, ctx.opt.inputs.at(0));
  const auto target = parse_representation(ctx.opt.to);
  return with_mode(json_io::read_mode(a), [&]<Scalar S>() {
    const auto op = json_io::read_operator<S>(a);
    if (!ctx.opt.from.empty() && parse_representation(ctx.opt.from) != op.representation())
      throw ParseError("--from " + ctx.opt.from + " does not match the operator's rep \"" +
                       std::string(to_string(op.representation())) + "\"");
    unsigned degree = ctx.opt.degree;
    if (degree == 0 && op.window()) {
      degree = *op.window();
    } else if (degree == 0 && target != Representation::CoefD) {
      throw DegreeError("d-represented input needs --degree");
    }
    const auto conv =
        convert(op, target, degree, ctx.opt.within_window ? Support::WithinWindow : Support::Unknown);
    Json j = json_io::write_operator(conv.op);
    j["partial"] = conv.partial;
    if (conv.partial) j["outer_shell"] = json_io::write_scalar(conv.outer_shell);
    emit(ctx, j);
    return kExitOk;
  });
}

int cmd_apply_op(Context& ctx) {
  const Json a = load(ctx, ctx.opt.inputs.at(0));
  const Json p = load(ctx, ctx.opt.inputs.at(1));
  require_same_mode(a, p);
  return with_mode(json_io::read_mode(a), [&]<Scalar S>() {
    emit(ctx, json_io::write_polynomial(apply(json_io::read_operator<S>(a), json_io::read_polynomial<S>(p))));
    return kExitOk;
  });
}

int cmd_exp_gen(Context& ctx) {
  const Json a = load(ctx, ctx.opt.inputs.at(0));
  return with_mode(json_io::read_mode(a), [&]<Scalar S>() {
    const auto op = json_io::read_operator<S>(a);
    unsigned degree = ctx.opt.degree;
    if (degree == 0) {
      if (!op.window()) throw DegreeError("d-represented input needs --degree");
      degree = *op.window();
    }
    emit(ctx, json_io::write_operator(ctx.opt.inverse ? log_op(op, degree) : exp_op(op, degree)));
    return kExitOk;
  });
}

int cmd_levy_moments(Context& ctx) {
  const Json a = load(ctx, ctx.opt.inputs.at(0));
  return with_mode(json_io::read_mode(a), [&]<Scalar S>() {
    const auto m = infdiv_moments(json_io::read_triplet<S>(a), ctx.opt.degree);
    Json j;
    j["log_values"] = json_io::write_sequence(m.log_values);
    j["values"] = json_io::write_sequence(m.values());
    emit(ctx, j);
    return kExitOk;
  });
}

int cmd_levy_consistency(Context& ctx) {
  const Json a = load(ctx, ctx.opt.inputs.at(0));
  return with_mode(json_io::read_mode(a), [&]<Scalar S>() {
    const auto r = consistency_check(json_io::read_triplet<S>(a), ctx.opt.degree, ctx.opt.tolerance);
    Json j;
    j["degree"] = r.degree;
    j["max_log_deviation"] = json_io::write_scalar(r.max_log_deviation);
    j["max_relative_deviation"] = json_io::write_scalar(r.max_relative_deviation);
    if (r.worst) j["worst"] = json_io::write_multi_index(*r.worst);
    j["tolerance"] = r.tolerance;
    j["passed"] = r.passed;
    emit(ctx, j);
    return r.passed ? kExitOk : kExitRefuted;
  });
}

Json write_divisibility(const DivisibilityReport& r) {
  Json j;
  j["status"] = std::string(to_string(r.status));
  j["level"] = r.level;
  j["cone"] = std::string(to_string(r.cone));
  j["necessary_only"] = r.necessary_only;
  j["normalised_witnesses"] = r.normalised_witnesses;
  if (r.refuted_at) j["refuted_at"] = *r.refuted_at;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json m = json_io::write_membership(row.report);
    rows.push_back({{"c", row.c}, {"status", m["status"]}, {"checks", m["checks"]}});
  }
  j["rows"] = std::move(rows);
  return j;
}

int cmd_divisibility_scan(Context& ctx) {
  const Json a = load(ctx, ctx.opt.inputs.at(0));
  const Cone cone = parse_cone(ctx.opt.cone);
  return with_mode(json_io::read_mode(a), [&]<Scalar S>() {
    const unsigned level = ctx.opt.degree;
    const unsigned need = 2 * level + (cone == Cone::NonnegOrthant ? 1 : 0);
    DivisibilityReport r;
    if (a.is_object() && a.contains("c0")) {
      r = divisibility_scan(infdiv_moments(json_io::read_triplet<S>(a), need), level, ctx.opt.grid, cone, ctx.psd);
    } else {
      r = divisibility_scan(json_io::read_sequence<S>(a), level, ctx.opt.grid, cone, ctx.psd);
    }
    emit(ctx, write_divisibility(r));
    return exit_for(r.status);
  });
}

/// G^T G with G a k x m matrix of small rationals.
SymMatrix<Rational> random_gram(std::mt19937_64& rng, std::size_t m) {
  std::uniform_int_distribution<std::size_t> rows(1, m);
  std::uniform_int_distribution<long> num(-5, 5);
  std::uniform_int_distribution<long> den(1, 4);
  const std::size_t k = rows(rng);
  std::vector<Rational> g(k * m);
  for (auto& x : g) {
    x = Rational(num(rng), den(rng));
    x.canonicalize();
  }
  SymMatrix<Rational> a(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      Rational acc(0);
      for (std::size_t r = 0; r < k; ++r) acc += g[r * m + i] * g[r * m + j];
      a.set(i, j, acc);
    }
  }
  return a;
}

int cmd_schur_test(Context& ctx) {
  if (ctx.opt.max_order == 0) throw DomainError("--max-order must be positive");
  std::size_t psd_products = 0;
  Json failures = Json::array();
  for (unsigned trial = 0; trial < ctx.opt.trials; ++trial) {
    // one stream per trial keeps results independent of evaluation order
    std::mt19937_64 rng(ctx.opt.seed + trial);
    std::uniform_int_distribution<std::size_t> order(1, ctx.opt.max_order);
    const std::size_t m = order(rng);
    const auto a = random_gram(rng, m);
    const auto b = random_gram(rng, m);
    const auto v = is_psd(schur_product(a, b));
    if (v.status == PsdStatus::PSD) {
      ++psd_products;
    } else {
      Json f = json_io::write_verdict(v);
      f["trial"] = trial;
      f["order"] = m;
      failures.push_back(std::move(f));
    }
  }
  Json j;
  j["status"] = failures.empty() ? "PSD" : "NOT_PSD";
  j["trials"] = ctx.opt.trials;
  j["seed"] = ctx.opt.seed;
  j["max_order"] = ctx.opt.max_order;
  j["psd_products"] = psd_products;
  j["failures"] = std::move(failures);
  emit(ctx, j);
  return psd_products == ctx.opt.trials ? kExitOk : kExitRefuted;
}

int cmd_dual_apply(Context& ctx) {
  const Json t = load(ctx, ctx.opt.inputs.at(0));
  const Json s = load(ctx, ctx.opt.inputs.at(1));
  require_same_mode(t, s);
  return with_mode(json_io::read_mode(t), [&]<Scalar S>() {
    emit(ctx, json_io::write_sequence(
                  dual_apply(json_io::read_diffop<S>(t), json_io::read_sequence<S>(s), ctx.opt.degree)));
    return kExitOk;
  });
}

int cmd_kmoment_check(Context& ctx) {
  const Json t = load(ctx, ctx.opt.inputs.at(0));
  const Json samples = load(ctx, ctx.opt.samples);
  const Cone cone = parse_cone(ctx.opt.cone);
  return with_mode(json_io::read_mode(t), [&]<Scalar S>() {
    const auto op = json_io::read_diffop<S>(t);
    const Json& points = samples.is_object() ? json_io::field(samples, "points") : samples;
    if (!points.is_array()) throw ParseError("samples must be an array of points");
    std::vector<std::vector<S>> ys;
    for (const auto& p : points) ys.push_back(json_io::read_vector<S>(p, op.dim()));
    const auto r = k_moment_preservation_check(op, ys, ctx.opt.degree, cone, ctx.psd);
    Json j;
    j["status"] = std::string(to_string(r.status));
    j["cone"] = std::string(to_string(r.cone));
    j["level"] = r.level;
    j["ignored_terms"] = r.ignored_terms;
    j["note"] = r.note;
    Json rows = Json::array();
    for (const auto& s : r.samples) {
      Json m = json_io::write_membership(s.report);
      rows.push_back({{"y", json_io::write_vector(s.y)}, {"status", m["status"]}, {"checks", m["checks"]}});
    }
    j["samples"] = std::move(rows);
    emit(ctx, j);
    return exit_for(r.status);
  });
}

PsdOptions psd_options_from_env() {
  PsdOptions o;
  if (const char* env = std::getenv("MOMENTFORGE_FLOAT_TOL")) {
    const double tol = parse_double(env);
    if (!(tol > 0) || !std::isfinite(tol)) throw ParseError("MOMENTFORGE_FLOAT_TOL must be a positive number");
    o.float_tolerance = tol;
  }
  return o;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Moment sequences, atomic measures and diagonal positivity preservers"};
  app.name("momentforge");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--output", opt.output, "Output format")->check(CLI::IsMember({"json", "table"}));

  const auto inputs = [&](CLI::App* sub, int count, const char* what) {
    sub->add_option("inputs", opt.inputs, what)->required()->expected(count);
  };
  const auto degree = [&](CLI::App* sub, const char* what, bool required) {
    auto* o = sub->add_option("--degree", opt.degree, what);
    if (required) o->required();
  };

  auto* moments_cmd = app.add_subcommand("moments", "Moments of an atomic measure");
  inputs(moments_cmd, 1, "measure file");
  degree(moments_cmd, "truncation degree", true);

  auto* convolve_cmd = app.add_subcommand("convolve", "Additive or multiplicative convolution of two measures");
  inputs(convolve_cmd, 2, "measure files");
  convolve_cmd->add_option("--mode", opt.conv_mode, "add or mult")->check(CLI::IsMember({"add", "mult"}));

  auto* hadamard_cmd = app.add_subcommand("hadamard", "Entrywise product of two sequences");
  inputs(hadamard_cmd, 2, "sequence files");

  auto* power_cmd = app.add_subcommand("power", "Entrywise power of a positive sequence");
  inputs(power_cmd, 1, "sequence file");
  power_cmd->add_option("--c", opt.exponent, "exponent")->required();

  auto* hankel_cmd = app.add_subcommand("hankel-check", "Hankel (and localizing) PSD checks at a level");
  inputs(hankel_cmd, 1, "sequence file");
  degree(hankel_cmd, "Hankel level d", true);
  hankel_cmd->add_option("--cone", opt.cone, "fullspace or orthant")->check(CLI::IsMember({"fullspace", "orthant"}));

  auto* convert_cmd = app.add_subcommand("convert-rep", "Convert a diagonal operator between t, c and d forms");
  inputs(convert_cmd, 1, "operator file");
  convert_cmd->add_option("--from", opt.from, "expected source representation");
  convert_cmd->add_option("--to", opt.to, "target representation")->required();
  degree(convert_cmd, "window (defaults to the operator's)", false);
  convert_cmd->add_flag("--within-window", opt.within_window, "c coefficients vanish beyond the window");

  auto* apply_cmd = app.add_subcommand("apply-op", "Apply a diagonal operator to a polynomial");
  inputs(apply_cmd, 2, "operator and polynomial files");

  auto* exp_cmd = app.add_subcommand("exp-gen", "Exponential of a diagonal generator");
  inputs(exp_cmd, 1, "operator file");
  exp_cmd->add_flag("--inverse", opt.inverse, "logarithm instead");
  degree(exp_cmd, "window (defaults to the operator's)", false);

  auto* levy_cmd = app.add_subcommand("levy-moments", "Closed-form eigenvalues of a Levy triplet");
  inputs(levy_cmd, 1, "triplet file");
  degree(levy_cmd, "truncation degree", true);

  auto* consistency_cmd = app.add_subcommand("levy-consistency", "Compare coefficient and closed-form paths");
  inputs(consistency_cmd, 1, "triplet file");
  degree(consistency_cmd, "truncation degree", true);
  consistency_cmd->add_option("--tol", opt.tolerance, "relative tolerance");

  auto* scan_cmd = app.add_subcommand("divisibility-scan", "Hankel checks of t^c over an exponent grid");
  inputs(scan_cmd, 1, "sequence or triplet file");
  scan_cmd->add_option("--grid", opt.grid, "comma-separated exponents")->delimiter(',');
  degree(scan_cmd, "Hankel level d", true);
  scan_cmd->add_option("--cone", opt.cone, "fullspace or orthant")->check(CLI::IsMember({"fullspace", "orthant"}));

  auto* schur_cmd = app.add_subcommand("schur-test", "Hadamard products of random exact Gram matrices");
  schur_cmd->add_option("--trials", opt.trials, "number of pairs");
  schur_cmd->add_option("--seed", opt.seed, "random seed");
  schur_cmd->add_option("--max-order", opt.max_order, "largest matrix order");

  auto* dual_cmd = app.add_subcommand("dual-apply", "Adjoint action of a differential operator on a sequence");
  inputs(dual_cmd, 2, "operator and sequence files");
  degree(dual_cmd, "output degree", true);

  auto* kmoment_cmd = app.add_subcommand("kmoment-check", "Sampled K-moment preservation check");
  inputs(kmoment_cmd, 1, "operator file");
  kmoment_cmd->add_option("--samples", opt.samples, "file with sample points")->required();
  degree(kmoment_cmd, "Hankel level d", true);
  kmoment_cmd->add_option("--cone", opt.cone, "fullspace or orthant")->check(CLI::IsMember({"fullspace", "orthant"}));

  std::vector<const char*> argv{"momentforge"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    Context ctx{opt, in, out, psd_options_from_env()};
    if (*moments_cmd) return cmd_moments(ctx);
    if (*convolve_cmd) return cmd_convolve(ctx);
    if (*hadamard_cmd) return cmd_hadamard(ctx);
    if (*power_cmd) return cmd_power(ctx);
    if (*hankel_cmd) return cmd_hankel_check(ctx);
    if (*convert_cmd) return cmd_convert_rep(ctx);
    if (*apply_cmd) return cmd_apply_op(ctx);
    if (*exp_cmd) return cmd_exp_gen(ctx);
    if (*levy_cmd) return cmd_levy_moments(ctx);
    if (*consistency_cmd) return cmd_levy_consistency(ctx);
    if (*scan_cmd) return cmd_divisibility_scan(ctx);
    if (*schur_cmd) return cmd_schur_test(ctx);
    if (*dual_cmd) return cmd_dual_apply(ctx);
    if (*kmoment_cmd) return cmd_kmoment_check(ctx);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  err << "error: no command\n";
  return kExitInputError;
}

}  // namespace momentforge::cli
