#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "momentforge/cli.hpp"
#include "momentforge/json_io.hpp"

using namespace momentforge;
using json_io::Json;
using Q = Rational;

namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
  Json json() const { return json_io::parse(out); }
};

Result run(std::vector<std::string> args, const std::string& stdin_text = "") {
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  const int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

class Workdir {
public:
  Workdir() : dir_(fs::temp_directory_path() / ("momentforge_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
  }
  ~Workdir() { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string write_json(const std::string& name, const Json& j) const { return write(name, j.dump()); }

private:
  fs::path dir_;
};

const char* kHalf = R"({"n":1,"mode":"rational","atoms":[{"point":["1/2"],"weight":"1"}]})";
const char* kDeltaOneTriplet = R"({"n":1,"c0":"0","b":["0"],"sigma":[["0"]],"nu":{"n":1,"atoms":[{"point":["1"],"weight":"1"}]}})";

}  // namespace

TEST_CASE("moments of the half point mass") {
  Workdir w;
  const auto r = run({"moments", w.write("half.json", kHalf), "--degree", "3"});
  REQUIRE(r.code == 0);
  const auto s = json_io::read_sequence<Q>(r.json());
  CHECK(s.degree() == 3);
  for (unsigned k = 0; k <= 3; ++k) CHECK(s[MultiIndex{k}] == Q(1, 1u << k));
  CHECK(r.json()["values"][1]["value"] == "1/2");
}

TEST_CASE("hadamard with the all-ones sequence echoes the input") {
  Workdir w;
  const auto s = run({"moments", w.write("half.json", kHalf), "--degree", "5"});
  const auto ones = json_io::write_sequence(Sequence<Q>::constant(1, 5, Q(1)));
  const auto r = run({"hadamard", w.write("s.json", s.out), w.write_json("ones.json", ones)});
  REQUIRE(r.code == 0);
  CHECK(r.json() == s.json());
}

TEST_CASE("levy-consistency on the unit jump triplet") {
  Workdir w;
  const auto r = run({"levy-consistency", w.write("t.json", kDeltaOneTriplet), "--degree", "5"});
  CHECK(r.code == 0);
  CHECK(r.json()["passed"] == true);
  CHECK(json_io::read_scalar<double>(r.json()["max_relative_deviation"]) < 1e-10);

  const auto m = run({"levy-moments", w.write("t.json", kDeltaOneTriplet), "--degree", "4"});
  REQUIRE(m.code == 0);
  const auto logs = json_io::read_sequence<Q>(m.json()["log_values"]);
  for (unsigned k = 0; k <= 4; ++k) CHECK(logs[MultiIndex{k}] == Q((1 << k) - 1));
}

TEST_CASE("exit codes follow the verdicts") {
  Workdir w;
  Sequence<Q> bad(1, 2);
  bad[MultiIndex{0}] = 1;
  bad[MultiIndex{2}] = -1;
  const auto path = w.write_json("bad.json", json_io::write_sequence(bad));
  const auto r = run({"hankel-check", path, "--degree", "1"});
  CHECK(r.code == 1);
  CHECK(r.json()["status"] == "NOT_PSD");
  CHECK(r.json()["checks"][0].contains("witness"));
  CHECK(run({"hankel-check", path, "--degree", "1"}).out == r.out);

  const auto good = run({"moments", w.write("half.json", kHalf), "--degree", "10"});
  const auto h = run({"hankel-check", w.write("s.json", good.out), "--degree", "4"});
  CHECK(h.code == 0);
  CHECK(h.json()["checks"][0]["rank"] == 1);
  CHECK(run({"hankel-check", w.write("s.json", good.out), "--degree", "4", "--cone", "orthant"}).code == 0);

  Sequence<Q> counter = Sequence<Q>::constant(1, 6, Q(1));
  counter[MultiIndex{1}] = 3;
  counter[MultiIndex{2}] = 2;
  const auto scan = run({"divisibility-scan", w.write_json("c.json", json_io::write_sequence(counter)), "--degree", "3",
                         "--grid", "0.1,0.25,0.5,1,2"});
  CHECK(scan.code == 1);
  CHECK(scan.json()["rows"].size() == 5);
  CHECK(scan.json()["rows"][3]["status"] == "NOT_PSD");

  const auto lscan = run({"divisibility-scan", w.write("t.json", kDeltaOneTriplet), "--degree", "3"});
  CHECK(lscan.code == 0);
  CHECK(lscan.json()["status"] == "PSD");
}

TEST_CASE("input errors exit with 2 and a diagnostic") {
  Workdir w;
  const auto check_input_error = [](const Result& r) {
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
  };
  check_input_error(run({"moments", w.write("bad.json", "{\"n\": 1,"), "--degree", "2"}));
  check_input_error(run({"moments", (fs::temp_directory_path() / "missing_momentforge.json").string(), "--degree", "2"}));
  check_input_error(run({"no-such-command"}));
  check_input_error(run({"moments", w.write("half.json", kHalf)}));
  const auto s1 = json_io::write_sequence(Sequence<Q>::constant(1, 2, Q(1)));
  const auto s2 = json_io::write_sequence(Sequence<Q>::constant(2, 2, Q(1)));
  check_input_error(run({"hadamard", w.write_json("a.json", s1), w.write_json("b.json", s2)}));
  check_input_error(run({"hankel-check", w.write_json("a.json", s1), "--degree", "2"}));
  const auto f = json_io::write_sequence(Sequence<double>::constant(1, 2, 1.0));
  check_input_error(run({"hadamard", w.write_json("a.json", s1), w.write_json("f.json", f)}));
  check_input_error(run({"levy-moments", w.write("t.json", R"({"n":1,"c0":"0","b":["0"],"sigma":[["-1"]]})"),
                         "--degree", "2"}));
  check_input_error(run({"power", w.write_json("a.json", s1), "--c", "1/2"}));
  check_input_error(run({"moments", w.write("m.json", R"({"n":1,"atoms":[{"point":["x"],"weight":"1"}]})"), "--degree",
                         "1"}));
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("emitted JSON is read back unchanged") {
  Workdir w;
  const auto half = w.write("half.json", kHalf);
  const auto reemit = [](const Json& j, auto read, auto write) { CHECK(write(read(j)).dump() == j.dump()); };

  const auto conv = run({"convolve", half, half, "--mode", "add"});
  reemit(conv.json(), json_io::read_measure<Q>, json_io::write_measure<Q>);
  CHECK(json_io::read_measure<Q>(conv.json()) == AtomicMeasure<Q>::dirac({Q(1)}));
  reemit(run({"convolve", half, half, "--mode", "mult"}).json(), json_io::read_measure<Q>,
         json_io::write_measure<Q>);

  const auto floats = R"({"n":1,"mode":"float","atoms":[{"point":[0.1],"weight":0.3},{"point":[1.7],"weight":2.2}]})";
  const auto fm = run({"moments", w.write("f.json", floats), "--degree", "6"});
  reemit(fm.json(), json_io::read_sequence<double>, json_io::write_sequence<double>);
  const auto powered = run({"power", w.write("fs.json", fm.out), "--c", "0.37"});
  REQUIRE(powered.code == 0);
  reemit(powered.json(), json_io::read_sequence<double>, json_io::write_sequence<double>);

  const auto lm = run({"levy-moments", w.write("t.json", kDeltaOneTriplet), "--degree", "3"});
  reemit(lm.json()["log_values"], json_io::read_sequence<Q>, json_io::write_sequence<Q>);
  reemit(lm.json()["values"], json_io::read_sequence<double>, json_io::write_sequence<double>);

  // operators: t -> c -> t through the CLI
  Sequence<Q> t(2, 3);
  for (std::size_t i = 0; i < t.size(); ++i) t.at_position(i) = Q(static_cast<long>(i * i) - 3, 7);
  const auto op_path = w.write_json("op.json", json_io::write_operator(DiagonalOperator<Q>::from_eigenvalues(t)));
  const auto c = run({"convert-rep", op_path, "--from", "t", "--to", "c"});
  REQUIRE(c.code == 0);
  CHECK(c.json()["rep"] == "c");
  const auto back = run({"convert-rep", w.write("c.json", c.out), "--to", "t"});
  CHECK(json_io::read_operator<Q>(back.json()).dense_coefficients() == t);
  CHECK(run({"convert-rep", op_path, "--from", "c", "--to", "t"}).code == 2);
  const auto d = run({"convert-rep", op_path, "--to", "d", "--degree", "3"});
  REQUIRE(d.code == 0);
  CHECK(d.json()["partial"] == true);
  const auto dd = run({"convert-rep", w.write("d.json", d.out), "--to", "d"});
  CHECK(dd.json()["coeffs"] == d.json()["coeffs"]);

  const auto p = json_io::write_polynomial(Polynomial<Q>::monomial(MultiIndex{1, 2}, Q(5)));
  const auto applied = run({"apply-op", op_path, w.write_json("p.json", p)});
  REQUIRE(applied.code == 0);
  CHECK(json_io::read_polynomial<Q>(applied.json()) == Polynomial<Q>::monomial(MultiIndex{1, 2}, Q(5) * t[MultiIndex{1, 2}]));

  const auto e = run({"exp-gen", op_path});
  REQUIRE(e.code == 0);
  const auto log_back = run({"exp-gen", w.write("e.json", e.out), "--inverse"});
  REQUIRE(log_back.code == 0);
  const auto recovered = json_io::read_operator<double>(log_back.json()).dense_coefficients();
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(recovered.at_position(i) == doctest::Approx(t.at_position(i).get_d()));
}

TEST_CASE("dual-apply and kmoment-check") {
  Workdir w;
  const auto square_plus_one = R"({"n":1,"terms":[{"alpha":[0],"q":[{"alpha":[2],"coeff":"1"},{"alpha":[0],"coeff":"1"}]}]})";
  const auto minus_one = R"({"n":1,"terms":[{"alpha":[0],"q":[{"alpha":[0],"coeff":"-1"}]}]})";
  const auto samples = w.write("y.json", R"({"points":[["0"],["1"],["-2"],["7/3"]]})");
  const auto ok = run({"kmoment-check", w.write("q.json", square_plus_one), "--samples", samples, "--degree", "2"});
  CHECK(ok.code == 0);
  CHECK(ok.json()["samples"].size() == 4);
  CHECK(ok.json()["note"].get<std::string>().find("evidence") != std::string::npos);
  const auto refuted = run({"kmoment-check", w.write("m.json", minus_one), "--samples", samples, "--degree", "2"});
  CHECK(refuted.code == 1);
  CHECK(refuted.json()["status"] == "NOT_PSD");

  const auto s = run({"moments", w.write("half.json", kHalf), "--degree", "6"});
  const auto r = run({"dual-apply", w.write("q.json", square_plus_one), w.write("s.json", s.out), "--degree", "4"});
  REQUIRE(r.code == 0);
  const auto out = json_io::read_sequence<Q>(r.json());
  for (unsigned k = 0; k <= 4; ++k) CHECK(out[MultiIndex{k}] == Q(1, 1u << k) * Q(5, 4));
  CHECK(run({"dual-apply", w.write("q.json", square_plus_one), w.write("s.json", s.out), "--degree", "5"}).code == 2);
}

TEST_CASE("schur-test is reproducible") {
  const auto a = run({"schur-test", "--trials", "25", "--seed", "7"});
  CHECK(a.code == 0);
  CHECK(a.json()["psd_products"] == 25);
  CHECK(run({"schur-test", "--trials", "25", "--seed", "7"}).out == a.out);
}

TEST_CASE("float tolerance from the environment") {
  Workdir w;
  Sequence<double> s(1, 2);
  s[MultiIndex{0}] = 1;
  s[MultiIndex{1}] = 1;
  s[MultiIndex{2}] = 1 - 1e-7;
  const auto path = w.write_json("s.json", json_io::write_sequence(s));
  CHECK(run({"hankel-check", path, "--degree", "1"}).code == 1);
  ::setenv("MOMENTFORGE_FLOAT_TOL", "1e-5", 1);
  const auto loose = run({"hankel-check", path, "--degree", "1"});
  CHECK(loose.code == 0);
  CHECK(loose.json()["status"] == "PSD");
  ::setenv("MOMENTFORGE_FLOAT_TOL", "-1", 1);
  CHECK(run({"hankel-check", path, "--degree", "1"}).code == 2);
  ::unsetenv("MOMENTFORGE_FLOAT_TOL");
}

TEST_CASE("table output") {
  Workdir w;
  const auto s = run({"moments", w.write("half.json", kHalf), "--degree", "4"});
  const auto t = run({"hankel-check", w.write("s.json", s.out), "--degree", "2", "--output", "table"});
  CHECK(t.code == 0);
  CHECK(t.out.find("status: PSD") != std::string::npos);
  CHECK(t.out.find("hankel") != std::string::npos);
  CHECK(run({"moments", w.write("half.json", kHalf), "--degree", "2", "--output", "xml"}).code == 2);
  const auto stdin_run = run({"moments", "-", "--degree", "1", "--output", "table"}, kHalf);
  CHECK(stdin_run.code == 0);
  CHECK(stdin_run.out.find("1/2") != std::string::npos);
}
