#include "momentforge/json_io.hpp"

namespace momentforge::json_io {

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw ParseError(std::string("expected an object with field \"") + key + "\"");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  return *it;
}

ScalarMode read_mode(const Json& j) {
  if (!j.is_object() || !j.contains("mode")) return ScalarMode::Rational;
  const auto& m = j["mode"];
  if (m == "rational") return ScalarMode::Rational;
  if (m == "float") return ScalarMode::Float;
  throw ParseError("mode must be \"rational\" or \"float\", got " + m.dump());
}

void write_mode(Json& j, ScalarMode mode) { j["mode"] = std::string(to_string(mode)); }

std::size_t read_dim(const Json& j) {
  const auto& n = field(j, "n");
  if (!n.is_number_integer() || n.get<long long>() <= 0) throw ParseError("\"n\" must be a positive integer");
  return n.get<std::size_t>();
}

MultiIndex read_multi_index(const Json& j, std::size_t n) {
  if (!j.is_array()) throw ParseError("multi-index must be an array, got " + j.dump());
  if (j.size() != n)
    throw DimensionMismatch("multi-index " + j.dump() + " does not have " + std::to_string(n) + " entries");
  std::vector<MultiIndex::value_type> e;
  for (const auto& x : j) {
    if (!x.is_number_integer() || x.get<long long>() < 0)
      throw ParseError("multi-index entries must be nonnegative integers, got " + j.dump());
    e.push_back(x.get<MultiIndex::value_type>());
  }
  return MultiIndex(std::move(e));
}

Json write_multi_index(const MultiIndex& alpha) { return alpha.exponents(); }

Json write_margin(double margin) { return write_scalar(margin); }

PsdStatus read_status(const std::string& text) {
  if (text == "PSD") return PsdStatus::PSD;
  if (text == "NOT_PSD") return PsdStatus::NotPSD;
  if (text == "INCONCLUSIVE") return PsdStatus::Inconclusive;
  throw ParseError("unknown status \"" + text + "\"");
}

}  // namespace momentforge::json_io
