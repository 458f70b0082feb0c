#include "momentforge/diagop.hpp"

namespace momentforge {

Representation parse_representation(std::string_view text) {
  if (text == "t") return Representation::EigT;
  if (text == "c") return Representation::CoefC;
  if (text == "d") return Representation::CoefD;
  throw ParseError("unknown representation '" + std::string(text) + "' (expected t, c or d)");
}

}  // namespace momentforge
