#pragma once

#include <json.hpp>

#include "henon/henon_map.hpp"

namespace henon {

// Map specification schema:
//   {"factors": [{"p": [c0, c1, ..., 1], "a": [re, im]}, ...]}
// Each coefficient is either a real number or a [re, im] pair. The leading
// coefficient must be exactly 1 and a must be nonzero. Throws std::invalid_argument.
HenonMap parse_map(const nlohmann::json& spec);
nlohmann::json to_json(const HenonMap& f);

Complex parse_complex(const nlohmann::json& v);
nlohmann::json complex_json(Complex c);

} // namespace henon
