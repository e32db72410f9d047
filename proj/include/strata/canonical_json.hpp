#pragma once

#include <string>

#include <json.hpp>

namespace strata {

// Compact JSON with keys in sorted order and every floating-point number
// written with 17 significant digits; non-finite numbers become null. Equal
// values always serialize to identical bytes.
std::string canonical_dump(const nlohmann::json& value);

}  // namespace strata
