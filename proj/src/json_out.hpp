#pragma once

#include <json.hpp>

#include <string>

namespace condcap::detail {

// 17 significant digits, so every double round-trips exactly.
std::string format_double(double x);

// Serializes with format_double for floats; non-finite values become the
// strings "inf", "-inf" and "nan" because JSON has no literal for them.
std::string dump_json(const nlohmann::ordered_json& j, int indent = 2);

}  // namespace condcap::detail
