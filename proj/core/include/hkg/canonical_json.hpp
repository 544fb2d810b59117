#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace hkg {

// Compact JSON with object keys in byte order and floating-point numbers
// printed with 6 significant digits. Non-finite numbers are rejected.
std::string canonical_dump(const nlohmann::json& value);

// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);

}  // namespace hkg
