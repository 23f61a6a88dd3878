#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

namespace eksaii {

using Json = nlohmann::json;

// Sorted keys, no whitespace, floats as `%.12g`. Identical values always
// produce identical bytes.
std::string canonical_dump(const Json& value);

// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

}  // namespace eksaii
