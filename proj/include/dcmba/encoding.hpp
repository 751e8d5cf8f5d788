#pragma once

// Byte-level helpers shared by instance files and reports: FNV-1a 64-bit
// hashing and RFC 4648 base64 of little-endian float64 arrays.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dcmba {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xCBF29CE484222325ULL);
std::uint64_t fnv1a64_doubles(std::span<const double> values);
std::string hex64(std::uint64_t v);

std::string base64_encode(std::string_view bytes);
/// Throws std::invalid_argument on malformed input.
std::string base64_decode(std::string_view text);

std::string encode_f64(std::span<const double> values);
std::vector<double> decode_f64(std::string_view text);

}  // namespace dcmba
