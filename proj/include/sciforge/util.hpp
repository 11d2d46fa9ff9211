#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sciforge::util {

std::string trim(std::string_view s);
std::string lower(std::string_view s);

// Collapse every run of whitespace to a single space and trim the ends.
std::string collapse_ws(std::string_view s);

std::string replace_all(std::string s, std::string_view needle, std::string_view repl);

std::vector<std::string> split_lines(std::string_view text);

// FNV-1a, 64-bit. `seed` perturbs the offset basis so independent hash
// families can be derived from one function.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0);

std::string to_hex(std::uint64_t v);

std::string base64_encode(const unsigned char* data, std::size_t len);
std::vector<unsigned char> base64_decode(std::string_view text); // throws Error(InvalidArgument)

std::string read_file(const std::string& path); // throws Error(IoError)

// Write via temp file + rename so readers never observe a partial file.
void atomic_write_file(const std::string& path, std::string_view content); // throws Error(IoError)

bool file_exists(const std::string& path);

} // namespace sciforge::util
