#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace edrisk {

// All spec-level failures surface as Error with a message that names the
// offending column / row / stage / file.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(std::string_view s, char delim);
std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Strict parsers: the whole token must be consumed.
std::optional<long long> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

// Shortest round-trip decimal form; used for every double written to an
// artifact so that save/load is bit-exact and reruns are byte-identical.
std::string fmt_double(double v);

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

std::string read_file(const std::string& path);
// Whole-file atomic: write to a temp sibling, then rename.
void atomic_write_file(const std::string& path, std::string_view content);

}  // namespace edrisk
