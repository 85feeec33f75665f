#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecoagent {

std::optional<std::string> read_file(const std::string& path);
bool write_file(const std::string& path, std::string_view content);

std::string_view trim(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);
bool starts_with_icase(std::string_view s, std::string_view prefix);

/// FNV-1a 64-bit, used for cheap request/state digests in traces.
std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

std::string base64_encode(std::string_view data);

/// Fixed-precision decimal formatting (no locale, deterministic).
std::string format_fixed(double value, int decimals);

}  // namespace ecoagent
