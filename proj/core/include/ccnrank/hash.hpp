#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ccnrank {

// 64-bit FNV-1a; stable across platforms, used for content fingerprints.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;
std::uint64_t hash_file(const std::filesystem::path& path);
std::string to_hex(std::uint64_t value);
std::uint64_t from_hex(std::string_view text);

}  // namespace ccnrank
