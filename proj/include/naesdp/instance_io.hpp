#pragma once

// JSON persistence for lifts of K_{d,c}:
//   {version, c, d, n, permutations: [[int]], signs: [int], seed, checksum}
// Unknown fields, version mismatches and checksum mismatches are rejected
// with FormatError.

#include <cstdint>
#include <filesystem>
#include <string>

#include "naesdp/lift_model.hpp"

namespace naesdp {

inline constexpr int kInstanceFormatVersion = 1;

/// FNV-1a over (c, d, n, seed, permutations, signs).
std::uint64_t instance_checksum(const LiftSpec& spec, std::size_t c, std::size_t d);

/// Serializes a lift whose base is complete_bipartite(c, d).
std::string instance_to_json(const LiftSpec& spec);
LiftSpec instance_from_json(const std::string& text);

void save_instance(const std::filesystem::path& path, const LiftSpec& spec);
LiftSpec load_instance(const std::filesystem::path& path);

}  // namespace naesdp
