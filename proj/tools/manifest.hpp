// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace lens::tool {

// FNV-1a 64-bit over the file's bytes, as a 16-digit hex string.
std::string fnv1a64_file(const std::string& path);

std::string utc_now_iso8601();

// Writes the run manifest: tool version, command, seed, wall-clock
// timestamps, input file hashes and the fully resolved configuration.
// Reruns differ only in the timestamp fields, so artifact comparisons
// exclude the manifest itself.
void write_manifest(const std::string& manifest_path, const std::string& command,
                    std::uint64_t seed,
                    const std::vector<std::string>& input_paths,
                    const nlohmann::ordered_json& config,
                    const std::string& started_utc, const std::string& finished_utc);

}  // namespace lens::tool
