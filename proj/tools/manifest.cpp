// SPDX-License-Identifier: Apache-2.0
#include "manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "lens/errors.hpp"
#include "lens/presets.hpp"

namespace lens::tool {

std::string fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path + " for hashing");
  std::uint64_t h = 1469598103934665603ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

std::string utc_now_iso8601() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::string& manifest_path, const std::string& command,
                    std::uint64_t seed,
                    const std::vector<std::string>& input_paths,
                    const nlohmann::ordered_json& config,
                    const std::string& started_utc,
                    const std::string& finished_utc) {
  nlohmann::ordered_json m;
  m["tool_version"] = presets::kToolVersion;
  m["command"] = command;
  m["seed"] = seed;
  m["started_utc"] = started_utc;
  m["finished_utc"] = finished_utc;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  for (const std::string& p : input_paths) {
    nlohmann::ordered_json entry;
    entry["path"] = p;
    entry["fnv1a64"] = fnv1a64_file(p);
    inputs.push_back(entry);
  }
  m["inputs"] = inputs;
  m["config"] = config;

  std::ofstream out(manifest_path);
  if (!out) throw DomainError("cannot write " + manifest_path);
  out << m.dump(2) << '\n';
  if (!out.flush()) throw DomainError("failed writing " + manifest_path);
}

}  // namespace lens::tool
