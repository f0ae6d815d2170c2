#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace microlocal {

inline constexpr const char* kVersion = "1.0.0";

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

/// Run record written next to the artifacts as manifest.json.
struct Manifest {
  std::string subcommand;
  std::string config_path;
  std::string config_hash;
  std::uint64_t seed = 0;
  int threads = 1;
  double wall_seconds = 0.0;
  /// (path, sha256) per artifact.
  std::vector<std::pair<std::string, std::string>> artifacts;

  void add_artifact(const std::string& path);
  void write(const std::string& path) const;
};

}  // namespace microlocal
