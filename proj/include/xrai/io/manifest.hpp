#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "xrai/pipeline/config.hpp"

namespace xrai::io {

inline constexpr const char* kToolVersion = "0.1.0";

/// Written next to every stage's artifacts; carries the full config so the
/// stage can be re-run from the manifest alone.
struct RunManifest {
  std::string config_digest;
  std::string tool_version = kToolVersion;
  std::string started_at;
  std::string finished_at;
  std::uint64_t master_seed = 0;
  std::map<std::string, std::string> artifacts;  // stage -> path
  std::size_t diverged = 0;
  std::string config_text;

  pipeline::ExperimentConfig config() const;
};

std::string utc_timestamp();

void save_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest load_manifest(const std::filesystem::path& path);

}  // namespace xrai::io
