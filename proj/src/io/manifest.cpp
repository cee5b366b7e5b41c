#include "xrai/io/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "xrai/errors.hpp"
#include "xrai/io/config_io.hpp"

namespace xrai::io {

using json = nlohmann::json;

pipeline::ExperimentConfig RunManifest::config() const { return parse_config(config_text); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void save_manifest(const std::filesystem::path& path, const RunManifest& m) {
  const json j = {{"config_digest", m.config_digest}, {"tool_version", m.tool_version},
                  {"started_at", m.started_at},       {"finished_at", m.finished_at},
                  {"master_seed", m.master_seed},     {"artifacts", m.artifacts},
                  {"diverged", m.diverged},           {"config", m.config_text}};
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  try {
    const json j = json::parse(in);
    RunManifest m;
    m.config_digest = j.at("config_digest").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
    m.diverged = j.at("diverged").get<std::size_t>();
    m.config_text = j.at("config").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace xrai::io
