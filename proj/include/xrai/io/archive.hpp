#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "xrai/nn/mlp.hpp"
#include "xrai/pipeline/inet.hpp"
#include "xrai/pipeline/lambda.hpp"

namespace xrai::io {

/// Archives are newline-delimited JSON. The first line is a header
///   {"schema":"xrai.<kind>","version":1,"config_digest":"...","count":N}
/// and every following line is {"crc":"<fnv1a hex>","data":{...}} where the
/// checksum covers the compact dump of "data". Doubles use shortest
/// round-trip text; non-finite values are written as "nan", "inf", "-inf".
inline constexpr int kArchiveVersion = 1;

struct ReadOptions {
  // Empty means "do not check".
  std::string expected_digest;
  bool allow_digest_mismatch = false;
};

struct ArchiveHeader {
  std::string schema;
  int version = 0;
  std::string config_digest;
  std::size_t count = 0;
};

ArchiveHeader read_header(const std::filesystem::path& path);

void save_lambda_records(const std::filesystem::path& path,
                         std::span<const pipeline::LambdaRecord> records,
                         const std::string& config_digest);
std::vector<pipeline::LambdaRecord> load_lambda_records(const std::filesystem::path& path,
                                                        const ReadOptions& options = {});

void save_inet_dataset(const std::filesystem::path& path, const pipeline::InetDataset& ds,
                       const std::string& config_digest);
pipeline::InetDataset load_inet_dataset(const std::filesystem::path& path,
                                        const ReadOptions& options = {});

void save_mlp(const std::filesystem::path& path, const nn::Mlp& net,
              const std::string& config_digest);
nn::Mlp load_mlp(const std::filesystem::path& path, const ReadOptions& options = {});

}  // namespace xrai::io
