#include "xrai/io/archive.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include "xrai/errors.hpp"
#include "xrai/rng.hpp"

namespace xrai::io {

using json = nlohmann::json;
using families::BooleanFunction;
using families::Polynomial;
using pipeline::LambdaRecord;

namespace {

constexpr const char* kLambdaSchema = "xrai.lambda_records";
constexpr const char* kDatasetSchema = "xrai.inet_dataset";
constexpr const char* kMlpSchema = "xrai.mlp";

std::string crc_hex(const std::string& payload) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(payload)));
  return buf;
}

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double to_double(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw FormatError("expected a number");
}

template <class Range>
json numbers(const Range& values) {
  json arr = json::array();
  for (double v : values) arr.push_back(number(v));
  return arr;
}

std::vector<double> to_doubles(const json& j) {
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(to_double(v));
  return out;
}

json function_to_json(const families::TargetFunction& f) {
  if (const auto* b = std::get_if<BooleanFunction>(&f)) {
    std::string bits;
    for (auto m : b->minterms()) bits += m ? '1' : '0';
    return {{"family", "boolean"}, {"n", b->n()}, {"minterms", bits}};
  }
  const auto& p = std::get<Polynomial>(f);
  return {{"family", "polynomial"}, {"n", p.n()}, {"d", p.d()}, {"coeffs", numbers(p.coeffs())}};
}

families::TargetFunction function_from_json(const json& j) {
  const auto family = families::family_from_string(j.at("family").get<std::string>());
  const int n = j.at("n").get<int>();
  if (family == families::Family::boolean) {
    const auto bits = j.at("minterms").get<std::string>();
    std::vector<std::uint8_t> m;
    for (char c : bits) {
      if (c != '0' && c != '1') throw FormatError("minterm string must be binary");
      m.push_back(c == '1');
    }
    return BooleanFunction(n, std::move(m));
  }
  return Polynomial(n, j.at("d").get<int>(), to_doubles(j.at("coeffs")));
}

class Writer {
 public:
  Writer(const std::filesystem::path& path, const char* schema, const std::string& digest,
         std::size_t count, json extra = json::object())
      : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    json header = std::move(extra);
    header["schema"] = schema;
    header["version"] = kArchiveVersion;
    header["config_digest"] = digest;
    header["count"] = count;
    out_ << header.dump() << '\n';
  }

  void record(const json& data) {
    const std::string payload = data.dump();
    out_ << R"({"crc":")" << crc_hex(payload) << R"(","data":)" << payload << "}\n";
  }

  void close() {
    out_.close();
    if (!out_) throw Error("failed to finish writing archive");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  Reader(const std::filesystem::path& path, const char* schema, const ReadOptions& options)
      : in_(path), path_(path) {
    if (!in_) throw Error("cannot read " + path.string());
    std::string line;
    if (!std::getline(in_, line)) throw FormatError("archive is empty", 1);
    line_ = 1;
    try {
      header_ = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(std::string("malformed header: ") + e.what(), 1);
    }
    if (!header_.contains("schema") || header_["schema"] != schema) {
      throw FormatError(path.string() + " is not a " + schema + " archive", 1);
    }
    if (!header_.contains("version") || header_["version"] != kArchiveVersion) {
      throw FormatError("unsupported archive schema version " +
                            (header_.contains("version") ? header_["version"].dump() : "?"),
                        1);
    }
    const std::string digest = header_.value("config_digest", "");
    if (!options.expected_digest.empty() && digest != options.expected_digest &&
        !options.allow_digest_mismatch) {
      throw DigestMismatchError(path.string() + " was written under config digest " + digest +
                                ", expected " + options.expected_digest +
                                " (pass the digest override to load anyway)");
    }
    count_ = header_.at("count").get<std::size_t>();
  }

  const json& header() const { return header_; }
  std::size_t count() const { return count_; }
  std::size_t line() const { return line_; }

  /// Next record's data object, verified against its checksum.
  json next() {
    std::string line;
    if (!std::getline(in_, line)) {
      throw FormatError("archive truncated: expected " + std::to_string(count_) +
                            " records, found " + std::to_string(line_ - 1),
                        line_ + 1);
    }
    ++line_;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(std::string("corrupt record: ") + e.what(), line_);
    }
    if (!j.is_object() || !j.contains("crc") || !j.contains("data")) {
      throw FormatError("record lacks crc or data", line_);
    }
    if (crc_hex(j["data"].dump()) != j["crc"].get<std::string>()) {
      throw FormatError("checksum mismatch", line_);
    }
    return std::move(j["data"]);
  }

  void finish() {
    std::string extra;
    while (std::getline(in_, extra)) {
      ++line_;
      if (!extra.empty()) throw FormatError("unexpected data after the last record", line_);
    }
  }

  // Wraps field-access errors with the current line number.
  template <class F>
  auto parse(F&& f) {
    try {
      return f();
    } catch (const FormatError& e) {
      if (e.line() != 0) throw;
      throw FormatError(e.what(), line_);
    } catch (const json::exception& e) {
      throw FormatError(std::string("bad field: ") + e.what(), line_);
    } catch (const EncodingError& e) {
      throw FormatError(e.what(), line_);
    }
  }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
  json header_;
  std::size_t count_ = 0;
  std::size_t line_ = 0;
};

}  // namespace

ArchiveHeader read_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("archive is empty", 1);
  try {
    const json h = json::parse(line);
    return {h.at("schema").get<std::string>(), h.at("version").get<int>(),
            h.value("config_digest", ""), h.at("count").get<std::size_t>()};
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed header: ") + e.what(), 1);
  }
}

void save_lambda_records(const std::filesystem::path& path, std::span<const LambdaRecord> records,
                         const std::string& config_digest) {
  Writer w(path, kLambdaSchema, config_digest, records.size());
  for (const auto& r : records) {
    json checkpoints = json::object();
    for (const auto& [epoch, mu] : r.checkpoints) checkpoints[std::to_string(epoch)] = numbers(mu);
    w.record({{"index", r.index},
              {"function", function_to_json(r.function)},
              {"mu", numbers(r.mu)},
              {"checkpoints", std::move(checkpoints)},
              {"final_loss", number(r.final_loss)},
              {"task_seed", r.task_seed},
              {"diverged", r.diverged}});
  }
  w.close();
}

std::vector<LambdaRecord> load_lambda_records(const std::filesystem::path& path,
                                              const ReadOptions& options) {
  Reader reader(path, kLambdaSchema, options);
  std::vector<LambdaRecord> out;
  out.reserve(reader.count());
  for (std::size_t i = 0; i < reader.count(); ++i) {
    const json data = reader.next();
    out.push_back(reader.parse([&] {
      LambdaRecord r;
      r.index = data.at("index").get<std::size_t>();
      r.function = function_from_json(data.at("function"));
      r.mu = to_doubles(data.at("mu"));
      for (const auto& [epoch, mu] : data.at("checkpoints").items()) {
        r.checkpoints[std::stoi(epoch)] = to_doubles(mu);
      }
      r.final_loss = to_double(data.at("final_loss"));
      r.task_seed = data.at("task_seed").get<std::uint64_t>();
      r.diverged = data.at("diverged").get<bool>();
      return r;
    }));
  }
  reader.finish();
  return out;
}

void save_inet_dataset(const std::filesystem::path& path, const pipeline::InetDataset& ds,
                       const std::string& config_digest) {
  Writer w(path, kDatasetSchema, config_digest, ds.rows(),
           {{"input_dim", ds.inputs.cols()}, {"target_dim", ds.targets.cols()}});
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const auto in = ds.inputs.row(row);
    const auto tg = ds.targets.row(row);
    w.record({{"record", ds.record_index[i]},
              {"split", pipeline::to_string(ds.split[i])},
              {"mu", numbers(std::span<const double>(in.data(), static_cast<std::size_t>(in.size())))},
              {"target", numbers(std::span<const double>(tg.data(), static_cast<std::size_t>(tg.size())))}});
  }
  w.close();
}

pipeline::InetDataset load_inet_dataset(const std::filesystem::path& path,
                                        const ReadOptions& options) {
  Reader reader(path, kDatasetSchema, options);
  const auto in_dim = reader.header().at("input_dim").get<Eigen::Index>();
  const auto out_dim = reader.header().at("target_dim").get<Eigen::Index>();
  pipeline::InetDataset ds;
  ds.inputs.resize(static_cast<Eigen::Index>(reader.count()), in_dim);
  ds.targets.resize(static_cast<Eigen::Index>(reader.count()), out_dim);
  for (std::size_t i = 0; i < reader.count(); ++i) {
    const json data = reader.next();
    reader.parse([&] {
      const auto mu = to_doubles(data.at("mu"));
      const auto target = to_doubles(data.at("target"));
      if (static_cast<Eigen::Index>(mu.size()) != in_dim ||
          static_cast<Eigen::Index>(target.size()) != out_dim) {
        throw FormatError("row width does not match the header");
      }
      const auto row = static_cast<Eigen::Index>(i);
      ds.inputs.row(row) = Eigen::Map<const Eigen::RowVectorXd>(mu.data(), in_dim);
      ds.targets.row(row) = Eigen::Map<const Eigen::RowVectorXd>(target.data(), out_dim);
      ds.record_index.push_back(data.at("record").get<std::size_t>());
      ds.split.push_back(pipeline::split_from_string(data.at("split").get<std::string>()));
      return 0;
    });
  }
  reader.finish();
  return ds;
}

void save_mlp(const std::filesystem::path& path, const nn::Mlp& net,
              const std::string& config_digest) {
  net.validate();
  Writer w(path, kMlpSchema, config_digest, net.layer_count(), {{"layer_dims", net.layer_dims}});
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const auto& W = net.weights[l];
    const auto& b = net.biases[l];
    w.record({{"layer", l},
              {"activation", nn::to_string(net.activations[l])},
              {"weights", numbers(std::span<const double>(W.data(), static_cast<std::size_t>(W.size())))},
              {"bias", numbers(std::span<const double>(b.data(), static_cast<std::size_t>(b.size())))}});
  }
  w.close();
}

nn::Mlp load_mlp(const std::filesystem::path& path, const ReadOptions& options) {
  Reader reader(path, kMlpSchema, options);
  const auto dims = reader.parse([&] { return reader.header().at("layer_dims").get<std::vector<int>>(); });
  if (dims.size() != reader.count() + 1) throw FormatError("layer count does not match layer_dims", 1);
  std::vector<json> layers;
  std::vector<nn::Activation> acts;
  for (std::size_t l = 0; l < reader.count(); ++l) {
    layers.push_back(reader.next());
    acts.push_back(reader.parse([&] {
      return nn::activation_from_string(layers.back().at("activation").get<std::string>());
    }));
  }
  reader.finish();
  nn::Mlp net = nn::Mlp::zeros(dims, acts);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto w = to_doubles(layers[l].at("weights"));
    const auto b = to_doubles(layers[l].at("bias"));
    if (w.size() != static_cast<std::size_t>(net.weights[l].size()) ||
        b.size() != static_cast<std::size_t>(net.biases[l].size())) {
      throw FormatError("layer " + std::to_string(l) + " has the wrong parameter count", l + 2);
    }
    std::copy(w.begin(), w.end(), net.weights[l].data());
    std::copy(b.begin(), b.end(), net.biases[l].data());
  }
  return net;
}

}  // namespace xrai::io
