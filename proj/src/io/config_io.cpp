#include "xrai/io/config_io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <system_error>

#include "xrai/errors.hpp"
#include "xrai/rng.hpp"

namespace xrai::io {

using pipeline::ExperimentConfig;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError("invalid config: '" + std::string(key) + "' expects a number, got '" +
                      std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(trim(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

families::Range parse_range(std::string_view key, std::string_view text) {
  const auto parts = split_list(text);
  if (parts.size() != 2) {
    throw ConfigError("invalid config: '" + std::string(key) + "' expects 'lo, hi'");
  }
  return {parse_number<double>(key, parts[0]), parse_number<double>(key, parts[1])};
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("invalid config: '" + std::string(key) + "' expects true or false");
}

std::vector<int> parse_epochs(std::string_view key, std::string_view text, int lambda_epochs) {
  if (text.empty() || text == "none") return {};
  if (text.starts_with("every:")) {
    return pipeline::checkpoint_cadence(parse_number<int>(key, trim(text.substr(6))), lambda_epochs);
  }
  std::vector<int> out;
  for (auto part : split_list(text)) out.push_back(parse_number<int>(key, part));
  return out;
}

std::string join_epochs(const std::vector<int>& epochs) {
  std::string out;
  for (int e : epochs) out += (out.empty() ? "" : ",") + std::to_string(e);
  return out.empty() ? "none" : out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Key {
  const char* name;
  Setter set;
  Getter get;
};

template <class T>
Key numeric(const char* name, T ExperimentConfig::*field) {
  return {name,
          [name, field](ExperimentConfig& c, std::string_view v) { c.*field = parse_number<T>(name, v); },
          [field](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.*field);
            } else {
              return std::to_string(c.*field);
            }
          }};
}

Key optimizer_field(const char* name, double nn::OptimizerConfig::*field) {
  return {name,
          [name, field](ExperimentConfig& c, std::string_view v) {
            c.inet_optimizer.*field = parse_number<double>(name, v);
          },
          [field](const ExperimentConfig& c) { return format_double(c.inet_optimizer.*field); }};
}

// Fixed order; also the order of to_text. family, n, d and inet_optimizer are
// applied before everything else.
const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"family", [](ExperimentConfig&, std::string_view) {},
       [](const ExperimentConfig& c) { return std::string(families::to_string(c.family)); }},
      {"n", [](ExperimentConfig&, std::string_view) {},
       [](const ExperimentConfig& c) { return std::to_string(c.n); }},
      {"d", [](ExperimentConfig&, std::string_view) {},
       [](const ExperimentConfig& c) { return std::to_string(c.d); }},
      {"n_range", [](ExperimentConfig& c, std::string_view v) { c.n_range = parse_range("n_range", v); },
       [](const ExperimentConfig& c) {
         return format_double(c.n_range.lo) + "," + format_double(c.n_range.hi);
       }},
      {"coeff_range",
       [](ExperimentConfig& c, std::string_view v) { c.coeff_range = parse_range("coeff_range", v); },
       [](const ExperimentConfig& c) {
         return format_double(c.coeff_range.lo) + "," + format_double(c.coeff_range.hi);
       }},
      numeric("lambda_count", &ExperimentConfig::lambda_count),
      numeric("lambda_train_size", &ExperimentConfig::lambda_train_size),
      numeric("lambda_epochs", &ExperimentConfig::lambda_epochs),
      numeric("lambda_batch_size", &ExperimentConfig::lambda_batch_size),
      numeric("lambda_hidden", &ExperimentConfig::lambda_hidden),
      numeric("lambda_learning_rate", &ExperimentConfig::lambda_learning_rate),
      {"lambda_shared_init",
       [](ExperimentConfig& c, std::string_view v) {
         c.lambda_shared_init = parse_bool("lambda_shared_init", v);
       },
       [](const ExperimentConfig& c) { return std::string(c.lambda_shared_init ? "true" : "false"); }},
      numeric("inet_hidden", &ExperimentConfig::inet_hidden),
      numeric("inet_epochs", &ExperimentConfig::inet_epochs),
      numeric("inet_batch_size", &ExperimentConfig::inet_batch_size),
      {"inet_optimizer", [](ExperimentConfig&, std::string_view) {},
       [](const ExperimentConfig& c) { return std::string(nn::to_string(c.inet_optimizer.kind)); }},
      optimizer_field("inet_learning_rate", &nn::OptimizerConfig::learning_rate),
      optimizer_field("inet_beta1", &nn::OptimizerConfig::beta1),
      optimizer_field("inet_beta2", &nn::OptimizerConfig::beta2),
      optimizer_field("inet_epsilon", &nn::OptimizerConfig::epsilon),
      optimizer_field("inet_rho", &nn::OptimizerConfig::rho),
      {"inet_standardize",
       [](ExperimentConfig& c, std::string_view v) { c.inet_standardize = parse_bool("inet_standardize", v); },
       [](const ExperimentConfig& c) { return std::string(c.inet_standardize ? "true" : "false"); }},
      {"inet_boolean_loss",
       [](ExperimentConfig& c, std::string_view v) { c.inet_boolean_loss = pipeline::boolean_loss_from_string(v); },
       [](const ExperimentConfig& c) { return std::string(pipeline::to_string(c.inet_boolean_loss)); }},
      numeric("train_fraction", &ExperimentConfig::train_fraction),
      numeric("val_fraction", &ExperimentConfig::val_fraction),
      numeric("test_fraction", &ExperimentConfig::test_fraction),
      numeric("loss_points", &ExperimentConfig::loss_points),
      numeric("eval_points", &ExperimentConfig::eval_points),
      {"checkpoint_epochs", [](ExperimentConfig&, std::string_view) {},
       [](const ExperimentConfig& c) { return join_epochs(c.checkpoint_epochs); }},
      numeric("master_seed", &ExperimentConfig::master_seed),
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, std::string, std::less<>> values;
  std::set<std::string, std::less<>> known;
  for (const auto& k : keys()) known.insert(k.name);

  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("invalid config: line " + std::to_string(line_no) + " is not 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!known.contains(key)) throw ConfigError("invalid config: unknown key '" + key + "'");
    if (!values.emplace(key, value).second) {
      throw ConfigError("invalid config: duplicate key '" + key + "'");
    }
  }

  auto lookup = [&](std::string_view key) -> const std::string* {
    const auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  };
  const auto family = lookup("family") ? families::family_from_string(*lookup("family"))
                                       : families::Family::boolean;
  const int n = lookup("n") ? parse_number<int>("n", *lookup("n")) : 4;
  const int d = lookup("d") ? parse_number<int>("d", *lookup("d"))
                            : (family == families::Family::boolean ? 0 : 3);
  ExperimentConfig cfg = ExperimentConfig::defaults(family, n, d);
  cfg.d = d;
  if (const auto* v = lookup("inet_optimizer")) {
    cfg.inet_optimizer = nn::OptimizerConfig::defaults(nn::optimizer_from_string(*v));
  }
  for (const auto& k : keys()) {
    if (const auto* v = lookup(k.name)) k.set(cfg, *v);
  }
  if (const auto* v = lookup("checkpoint_epochs")) {
    cfg.checkpoint_epochs = parse_epochs("checkpoint_epochs", *v, cfg.lambda_epochs);
  } else {
    cfg.checkpoint_epochs = pipeline::checkpoint_cadence(10, cfg.lambda_epochs);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& k : keys()) out += std::string(k.name) + " = " + k.get(cfg) + "\n";
  return out;
}

std::string config_digest(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_text(cfg))));
  return buf;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return to_text(a) == to_text(b);
}

}  // namespace xrai::io
