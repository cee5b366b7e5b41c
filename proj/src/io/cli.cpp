#include "xrai/io/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "xrai/errors.hpp"
#include "xrai/eval/experiments.hpp"
#include "xrai/eval/metrics.hpp"
#include "xrai/eval/verify.hpp"
#include "xrai/io/archive.hpp"
#include "xrai/io/config_io.hpp"
#include "xrai/io/manifest.hpp"
#include "xrai/log.hpp"
#include "xrai/pipeline/inet.hpp"

namespace xrai::io {

namespace fs = std::filesystem;
using json = nlohmann::json;
using pipeline::ExperimentConfig;

namespace {

struct CommonOptions {
  std::string config;
  std::string manifest;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out_dir;
  std::string checkpoint_epochs;
  bool allow_digest_mismatch = false;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--config", o.config, "Experiment config file (key = value)");
  sub->add_option("--manifest", o.manifest, "Take the config from a run manifest instead");
  sub->add_option("--seed", o.seed, "Override master_seed");
  sub->add_option("--workers", o.workers, "Worker threads for lambda-net training")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out-dir", o.out_dir, "Output directory (default $XRAI_OUT_DIR or ./xrai_out)");
  sub->add_option("--checkpoint-epochs", o.checkpoint_epochs,
                  "Checkpoint epochs: comma list, 'every:N' or 'none'");
  sub->add_flag("--allow-digest-mismatch", o.allow_digest_mismatch,
                "Load archives written under a different config digest");
}

ExperimentConfig resolve_config(const CommonOptions& o) {
  std::string text;
  if (!o.manifest.empty()) {
    text = load_manifest(o.manifest).config_text;
  } else if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw ConfigError("cannot read config file '" + o.config + "'");
    text.assign(std::istreambuf_iterator<char>(in), {});
  } else {
    throw ConfigError("--config (or --manifest) is required");
  }
  if (!o.checkpoint_epochs.empty()) {
    // Replace any checkpoint line from the file with the flag value.
    std::string filtered;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
      const auto key_end = line.find('=');
      const std::string key = line.substr(0, key_end);
      if (key.find("checkpoint_epochs") != std::string::npos && key.find('#') == std::string::npos) continue;
      filtered += line + "\n";
    }
    text = filtered + "checkpoint_epochs = " + o.checkpoint_epochs + "\n";
  }
  ExperimentConfig cfg = parse_config(text);
  if (o.seed) cfg.master_seed = *o.seed;
  cfg.validate();
  return cfg;
}

fs::path out_dir(const CommonOptions& o) {
  fs::path dir = o.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv("XRAI_OUT_DIR");
    dir = env && *env ? fs::path(env) : fs::path("xrai_out");
  }
  fs::create_directories(dir);
  return dir;
}

ReadOptions read_options(const ExperimentConfig& cfg, const CommonOptions& o) {
  return {config_digest(cfg), o.allow_digest_mismatch};
}

void record_stage(const fs::path& dir, const ExperimentConfig& cfg, const std::string& started,
                  const std::string& stage, const fs::path& artifact, std::size_t diverged = 0) {
  const fs::path path = dir / "manifest.json";
  RunManifest m;
  if (fs::exists(path)) {
    try {
      m = load_manifest(path);
    } catch (const Error&) {
      m = {};
    }
    if (m.config_digest != config_digest(cfg)) m = {};
  }
  m.config_digest = config_digest(cfg);
  m.master_seed = cfg.master_seed;
  m.config_text = to_text(cfg);
  m.started_at = m.started_at.empty() ? started : m.started_at;
  m.finished_at = utc_timestamp();
  m.artifacts[stage] = artifact.string();
  if (stage == "gen-lambdas") m.diverged = diverged;
  save_manifest(path, m);
}

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json report_json(const eval::EvalReport& r) {
  json j = {{"family", families::to_string(r.family)},
            {"n", r.n},
            {"metric", r.metric},
            {"inet", r.inet_score},
            {"baseline", r.baseline_score},
            {"baseline_std_error", r.baseline_std_error},
            {"train_samples", r.train_samples},
            {"test_samples", r.test_samples},
            {"config_digest", r.config_digest}};
  j["lambda"] = r.lambda_score ? json(*r.lambda_score) : json(nullptr);
  return j;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) {
    int v = 0;
    const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (res.ec != std::errc{} || res.ptr != part.data() + part.size()) {
      throw ConfigError("expected a comma-separated integer list, got '" + text + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"xrai: train lambda-net populations and interpretation networks"};
  app.require_subcommand(1);
  CommonOptions o;

  auto* gen = app.add_subcommand("gen-lambdas", "Sample target functions and train lambda nets");
  add_common(gen, o);

  std::string lambdas_path;
  std::optional<int> epoch;
  auto* build = app.add_subcommand("build-dataset", "Pair lambda-net parameters with target encodings");
  add_common(build, o);
  build->add_option("--lambdas", lambdas_path, "Lambda archive (default <out>/lambdas.ndjson)");
  build->add_option("--epoch", epoch, "Use the checkpoint at this epoch instead of the final weights");

  std::string dataset_path;
  std::optional<std::size_t> train_limit;
  auto* train = app.add_subcommand("train-inet", "Train the interpretation network");
  add_common(train, o);
  train->add_option("--dataset", dataset_path, "I-Net dataset (default <out>/inet_dataset.ndjson)");
  train->add_option("--train-limit", train_limit, "Use only the first k training rows");

  std::string inet_path;
  auto* evaluate = app.add_subcommand("evaluate", "Score an I-Net on the test split");
  add_common(evaluate, o);
  evaluate->add_option("--dataset", dataset_path, "I-Net dataset");
  evaluate->add_option("--inet", inet_path, "I-Net model (default <out>/inet.ndjson)");
  evaluate->add_option("--lambdas", lambdas_path, "Lambda archive, to report lambda-net scores too");
  evaluate->add_option("--epoch", epoch, "Score lambda nets at this checkpoint");

  std::optional<std::size_t> trials;
  auto* baseline = app.add_subcommand("baseline", "Monte-Carlo naive baseline");
  add_common(baseline, o);
  baseline->add_option("--trials", trials, "Trials (default 100000 boolean, 12500 polynomial)");

  int series = 0;
  std::string ns;
  std::string sizes;
  auto* experiment = app.add_subcommand("experiment", "Run experiment series 1, 2 or 3");
  add_common(experiment, o);
  experiment->add_option("--series", series, "Series id")->required()->check(CLI::Range(1, 3));
  experiment->add_option("--n", ns, "Variable counts for series 1, e.g. 4,5,6");
  experiment->add_option("--sizes", sizes, "Training-set sizes for series 3");
  experiment->add_option("--trials", trials, "Baseline trials");

  std::string archive;
  std::size_t index = 0;
  auto* interpret = app.add_subcommand("interpret", "Print the function an I-Net reads from one lambda net");
  add_common(interpret, o);
  interpret->add_option("archive", archive, "Lambda archive")->required();
  interpret->add_option("--index", index, "Record position in the archive")->required();
  interpret->add_option("--inet", inet_path, "I-Net model (default <out>/inet.ndjson)");

  auto* verify = app.add_subcommand("verify", "Run the oracle self-check suite");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (verify->parsed()) return eval::run_oracle_suite(out) ? kExitOk : kExitRuntime;

    const std::string started = utc_timestamp();
    const ExperimentConfig cfg = resolve_config(o);
    const fs::path dir = out_dir(o);
    const std::string digest = config_digest(cfg);
    const fs::path default_lambdas = dir / "lambdas.ndjson";
    const fs::path default_dataset = dir / "inet_dataset.ndjson";
    const fs::path default_inet = dir / "inet.ndjson";

    if (gen->parsed()) {
      log::info("training " + std::to_string(cfg.lambda_count) + " lambda nets (" +
                std::string(families::to_string(cfg.family)) + ", n=" + std::to_string(cfg.n) +
                ", digest " + digest + ")");
      pipeline::PopulationOptions popts;
      popts.workers = o.workers;
      const std::size_t step = std::max<std::size_t>(1, cfg.lambda_count / 10);
      popts.progress = [step](std::size_t done, std::size_t total) {
        if (done % step == 0 || done == total) {
          log::info("lambda nets: " + std::to_string(done) + "/" + std::to_string(total));
        }
      };
      const auto records = pipeline::run_lambda_population(cfg, popts);
      save_lambda_records(default_lambdas, records, digest);
      record_stage(dir, cfg, started, "gen-lambdas", default_lambdas, pipeline::count_diverged(records));
      log::info("wrote " + default_lambdas.string());
      return kExitOk;
    }

    if (build->parsed()) {
      const fs::path src = lambdas_path.empty() ? default_lambdas : fs::path(lambdas_path);
      const auto records = load_lambda_records(src, read_options(cfg, o));
      const auto ds = pipeline::build_inet_dataset(records, cfg, epoch);
      const fs::path dst = epoch ? dir / ("inet_dataset_e" + std::to_string(*epoch) + ".ndjson")
                                 : default_dataset;
      save_inet_dataset(dst, ds, digest);
      record_stage(dir, cfg, started, "build-dataset", dst);
      log::info("wrote " + dst.string() + " (" + std::to_string(ds.rows()) + " rows)");
      return kExitOk;
    }

    if (train->parsed()) {
      const fs::path src = dataset_path.empty() ? default_dataset : fs::path(dataset_path);
      const auto ds = load_inet_dataset(src, read_options(cfg, o));
      pipeline::InetTrainOptions topts;
      topts.train_limit = train_limit;
      topts.log_progress = true;
      const auto result = pipeline::train_inet(ds, cfg, topts);
      save_mlp(default_inet, result.net, digest);
      record_stage(dir, cfg, started, "train-inet", default_inet);
      log::info("wrote " + default_inet.string());
      return kExitOk;
    }

    if (evaluate->parsed()) {
      const auto ds = load_inet_dataset(dataset_path.empty() ? default_dataset : fs::path(dataset_path),
                                        read_options(cfg, o));
      const auto inet = load_mlp(inet_path.empty() ? default_inet : fs::path(inet_path), read_options(cfg, o));
      const nn::Matrix x = ds.inputs_in(pipeline::Split::test);
      const nn::Matrix y = ds.targets_in(pipeline::Split::test);
      json result = {{"config_digest", digest},
                     {"family", families::to_string(cfg.family)},
                     {"n", cfg.n},
                     {"test_samples", x.rows()}};
      if (cfg.family == families::Family::boolean) {
        const auto s = eval::eval_inet_boolean(inet, x, y);
        result["minterm_accuracy"] = s.minterm_accuracy;
        result["exact_match_rate"] = s.exact_match_rate;
        log::info("I-Net minterm accuracy " + num(s.minterm_accuracy) + ", exact match " +
                  num(s.exact_match_rate));
      } else {
        const double mae = eval::eval_inet_polynomial(inet, x, y, pipeline::evaluation_points(cfg));
        result["polynomial_mae"] = mae;
        log::info("I-Net polynomial MAE " + num(mae));
      }
      if (!lambdas_path.empty()) {
        const auto records = load_lambda_records(lambdas_path, read_options(cfg, o));
        result["lambda"] = cfg.family == families::Family::boolean
                               ? eval::eval_lambda_boolean(records, cfg, epoch)
                               : eval::eval_lambda_polynomial(records, cfg, pipeline::evaluation_points(cfg), epoch);
      }
      write_json(dir / "eval.json", result);
      record_stage(dir, cfg, started, "evaluate", dir / "eval.json");
      return kExitOk;
    }

    if (baseline->parsed()) {
      Rng rng(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(cfg.n), "baseline"));
      eval::MonteCarloEstimate est;
      if (cfg.family == families::Family::boolean) {
        est = eval::baseline_boolean(cfg.n, trials.value_or(100000), rng);
      } else {
        est = eval::baseline_polynomial(cfg.n, cfg.d, cfg.coeff_range, trials.value_or(12500),
                                        pipeline::evaluation_points(cfg), rng);
      }
      write_json(dir / "baseline.json", {{"config_digest", digest},
                                         {"family", families::to_string(cfg.family)},
                                         {"n", cfg.n},
                                         {"mean", est.mean},
                                         {"std_error", est.std_error},
                                         {"trials", est.trials}});
      record_stage(dir, cfg, started, "baseline", dir / "baseline.json");
      log::info("naive baseline " + num(est.mean) + " +/- " + num(est.std_error));
      return kExitOk;
    }

    if (experiment->parsed()) {
      eval::SeriesOptions sopts;
      sopts.workers = o.workers;
      if (!ns.empty()) sopts.variable_counts = parse_int_list(ns);
      if (!sizes.empty()) {
        sopts.train_sizes.clear();
        for (int s : parse_int_list(sizes)) {
          if (s <= 0) throw ConfigError("training-set sizes must be positive");
          sopts.train_sizes.push_back(static_cast<std::size_t>(s));
        }
      }
      if (trials) {
        sopts.baseline_trials = *trials;
        sopts.baseline_samples = *trials;
      }
      const auto reports = eval::experiment_series(series, cfg, dir, sopts);
      json all = json::array();
      for (const auto& r : reports) all.push_back(report_json(r));
      const fs::path reports_path = dir / ("series" + std::to_string(series) + "_reports.json");
      write_json(reports_path, all);
      record_stage(dir, cfg, started, "experiment-" + std::to_string(series),
                   dir / ("series" + std::to_string(series) + ".csv"));
      return kExitOk;
    }

    if (interpret->parsed()) {
      const auto records = load_lambda_records(archive, read_options(cfg, o));
      if (index >= records.size()) {
        throw ConfigError("index " + std::to_string(index) + " is out of range (archive has " +
                          std::to_string(records.size()) + " records)");
      }
      const auto inet = load_mlp(inet_path.empty() ? default_inet : fs::path(inet_path), read_options(cfg, o));
      const auto& rec = records[index];
      const nn::Matrix mu = Eigen::Map<const nn::Matrix>(rec.mu.data(), 1, static_cast<Eigen::Index>(rec.mu.size()));
      const nn::Matrix raw = nn::predict(inet, mu);
      families::EncodingVector enc{cfg.family, std::vector<double>(raw.data(), raw.data() + raw.size())};
      const auto decoded = families::decode(enc, cfg.n, cfg.d);
      log::info("record " + std::to_string(rec.index) + " target: " + families::to_string(rec.function));
      out << families::to_string(decoded) << '\n';
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DigestMismatchError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace xrai::io
