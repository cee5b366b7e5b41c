#include "xrai/eval/experiments.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "xrai/errors.hpp"
#include "xrai/io/config_io.hpp"
#include "xrai/log.hpp"
#include "xrai/pipeline/inet.hpp"

namespace xrai::eval {

using pipeline::ExperimentConfig;
using pipeline::InetDataset;
using pipeline::LambdaRecord;
using pipeline::Split;

namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <class... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cells, first = false), ...);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

std::vector<LambdaRecord> test_records(std::span<const LambdaRecord> records,
                                       const InetDataset& ds) {
  std::vector<LambdaRecord> out;
  for (std::size_t row : ds.rows_in(Split::test)) {
    for (const auto& r : records) {
      if (r.index == ds.record_index[row]) {
        out.push_back(r);
        break;
      }
    }
  }
  return out;
}

struct Scored {
  double inet = 0.0;
  double exact = 0.0;  // boolean only
};

Scored score_inet(const nn::Mlp& inet, const InetDataset& ds, const ExperimentConfig& cfg) {
  const Matrix x = ds.inputs_in(Split::test);
  const Matrix y = ds.targets_in(Split::test);
  if (x.rows() == 0) throw ConfigError("test split is empty");
  if (cfg.family == families::Family::boolean) {
    const BooleanScores s = eval_inet_boolean(inet, x, y);
    return {s.minterm_accuracy, s.exact_match_rate};
  }
  return {eval_inet_polynomial(inet, x, y, pipeline::evaluation_points(cfg)), 0.0};
}

double lambda_score(std::span<const LambdaRecord> records, const ExperimentConfig& cfg,
                    std::optional<int> epoch) {
  if (cfg.family == families::Family::boolean) return eval_lambda_boolean(records, cfg, epoch);
  return eval_lambda_polynomial(records, cfg, pipeline::evaluation_points(cfg), epoch);
}

std::string metric_name(const ExperimentConfig& cfg) {
  return cfg.family == families::Family::boolean ? "minterm_accuracy" : "polynomial_mae";
}

EvalReport base_report(const ExperimentConfig& cfg, const InetDataset& ds) {
  EvalReport r;
  r.family = cfg.family;
  r.n = cfg.n;
  r.metric = metric_name(cfg);
  r.train_samples = ds.rows_in(Split::train).size();
  r.test_samples = ds.rows_in(Split::test).size();
  r.config_digest = io::config_digest(cfg);
  return r;
}

std::vector<EvalReport> series1(const ExperimentConfig& base, const std::filesystem::path& out_dir,
                                const SeriesOptions& options) {
  CsvWriter csv(out_dir / "series1.csv", "family,n,metric,inet,lambda,baseline");
  std::vector<EvalReport> reports;
  std::vector<int> ns = options.variable_counts.empty() ? std::vector<int>{base.n}
                                                        : options.variable_counts;
  for (int n : ns) {
    ExperimentConfig cfg = pipeline::with_variables(base, n);
    cfg.checkpoint_epochs.clear();
    cfg.validate();
    log::info("series 1: " + std::string(families::to_string(cfg.family)) + " n=" +
              std::to_string(n) + ", training " + std::to_string(cfg.lambda_count) + " lambda nets");
    const auto records = pipeline::run_lambda_population(cfg, {options.workers, {}});
    const InetDataset ds = pipeline::build_inet_dataset(records, cfg);
    log::info("series 1: training I-Net on " + std::to_string(ds.rows_in(Split::train).size()) + " rows");
    const nn::Mlp inet = pipeline::train_inet(ds, cfg).net;
    const Scored inet_score = score_inet(inet, ds, cfg);
    const auto tested = test_records(records, ds);
    const std::string family(families::to_string(cfg.family));
    Rng baseline_rng(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(n), "baseline"));

    EvalReport r = base_report(cfg, ds);
    r.inet_score = inet_score.inet;
    if (cfg.family == families::Family::boolean) {
      const BooleanScores lam = lambda_boolean_scores(tested, cfg);
      const MonteCarloEstimate bl = baseline_boolean(n, options.baseline_trials, baseline_rng);
      r.lambda_score = lam.minterm_accuracy;
      r.baseline_score = bl.mean;
      r.baseline_std_error = bl.std_error;
      EvalReport exact = r;
      exact.metric = "exact_match_rate";
      exact.inet_score = inet_score.exact;
      exact.lambda_score = lam.exact_match_rate;
      // Fair-coin guessing gets every one of the 2^n minterms right.
      exact.baseline_score = std::pow(0.5, static_cast<double>(std::size_t{1} << n));
      exact.baseline_std_error = 0.0;
      r.validate();
      exact.validate();
      csv.row(family, n, r.metric, num(r.inet_score), num(*r.lambda_score), num(r.baseline_score));
      csv.row(family, n, exact.metric, num(exact.inet_score), num(*exact.lambda_score),
              num(exact.baseline_score));
      reports.push_back(r);
      reports.push_back(exact);
    } else {
      const MonteCarloEstimate bl =
          baseline_polynomial(n, cfg.d, cfg.coeff_range, options.baseline_samples,
                              pipeline::evaluation_points(cfg), baseline_rng);
      r.lambda_score = lambda_score(tested, cfg, std::nullopt);
      r.baseline_score = bl.mean;
      r.baseline_std_error = bl.std_error;
      r.validate();
      csv.row(family, n, r.metric, num(r.inet_score), num(*r.lambda_score), num(r.baseline_score));
      reports.push_back(r);
    }
    log::info("series 1: n=" + std::to_string(n) + " I-Net " + num(r.inet_score) + ", lambda " +
              num(*r.lambda_score) + ", baseline " + num(r.baseline_score));
  }
  return reports;
}

std::vector<EvalReport> series2(const ExperimentConfig& base, const std::filesystem::path& out_dir,
                                const SeriesOptions& options) {
  ExperimentConfig cfg = base;
  if (cfg.checkpoint_epochs.empty()) cfg.checkpoint_epochs = pipeline::checkpoint_cadence(10, cfg.lambda_epochs);
  cfg.validate();
  CsvWriter csv(out_dir / "series2.csv", "family,n,epoch,model,score");
  const std::string family(families::to_string(cfg.family));
  const auto records = pipeline::run_lambda_population(cfg, {options.workers, {}});
  std::vector<EvalReport> reports;
  for (int epoch : cfg.checkpoint_epochs) {
    const InetDataset ds = pipeline::build_inet_dataset(records, cfg, epoch);
    const nn::Mlp inet = pipeline::train_inet(ds, cfg).net;
    EvalReport r = base_report(cfg, ds);
    r.inet_score = score_inet(inet, ds, cfg).inet;
    r.lambda_score = lambda_score(test_records(records, ds), cfg, epoch);
    r.validate();
    csv.row(family, cfg.n, epoch, "inet", num(r.inet_score));
    csv.row(family, cfg.n, epoch, "lambda", num(*r.lambda_score));
    log::info("series 2: epoch " + std::to_string(epoch) + " I-Net " + num(r.inet_score) +
              ", lambda " + num(*r.lambda_score));
    reports.push_back(r);
  }
  return reports;
}

std::vector<EvalReport> series3(const ExperimentConfig& base, const std::filesystem::path& out_dir,
                                const SeriesOptions& options) {
  ExperimentConfig cfg = base;
  cfg.checkpoint_epochs.clear();
  cfg.validate();
  CsvWriter csv(out_dir / "series3.csv", "family,n,train_size,model,score");
  const std::string family(families::to_string(cfg.family));
  const auto records = pipeline::run_lambda_population(cfg, {options.workers, {}});
  const InetDataset ds = pipeline::build_inet_dataset(records, cfg);
  const std::size_t available = ds.rows_in(Split::train).size();
  const double lam = lambda_score(test_records(records, ds), cfg, std::nullopt);
  std::vector<EvalReport> reports;
  for (std::size_t size : options.train_sizes) {
    if (size > available) {
      log::warn("series 3: skipping train size " + std::to_string(size) + " (only " +
                std::to_string(available) + " training rows)");
      continue;
    }
    pipeline::InetTrainOptions train_options;
    train_options.train_limit = size;
    const nn::Mlp inet = pipeline::train_inet(ds, cfg, train_options).net;
    EvalReport r = base_report(cfg, ds);
    r.train_samples = size;
    r.inet_score = score_inet(inet, ds, cfg).inet;
    r.lambda_score = lam;
    r.validate();
    csv.row(family, cfg.n, size, "inet", num(r.inet_score));
    csv.row(family, cfg.n, size, "lambda", num(lam));
    log::info("series 3: train size " + std::to_string(size) + " I-Net " + num(r.inet_score));
    reports.push_back(r);
  }
  return reports;
}

}  // namespace

std::vector<EvalReport> experiment_series(int id, const ExperimentConfig& cfg,
                                          const std::filesystem::path& out_dir,
                                          const SeriesOptions& options) {
  std::filesystem::create_directories(out_dir);
  switch (id) {
    case 1: return series1(cfg, out_dir, options);
    case 2: return series2(cfg, out_dir, options);
    case 3: return series3(cfg, out_dir, options);
    default: throw ConfigError("experiment series must be 1, 2 or 3");
  }
}

}  // namespace xrai::eval
