#pragma once

#include <filesystem>
#include <vector>

#include "xrai/eval/metrics.hpp"
#include "xrai/pipeline/config.hpp"

namespace xrai::eval {

struct SeriesOptions {
  // Variable counts for series 1; defaults to {cfg.n}.
  std::vector<int> variable_counts;
  // Training-set sizes for series 3.
  std::vector<std::size_t> train_sizes{100, 500, 1000, 2500, 5000, 7500};
  unsigned workers = 1;
  std::size_t baseline_trials = 100000;
  // Polynomial baseline draws; the default matches a 12,500-row test set.
  std::size_t baseline_samples = 12500;
};

/// Run experiment series 1, 2 or 3 and write its CSV into `out_dir`:
///   series1.csv  family,n,metric,inet,lambda,baseline
///   series2.csv  family,n,epoch,model,score
///   series3.csv  family,n,train_size,model,score
std::vector<EvalReport> experiment_series(int id, const pipeline::ExperimentConfig& cfg,
                                          const std::filesystem::path& out_dir,
                                          const SeriesOptions& options = {});

}  // namespace xrai::eval
