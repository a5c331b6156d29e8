// Copyright 2026 The mrg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Experiment runner: flat key=value configs, per-cell sampling and exact
// targets, CSV tables and a JSON manifest.

#ifndef MRG_HARNESS_HPP_
#define MRG_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mrg/disorder.hpp"
#include "mrg/error.hpp"
#include "mrg/kernels.hpp"
#include "mrg/limits.hpp"
#include "mrg/partition.hpp"
#include "mrg/stats.hpp"

namespace mrg {

enum class Experiment : std::uint8_t {
  kKernel,
  kSingle,
  kMultipoint,
  kField,
  kTheta,
  kShe,
  kStrong,
};

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

// Recognized keys:
//   experiment, model, N_grid, M, beta_hat_grid, law, mode, samples, batches,
//   theta, zeta_targets, psi, tail_tol, seed, threads, out, kernel_cache,
//   she_eps, she_cells, she_runs, she_t_end.
// Lists are comma separated. psi is "constant" or "constant:<half_width>".
struct ExperimentConfig {
  Experiment experiment = Experiment::kSingle;
  ModelKind model = ModelKind::kRenewalHalf;
  std::vector<int> N_grid;
  int M = 4;
  std::vector<double> beta_hat_grid;
  DisorderLaw law = DisorderLaw::kGaussian;
  FieldMode mode = FieldMode::kOmega;
  std::size_t samples = 1000;
  int batches = kMinBatches;
  double theta = 0.5;
  std::vector<double> zeta_targets = {0.25, 0.5, 0.75};
  std::string psi = "constant";
  double tail_tol = 1e-6;
  std::uint64_t seed = 1;
  int threads = 1;
  std::filesystem::path out_dir = "mrg_out";
  std::filesystem::path kernel_cache;  // empty: no cache
  double she_eps = 0.125;
  int she_cells = 32;
  std::size_t she_runs = 500;
  double she_t_end = 0.25;

  // Key/value pairs as given, echoed into the manifest.
  std::map<std::string, std::string> raw;
};

// Throws Error(kConfig) on unknown keys, malformed values or failed checks.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
void set_config_value(ExperimentConfig& config, const std::string& key,
                      const std::string& value);
void validate_config(const ExperimentConfig& config);

FieldWeight parse_psi(std::string_view text);

struct SampleSummary {
  ModelKind model = ModelKind::kRenewalHalf;
  int N = 0;
  double beta_hat = 0.0;
  std::size_t samples = 0;
  double mean_Z = 0.0;
  double var_Z = 0.0;
  double se_mean_Z = 0.0;
  double se_var_Z = 0.0;
  double mean_log_Z = 0.0;
  double var_log_Z = 0.0;
  double se_mean_log_Z = 0.0;
  double kurtosis_log_Z = 0.0;
  double frac_moment = 0.0;
  double se_frac_moment = 0.0;
  double ks_lognormal = 0.0;  // NaN for beta_hat >= 1
  double exact_second_moment = 0.0;
  std::size_t filtered = 0;
};

SampleSummary summarize_samples(std::span<const double> z, ModelKind model, int N,
                                double beta_hat, double theta, int batches);

// Z at each start in `points` for one realization on shared disorder.
std::vector<double> sample_partition(const LatticeKernel& kernel, const OverlapTable& overlap,
                                     const DisorderField& field, int N, double beta_hat,
                                     const std::vector<SpaceTime>& points,
                                     const PolymerOptions& options = {});

// Z at the origin over realizations 0..count-1, realization-parallel.
std::vector<double> sample_origin(const LatticeKernel& kernel, const OverlapTable& overlap,
                                  DisorderLaw law, FieldMode mode, std::uint64_t seed, int N,
                                  double beta_hat, std::size_t count, int threads,
                                  const PolymerOptions& options = {});

// Start point X' with |||X'||| the smallest norm whose overlap ratio reaches
// zeta; a time shift for d = 0 and a spatial shift along x1 otherwise.
struct ZetaLayout {
  SpaceTime X;
  SpaceTime Xp;
  double zeta_target = 0.0;
  double zeta = 0.0;
};

ZetaLayout layout_for_zeta(const OverlapTable& overlap, int N, double zeta);

struct StrongCell {
  int N = 0;
  double beta_hat = 0.0;
  FractionalMoment moment;
  double bound = 0.0;  // (1 - beta_hat^2)^{-theta (theta - 1) / 2}; NaN for beta_hat >= 1
  bool bound_ok = true;
  bool monotone_ok = true;  // against the previous beta_hat at this N
};

struct StrongScan {
  std::vector<StrongCell> cells;
  int monotonicity_violations = 0;
  // Per beta_hat in {1.0, 1.2} present in the grid: estimates along N.
  std::map<double, std::vector<FractionalMoment>> n_trend;
  std::map<double, bool> n_trend_decreasing;
};

StrongScan strong_disorder_scan(const ExperimentConfig& config, const LatticeKernel& kernel,
                                const OverlapTable& overlap);

struct CellReport {
  std::string name;
  bool ok = true;
  std::optional<ErrorKind> error_kind;
  std::string error;
  double runtime_seconds = 0.0;
  std::filesystem::path csv;
};

struct RunReport {
  std::vector<CellReport> cells;
  std::vector<SampleSummary> summaries;
  int exit_code = 0;
};

// Runs the experiment matrix, writes one CSV per cell, summary.csv (for
// sampling experiments) and manifest.json under config.out_dir.
RunReport run_experiment(const ExperimentConfig& config);

// 0 success, 3 cell failure(s), 4 resource budget exceeded.
int exit_code_for(const std::vector<CellReport>& cells);

// Formats with %.17g.
std::string format_double(double v);

}  // namespace mrg

#endif  // MRG_HARNESS_HPP_
