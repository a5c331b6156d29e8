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

// Exact transition and renewal kernels for the three marginal models, the
// replica-overlap table built from them, and the overlap-based block
// partition of the time axis.
//
//   SRW2D        simple random walk on Z^2            (d = 2)
//   CAUCHY1D     walk on Z with step law c/(1+x^2)    (d = 1)
//   RENEWAL_HALF renewal with P(tau_1 = n) ~ n^{-3/2} (d = 0)

#ifndef MRG_KERNELS_HPP_
#define MRG_KERNELS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mrg {

enum class ModelKind : std::uint8_t { kSrw2d = 0, kCauchy1d = 1, kRenewalHalf = 2 };

constexpr int dimension(ModelKind m) {
  switch (m) {
    case ModelKind::kSrw2d: return 2;
    case ModelKind::kCauchy1d: return 1;
    case ModelKind::kRenewalHalf: return 0;
  }
  return -1;
}

std::string_view to_string(ModelKind m);
ModelKind parse_model(std::string_view name);

// Lattice site in Z^d; coordinates beyond d are zero.
struct Site {
  std::int64_t x1 = 0;
  std::int64_t x2 = 0;
  friend bool operator==(const Site&, const Site&) = default;
};

// Space-time point (x, t). For d = 0 only t is meaningful.
struct SpaceTime {
  Site x;
  std::int64_t t = 0;
  friend bool operator==(const SpaceTime&, const SpaceTime&) = default;
};

enum class RenewalLaw : std::uint8_t {
  kHalf = 0,        // f(n) = n^{-3/2} / zeta(3/2) on all of N
  kDegenerate = 1,  // f(1) = 1, debug law with q_n = 1
};

struct KernelOptions {
  RenewalLaw renewal_law = RenewalLaw::kHalf;
  std::size_t memory_budget_bytes = std::size_t{1} << 30;
  std::int64_t window_cap = std::int64_t{1} << 16;  // CAUCHY1D radius cap
};

class LatticeKernel {
 public:
  using RowStore = std::vector<std::vector<double>>;

  ModelKind model() const { return model_; }
  int dim() const { return dimension(model_); }
  int n_max() const { return n_max_; }
  double tail_tol() const { return tail_tol_; }
  RenewalLaw renewal_law() const { return renewal_law_; }

  // q_n(x) = P(S_n = x), or P(n in tau) for the renewal (x ignored).
  double mass(int n, Site x) const;

  // Radius of the stored window W_n: L1 radius for SRW2D, |x| for CAUCHY1D,
  // 0 for the renewal.
  std::int64_t window_radius(int n) const { return radius_.at(n); }

  // Mass outside W_n: 0 for SRW2D, the truncation loss for CAUCHY1D and
  // 1 - q_n for the renewal.
  double tail_mass(int n) const { return tail_.at(n); }

  // Single-step law p(dx) of the walk models.
  double step_mass(Site dx) const;

  // Inter-arrival law f(m) and survival S(k) = P(tau_1 > k) of the renewal.
  double interarrival(int m) const;
  double survival(int k) const;
  std::span<const double> interarrival_table() const { return f_; }
  std::span<const double> survival_table() const { return survival_; }

  // Raw payload for step n: binomial row b_n(0..n) for SRW2D (q_n(x) is the
  // product of two entries along the rotated axes u = x1+x2, v = x1-x2),
  // q_n on [-W_n, W_n] for CAUCHY1D, {q_n} for the renewal.
  std::span<const double> payload(int n) const { return rows_.at(n); }

  // Normalizing constant of the CAUCHY1D step law, 1 / (pi coth pi).
  static double cauchy_normalizer();
  // Normalizing constant of the renewal law, 1 / zeta(3/2).
  static double renewal_normalizer();

 private:
  friend LatticeKernel build_kernel(ModelKind, int, double, const KernelOptions&);
  friend void save_kernel_cache(const LatticeKernel&, const std::filesystem::path&);
  friend LatticeKernel load_kernel_cache(const std::filesystem::path&, ModelKind,
                                         int, double, RenewalLaw);

  ModelKind model_ = ModelKind::kSrw2d;
  int n_max_ = 0;
  double tail_tol_ = 0.0;
  RenewalLaw renewal_law_ = RenewalLaw::kHalf;
  RowStore rows_;
  std::vector<std::int64_t> radius_;
  std::vector<double> tail_;
  std::vector<double> f_;         // renewal only, index 0..n_max
  std::vector<double> survival_;  // renewal only, index 0..n_max
};

LatticeKernel build_kernel(ModelKind model, int n_max, double tail_tol,
                           const KernelOptions& options = {});

// Binary cache "MRGK1": little-endian header keyed by (model, n_max,
// tail_tol, renewal law) followed by per-step window metadata and float64
// payloads. Loading reproduces the kernel bit for bit.
void save_kernel_cache(const LatticeKernel& kernel,
                       const std::filesystem::path& path);
LatticeKernel load_kernel_cache(const std::filesystem::path& path,
                                ModelKind model, int n_max, double tail_tol,
                                RenewalLaw law = RenewalLaw::kHalf);
// Loads from `dir` when a matching cache file exists, else builds and saves.
LatticeKernel build_kernel_cached(const std::filesystem::path& dir,
                                  ModelKind model, int n_max, double tail_tol,
                                  const KernelOptions& options = {});
std::string kernel_cache_name(ModelKind model, int n_max, double tail_tol,
                              RenewalLaw law);

// Replica overlaps r_n = sum_x q_n(x)^2 and their prefix sums R_n. Index 0
// is the empty sum: r(0) is not part of R and R(0) = 0.
struct OverlapTable {
  ModelKind model = ModelKind::kSrw2d;
  std::vector<double> r;  // r[0] = 0, r[n] for 1 <= n <= horizon
  std::vector<double> R;  // R[0] = 0

  int horizon() const { return static_cast<int>(r.size()) - 1; }
  double max_r(int N) const;
};

OverlapTable overlap_table(const LatticeKernel& kernel);

// beta_N = beta_hat / sqrt(R_N).
double beta_schedule(const OverlapTable& overlap, int N, double beta_hat);

// t_0 = 0 and t_i = min{ m : R_m >= (i/M) R_N }; block I_i = (t_{i-1}, t_i].
struct BlockPartition {
  int M = 0;
  std::vector<int> t;  // size M + 1

  int begin(int i) const { return t.at(i - 1); }  // exclusive
  int end(int i) const { return t.at(i); }        // inclusive
};

BlockPartition block_boundaries(const OverlapTable& overlap, int N, int M);

struct TripleNorm {
  std::int64_t norm = 0;
  double zeta = 0.0;
};

// |||X - X'||| = |dt| v ceil(|dx|^d) and zeta = R_{|||X - X'|||} / R_N,
// clamped to [0, 1].
TripleNorm triple_norm_zeta(const OverlapTable& overlap, int N,
                            const SpaceTime& X, const SpaceTime& Xp);

// Local-limit diagnostic at step n (no pass/fail):
//   SRW2D    sup over the parity sublattice of |n q_n(x) - 2 g(x/sqrt n)|,
//            g the N(0, I/2) density of the walk's diffusive limit;
//   CAUCHY1D sup_x |n q_n(x) - g(x/n)|, g the standard Cauchy density;
//   renewal  |sqrt(n) q_n - c| with c from renewal_llt_constant().
double llt_diagnostic(const LatticeKernel& kernel, int n);

// Empirical c in sqrt(n) q_n -> c, extrapolated from the end of the table.
double renewal_llt_constant(const LatticeKernel& kernel);

}  // namespace mrg

#endif  // MRG_KERNELS_HPP_
