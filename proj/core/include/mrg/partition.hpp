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

// Disordered partition functions for every starting point from one backward
// sweep, exact second and cross moments from overlap-chain recursions, and
// the rescaled field functional J.

#ifndef MRG_PARTITION_HPP_
#define MRG_PARTITION_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "mrg/disorder.hpp"
#include "mrg/kernels.hpp"

namespace mrg {

// Z(x, t) for t in [0, N) and x in the box |x|_inf <= radius (radius = 0 for
// d = 0). Z(x, N) = 1 is implicit.
class PartitionSurface {
 public:
  ModelKind model = ModelKind::kRenewalHalf;
  int N = 0;
  double beta = 0.0;
  std::int64_t radius = 0;
  // CAUCHY1D only: sweep window half-width and the bound N * tail_tol on the
  // bias of treating out-of-window continuation as disorder-free.
  std::int64_t window = 0;
  double window_bias_bound = 0.0;
  std::vector<double> values;

  std::int64_t side() const { return 2 * radius + 1; }
  bool covers(Site x, std::int64_t t) const;
  double at(Site x, std::int64_t t) const;
  double at(std::int64_t t) const { return at(Site{}, t); }
  std::size_t index(Site x, std::int64_t t) const;
};

struct PolymerOptions {
  std::int64_t region_radius = 0;
  // CAUCHY1D: fixed window half-width beyond the region; < 0 uses the kernel
  // window W_N.
  std::int64_t window_override = -1;
  std::size_t memory_budget_bytes = std::size_t{1} << 30;
};

// Backward sweep Z_n(x) = sum_y p(y - x) xi(n+1, y) Z_{n+1}(y), Z_N = 1.
// SRW2D layers grow as |x|_inf <= region + n so stored values are exact.
PartitionSurface polymer_Z_all_starts(const LatticeKernel& kernel,
                                      const DisorderField& field,
                                      const EtaParams& eta, int N,
                                      const PolymerOptions& options = {});

// Z(t) = S(N - t) + sum_{m=1}^{N-t} f(m) xi(t+m) Z(t+m), Z(N) = 1.
PartitionSurface pinning_Z_all_starts(const LatticeKernel& kernel,
                                      const DisorderField& field,
                                      const EtaParams& eta, int N);

// Dispatches on the kernel model.
PartitionSurface partition_surface(const LatticeKernel& kernel,
                                   const DisorderField& field,
                                   const EtaParams& eta, int N,
                                   const PolymerOptions& options = {});

// E[Z_N^2] = 1 + sum_{n<=N} c(n), c(n) = gamma (r_n + sum_{m<n} r_{n-m} c(m)).
// Throws kBlowUp once the running sum passes 1e12.
double second_moment_exact(const OverlapTable& overlap, const EtaParams& eta, int N);
double second_moment_exact(const OverlapTable& overlap, double gamma, int N);

// E[Z_n^2] for every n in [0, N] from a single pass.
std::vector<double> second_moment_profile(const OverlapTable& overlap,
                                          double gamma, int N);

// Meeting weight w(n) = sum_z q_{n-t}(z - x) q_{n-t'}(z - x') for n in
// (max(t, t'), N]; entries at or below max(t, t') are zero.
std::vector<double> meeting_weights(const LatticeKernel& kernel, int N,
                                    const SpaceTime& X, const SpaceTime& Xp);

// E[Z(X) Z(X')] = 1 + sum_n d(n), d(n) = gamma (w(n) + sum_{m<n} d(m) r_{n-m}).
double cross_moment_exact(const LatticeKernel& kernel, const OverlapTable& overlap,
                          const EtaParams& eta, int N, const SpaceTime& X,
                          const SpaceTime& Xp);

// Test function psi on R^d x [0, 1] with a declared support box in rescaled
// coordinates; evaluation returns 0 outside the box.
struct FieldWeight {
  std::function<double(double x1, double x2, double t)> fn;
  std::array<double, 2> lo = {0.0, 0.0};
  std::array<double, 2> hi = {0.0, 0.0};
  double t_lo = 0.0;
  double t_hi = 1.0;

  bool in_support(double x1, double x2, double t, int d) const;
  double operator()(double x1, double x2, double t, int d) const;

  static FieldWeight zero();
  // psi = value on the box [-half, half]^d x [0, 1].
  static FieldWeight constant(double value, double half_width = 0.5);
};

// J = (1 / (phi(N)^d N)) sum_{(x,t)} sqrt(R_N) (Z(x,t) - 1) psi(x / phi(N), t / N)
// with phi(N) = N^{1/d}.
double field_functional_J(const PartitionSurface& surface,
                          const OverlapTable& overlap, const FieldWeight& psi);

// Spatial radius the surface needs to cover psi at horizon N.
std::int64_t field_support_radius(ModelKind model, int N, const FieldWeight& psi);

// Exact Var[J] for d = 0:
//   Var J = (R_N / N^2) sum_n e(n),
//   e(n) = gamma (a(n)^2 + sum_{m<n} e(m) r_{n-m}),  a(n) = sum_{t<n} psi(t/N) q_{n-t}.
double field_variance_exact(const LatticeKernel& kernel, const OverlapTable& overlap,
                            const EtaParams& eta, int N, const FieldWeight& psi);

}  // namespace mrg

#endif  // MRG_PARTITION_HPP_
