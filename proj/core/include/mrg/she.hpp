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

// Regularized 2d stochastic heat equation
//
//   du = (1/2) Laplace u dt + beta_eps u (j * dW),   beta_eps = beta_hat sqrt(2 pi / log(1/eps)),
//
// through the discrete polymer surrogate on SRW2D and a small explicit grid
// solver on a torus.

#ifndef MRG_SHE_HPP_
#define MRG_SHE_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mrg/disorder.hpp"
#include "mrg/kernels.hpp"
#include "mrg/partition.hpp"

namespace mrg {

double beta_eps(double eps, double beta_hat);

// Smooth bump exp(-1 / (1 - |x / radius|^2)) tabulated on a square grid of
// spacing h, normalized so the weights sum to one (the grid version of
// int j = 1). l2_sq is the Riemann sum of j^2, i.e. ||j||_2^2.
struct Mollifier {
  double radius = 0.0;
  double h = 0.0;
  int half = 0;                 // stencil half-width in cells
  std::vector<double> weights;  // (2 half + 1)^2, row-major, weights = j h^2
  double l2_sq = 0.0;

  int side() const { return 2 * half + 1; }
  double weight(int i, int j) const { return weights[(i + half) * side() + (j + half)]; }
};

Mollifier make_mollifier(double radius, double h);

// Surrogate: u_eps(t, x) ~ Z at start (floor(x / eps), floor(eps^-2 (1 - t)))
// of the SRW2D polymer with N = floor(eps^-2) and beta = beta_hat / sqrt(R_N).
struct ShePoint {
  double t = 1.0;
  double x1 = 0.0;
  double x2 = 0.0;
};

struct SheSurrogate {
  int N = 0;
  double beta = 0.0;
  std::vector<SpaceTime> starts;
  std::vector<double> values;
};

SpaceTime she_start(double eps, int N, const ShePoint& p);

SheSurrogate she_surrogate(const LatticeKernel& kernel, const OverlapTable& overlap,
                           double eps, double beta_hat, const std::vector<ShePoint>& points,
                           std::uint64_t seed, std::uint64_t realization = 0,
                           DisorderLaw law = DisorderLaw::kGaussian);

// Exact E[u_eps(1, 0)^2] of the surrogate.
double she_surrogate_second_moment(const OverlapTable& overlap, double eps,
                                   double beta_hat, DisorderLaw law = DisorderLaw::kGaussian);

struct SheRun {
  double eps = 0.125;
  double beta_hat = 0.0;
  double h = 0.0625;
  double dt = 0.0;  // <= 0 picks h^2 / 4
  int cells = 32;   // torus side in cells
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;
};

struct SheObservables {
  bool origin = true;         // u(t_end, 0)
  bool spatial_mean = true;   // torus average of u(t_end, .)
};

struct SheResult {
  int cells = 0;
  double h = 0.0;
  double dt = 0.0;
  double eps = 0.0;
  double t_end = 0.0;
  std::int64_t steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;
  std::vector<double> u;  // row-major cells x cells snapshot
  double u_origin = 0.0;
  double u_mean = 0.0;
};

// Explicit Euler-Maruyama from u_0 = 1. Each step draws i.i.d. Gaussians per
// cell, convolves them with the mollifier weights and scales by sqrt(dt) / h.
SheResult she_grid_solve(const SheRun& run, const Mollifier& mollifier, double t_end,
                         const SheObservables& observables = {});

// Snapshot file: text header lines "key value", a line "end", then
// cells^2 little-endian float64 values.
void write_she_snapshot(const SheResult& result, const std::filesystem::path& path);
SheResult read_she_snapshot(const std::filesystem::path& path);

}  // namespace mrg

#endif  // MRG_SHE_HPP_
