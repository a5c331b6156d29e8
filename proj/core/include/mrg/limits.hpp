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

// Limit laws of the weak-disorder regime: the log-normal limit of Z, the
// covariance of log Z at two space-time points, the field covariance kernel
// K and the variance sigma_psi^2, and the finite-M block limit object.

#ifndef MRG_LIMITS_HPP_
#define MRG_LIMITS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mrg/partition.hpp"

namespace mrg {

// sigma^2 = log(1 / (1 - beta_hat^2)); beta_hat in [0, 1).
double sigma_sq(double beta_hat);

// log((1 - beta_hat^2 zeta) / (1 - beta_hat^2)).
double cov_limit(double beta_hat, double zeta);

struct LimitLaw {
  double beta_hat = 0.0;
  double sigma_sq = 0.0;

  double log_mean() const { return -0.5 * sigma_sq; }
  double second_moment() const;  // 1 / (1 - beta_hat^2)
};

LimitLaw make_limit_law(double beta_hat);

// exp(sigma G - sigma^2 / 2) with G the index-th normal of the seeded stream.
double limit_sample(const LimitLaw& law, std::uint64_t seed, std::uint64_t index);
std::vector<double> limit_samples(const LimitLaw& law, std::uint64_t seed,
                                  std::size_t count);

// Field covariance kernel. d = 2: g standard Gaussian; d = 1: standard Cauchy;
// d = 0: constant c of sqrt(n) q_n -> c.
struct CovKernel {
  int d = 0;
  double c = 1.0;
};

struct LimitPoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double t = 0.0;
};

// d in {1, 2}: (1/2) int_{|t1-t2|}^{2-t1-t2} s^{-1} g((x1-x2)/s^{1/d}) ds
// d = 0:      int_{t1 v t2}^1 c^2 / (sqrt(s-t1) sqrt(s-t2)) ds
double kernel_K(const CovKernel& ck, const LimitPoint& p1, const LimitPoint& p2);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

struct QuadratureOptions {
  double rel_tol = 1e-7;          // d = 0
  double rel_tol_spatial = 1e-3;  // d in {1, 2}
  int max_level = 6;
};

// sigma_psi^2 = beta_hat^2 / (1 - beta_hat^2) * <<psi K psi>> over the support
// box of psi. The diagonal is split off at |t - t'| < delta and integrated in
// the variable log|t - t'|; the error estimate compares delta and delta / 4.
QuadratureResult sigma_psi_quadrature(const CovKernel& ck, const LimitLaw& law,
                                      const FieldWeight& psi,
                                      const QuadratureOptions& options = {});

// E[(Z^{M,K})^2] = 1 + sum_{k<=K} beta_hat^{2k} |{1..M}^k_sharp| / M^k.
double block_limit_second_moment(int M, double beta_hat, int K);

// Z^{M,K} = 1 + sum_{k<=K} beta_hat^k M^{-k/2} sum_{i sharp} prod_l zeta_{i^(l)},
// one standard Gaussian zeta per dominated sequence. The dominated pieces are
// stored as a trie built once; each sample draws one zeta per trie node.
class BlockLimitSampler {
 public:
  BlockLimitSampler(int M, double beta_hat, int K,
                    std::size_t term_cap = std::size_t{1} << 26);

  double sample(std::uint64_t seed, std::uint64_t index) const;
  std::vector<double> samples(std::uint64_t seed, std::size_t count,
                              int threads = 1) const;

  double second_moment() const { return block_limit_second_moment(M_, beta_hat_, K_); }
  std::size_t term_count() const { return terms_; }
  std::size_t dominated_count() const { return nodes_; }

 private:
  int M_;
  double beta_hat_;
  int K_;
  std::size_t terms_ = 0;
  std::size_t nodes_ = 0;
  // child_[node * (M + 1) + v]: trie node for extending a dominated piece by v.
  std::vector<std::int32_t> child_;
};

double block_limit_sampler(int M, double beta_hat, int K, std::uint64_t seed,
                           std::uint64_t index = 0);

}  // namespace mrg

#endif  // MRG_LIMITS_HPP_
