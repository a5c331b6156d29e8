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

// Polynomial chaos of the partition function:
//
//   Z = 1 + sum_k beta_hat^k Z^(k),
//   Z^(k) = R_N^{-k/2} sum_{n_1 < ... < n_k <= N} sum_x prod_j q_{n_j - n_{j-1}}(x_j - x_{j-1}) eta(n_j, x_j),
//
// block variables Theta over the overlap partition, and the combinatorics of
// sharp and dominated index sequences.

#ifndef MRG_CHAOS_HPP_
#define MRG_CHAOS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mrg/disorder.hpp"
#include "mrg/kernels.hpp"

namespace mrg {

using IndexSequence = std::vector<int>;

struct ChaosOptions {
  int k_max = 4;
  std::size_t memory_budget_bytes = std::size_t{1} << 30;
};

// Z^(1), ..., Z^(K) for one realization, from the pickup-count recursion
//   A_j(n, x) = eta(n, x) sum_{m<n} (q_{n-m} * A_{j-1}(m, .))(x).
// Walk models keep the inner sum as a running convolution with the step law
// (CAUCHY1D on the kernel window W_N).
std::vector<double> chaos_terms(const LatticeKernel& kernel, const OverlapTable& overlap,
                                const DisorderField& field, const EtaParams& eta,
                                int N, int K, const ChaosOptions& options = {});

double chaos_term_k(const LatticeKernel& kernel, const OverlapTable& overlap,
                    const DisorderField& field, const EtaParams& eta, int N, int k,
                    const ChaosOptions& options = {});

// 1 + sum_{k<=K} beta_hat^k Z^(k).
double truncated_Z(const LatticeKernel& kernel, const OverlapTable& overlap,
                   const DisorderField& field, const EtaParams& eta, int N,
                   double beta_hat, int K);

// Ordered overlap-chain sums split by order:
//   u_1(n) = r_n,  u_k(n) = sum_{m<n} r_{n-m} u_{k-1}(m),  U_k(N) = sum_{n<=N} u_k(n).
// U[k][N'] holds U_k(N') for every N' <= N; row 0 is unused.
struct ChainOrderTable {
  int N = 0;
  int K = 0;
  std::vector<std::vector<double>> U;

  double at(int k, int n) const { return U.at(k).at(n); }
};

ChainOrderTable chain_order_table(const OverlapTable& overlap, int N, int K);

struct OrderSplitMoment {
  double value = 0.0;       // 1 + sum_{k<=K} gamma^k U_k(N)
  int K = 0;
  double tail_bound = 0.0;  // sum_{k>K} (gamma R_N)^k
};

// Second moment from the order split, with K chosen (up to the table's K) so
// that the geometric tail bound drops below tail_tol.
OrderSplitMoment second_moment_by_order(const ChainOrderTable& table,
                                        const OverlapTable& overlap, double gamma,
                                        int N, double tail_tol = 1e-12);

// L2 distance^2 between Z and its order-K truncation: sum_{k>K} gamma^k U_k(N).
double truncation_tail(const ChainOrderTable& table, double gamma, int N, int K);

// Theta_i = (M / R_N)^{|i|/2} sum_{n_j - n_{j-1} in I_{i_j}} sum_x prod q eta,
// with (n_0, x_0) the optional start point (origin by default). |i| in {1, 2}.
double theta_block(const LatticeKernel& kernel, const OverlapTable& overlap,
                   const DisorderField& field, const EtaParams& eta, int N,
                   const BlockPartition& blocks, const IndexSequence& i,
                   std::optional<SpaceTime> start = std::nullopt);

// Deterministic Var[Theta_i] for d = 0 from the overlap table.
double theta_variance_exact(const OverlapTable& overlap, int N,
                            const BlockPartition& blocks, const IndexSequence& i);

bool is_sharp(const IndexSequence& i);
bool is_dominated(const IndexSequence& i);

// Splits at the strict running maxima; every piece is dominated.
std::vector<IndexSequence> dominated_decomposition(const IndexSequence& i);

// |{1..M}^k_sharp| = k! C(M - k + 1, k).
double sharp_count(int M, int k);

// Visits every sharp sequence of length k over {1..M} in lexicographic order.
void for_each_sharp(int M, int k, const std::function<void(const IndexSequence&)>& fn);

}  // namespace mrg

#endif  // MRG_CHAOS_HPP_
