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

#include "mrg/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mrg/error.hpp"
#include "summation.hpp"

namespace mrg {
namespace {

constexpr double kThetaOpBudget = 4e9;

void check_order(int K, const ChaosOptions& options) {
  require(K >= 0, ErrorKind::kDomain, "chaos order must be >= 0");
  if (K > options.k_max) {
    fail(ErrorKind::kDomain, "chaos order " + std::to_string(K) + " exceeds k_max " +
                                 std::to_string(options.k_max));
  }
}

std::vector<double> chaos_terms_renewal(const LatticeKernel& kernel,
                                        const DisorderField& field,
                                        const EtaParams& eta, int N, int K) {
  std::vector<double> e(N + 1, 0.0);
  for (int n = 1; n <= N; ++n) e[n] = field_eta(field, eta, n, {});
  // qrev[j] = q_{N-j}.
  std::vector<double> qrev(N + 1);
  for (int j = 0; j <= N; ++j) qrev[j] = kernel.mass(N - j, {});

  std::vector<double> prev(N + 1, 0.0);
  std::vector<double> cur(N + 1, 0.0);
  prev[0] = 1.0;
  std::vector<double> sums(K, 0.0);
  for (int j = 1; j <= K; ++j) {
    std::fill(cur.begin(), cur.end(), 0.0);
    NeumaierSum total;
    for (int n = j; n <= N; ++n) {
      const double* qp = qrev.data() + (N - n);
      const double* ap = prev.data();
      double acc = 0.0;
#pragma omp simd reduction(+ : acc)
      for (int m = j - 1; m < n; ++m) acc += ap[m] * qp[m];
      cur[n] = e[n] * acc;
      total.add(cur[n]);
    }
    sums[j - 1] = total.value();
    prev.swap(cur);
  }
  return sums;
}

std::vector<double> chaos_terms_srw2d(const DisorderField& field, const EtaParams& eta,
                                      int N, int K, std::size_t budget) {
  const std::int64_t L = N;
  const std::int64_t S = 2 * L + 1;
  const std::size_t plane = static_cast<std::size_t>(S * S);
  const std::size_t bytes = sizeof(double) * plane * (3 * static_cast<std::size_t>(K) + 2);
  if (bytes > budget) {
    fail(ErrorKind::kSizing, "SRW2D chaos recursion needs " + std::to_string(bytes) +
                                 " bytes at N=" + std::to_string(N));
  }
  auto idx = [&](std::int64_t x1, std::int64_t x2) {
    return static_cast<std::size_t>((x1 + L) * S + (x2 + L));
  };
  // B[j] = sum_{m<n} q_{n-m} * A_{j-1}(m); A[j] = A_j at the previous step.
  std::vector<std::vector<double>> B(K + 1, std::vector<double>(plane, 0.0));
  std::vector<std::vector<double>> A(K + 1, std::vector<double>(plane, 0.0));
  A[0][idx(0, 0)] = 1.0;
  std::vector<double> tmp(plane);
  std::vector<double> e(plane, 0.0);
  std::vector<NeumaierSum> totals(K + 1);

  for (int n = 1; n <= N; ++n) {
    for (std::int64_t x1 = -n; x1 <= n; ++x1) {
      const std::int64_t rem = n - std::abs(x1);
      for (std::int64_t x2 = -rem; x2 <= rem; ++x2) {
        if (((x1 + x2 + n) & 1) != 0) continue;
        e[idx(x1, x2)] = field_eta(field, eta, n, {x1, x2});
      }
    }
    for (int j = std::min(K, n); j >= 1; --j) {
      auto& b = B[j];
      const auto& a = A[j - 1];
      for (std::size_t c = 0; c < plane; ++c) tmp[c] = b[c] + a[c];
      std::fill(b.begin(), b.end(), 0.0);
      const std::int64_t reach = std::min<std::int64_t>(n, L);
      for (std::int64_t x1 = -reach; x1 <= reach; ++x1) {
        for (std::int64_t x2 = -reach; x2 <= reach; ++x2) {
          double acc = 0.0;
          if (x1 > -L) acc += tmp[idx(x1 - 1, x2)];
          if (x1 < L) acc += tmp[idx(x1 + 1, x2)];
          if (x2 > -L) acc += tmp[idx(x1, x2 - 1)];
          if (x2 < L) acc += tmp[idx(x1, x2 + 1)];
          b[idx(x1, x2)] = 0.25 * acc;
        }
      }
    }
    if (n == 1) std::fill(A[0].begin(), A[0].end(), 0.0);
    for (int j = 1; j <= std::min(K, n); ++j) {
      auto& a = A[j];
      const auto& b = B[j];
      for (std::int64_t x1 = -n; x1 <= n; ++x1) {
        const std::int64_t rem = n - std::abs(x1);
        for (std::int64_t x2 = -L; x2 <= L; ++x2) {
          const std::size_t c = idx(x1, x2);
          if (std::abs(x2) > rem || ((x1 + x2 + n) & 1) != 0) {
            a[c] = 0.0;
            continue;
          }
          a[c] = e[c] * b[c];
          totals[j].add(a[c]);
        }
      }
    }
  }
  std::vector<double> sums(K);
  for (int j = 1; j <= K; ++j) sums[j - 1] = totals[j].value();
  return sums;
}

std::vector<double> chaos_terms_cauchy(const LatticeKernel& kernel,
                                       const DisorderField& field, const EtaParams& eta,
                                       int N, int K, std::size_t budget) {
  require(N <= kernel.n_max(), ErrorKind::kRange, "N beyond kernel horizon");
  const std::int64_t L = kernel.window_radius(N);
  const std::int64_t S = 2 * L + 1;
  const std::size_t bytes =
      sizeof(double) * static_cast<std::size_t>(S) * (2 * static_cast<std::size_t>(K) + 6);
  if (bytes > budget) fail(ErrorKind::kSizing, "CAUCHY1D chaos recursion exceeds budget");
  const double c = LatticeKernel::cauchy_normalizer();
  std::vector<double> pfull(2 * S - 1);
  for (std::int64_t k = -2 * L; k <= 2 * L; ++k) {
    const double x = static_cast<double>(k);
    pfull[k + 2 * L] = c / (1.0 + x * x);
  }
  std::vector<std::vector<double>> B(K + 1, std::vector<double>(S, 0.0));
  std::vector<std::vector<double>> A(K + 1, std::vector<double>(S, 0.0));
  A[0][L] = 1.0;
  std::vector<double> tmp(S), e(S);
  std::vector<NeumaierSum> totals(K + 1);
  for (int n = 1; n <= N; ++n) {
    for (std::int64_t x = -L; x <= L; ++x) e[x + L] = field_eta(field, eta, n, {x, 0});
    for (int j = std::min(K, n); j >= 1; --j) {
      for (std::int64_t y = 0; y < S; ++y) tmp[y] = B[j][y] + A[j - 1][y];
      for (std::int64_t x = -L; x <= L; ++x) {
        const double* pk = pfull.data() + (L - x);
        double acc = 0.0;
#pragma omp simd reduction(+ : acc)
        for (std::int64_t y = 0; y < S; ++y) acc += pk[y] * tmp[y];
        B[j][x + L] = acc;
      }
    }
    if (n == 1) std::fill(A[0].begin(), A[0].end(), 0.0);
    for (int j = 1; j <= std::min(K, n); ++j) {
      for (std::int64_t y = 0; y < S; ++y) {
        A[j][y] = e[y] * B[j][y];
        totals[j].add(A[j][y]);
      }
    }
  }
  std::vector<double> sums(K);
  for (int j = 1; j <= K; ++j) sums[j - 1] = totals[j].value();
  return sums;
}

// Enumerates sum_{k in block} sum_z q_k(z) g(k, z) for a walk model.
template <typename Fn>
double block_sum(const LatticeKernel& kernel, int lo, int hi, Fn&& g) {
  double acc = 0.0;
  for (int k = lo + 1; k <= hi; ++k) {
    if (kernel.model() == ModelKind::kSrw2d) {
      for (std::int64_t z1 = -k; z1 <= k; ++z1) {
        const std::int64_t rem = k - std::abs(z1);
        for (std::int64_t z2 = -rem; z2 <= rem; ++z2) {
          if (((z1 + z2 + k) & 1) != 0) continue;
          acc += kernel.mass(k, {z1, z2}) * g(k, Site{z1, z2});
        }
      }
    } else {
      const std::int64_t w = kernel.window_radius(k);
      for (std::int64_t z = -w; z <= w; ++z) acc += kernel.mass(k, {z, 0}) * g(k, Site{z, 0});
    }
  }
  return acc;
}

double block_volume(const LatticeKernel& kernel, int lo, int hi) {
  double v = 0.0;
  for (int k = lo + 1; k <= hi; ++k) {
    if (kernel.model() == ModelKind::kSrw2d) {
      v += 0.5 * (k + 1.0) * (k + 1.0);
    } else if (kernel.model() == ModelKind::kCauchy1d) {
      v += 2.0 * kernel.window_radius(k) + 1.0;
    } else {
      v += 1.0;
    }
  }
  return v;
}

}  // namespace

std::vector<double> chaos_terms(const LatticeKernel& kernel, const OverlapTable& overlap,
                                const DisorderField& field, const EtaParams& eta,
                                int N, int K, const ChaosOptions& options) {
  check_order(K, options);
  require(N >= 1 && N <= kernel.n_max() && N <= overlap.horizon(), ErrorKind::kRange,
          "N outside kernel or overlap horizon");
  if (K == 0) return {};
  std::vector<double> sums;
  switch (kernel.model()) {
    case ModelKind::kRenewalHalf:
      sums = chaos_terms_renewal(kernel, field, eta, N, K);
      break;
    case ModelKind::kSrw2d:
      sums = chaos_terms_srw2d(field, eta, N, K, options.memory_budget_bytes);
      break;
    case ModelKind::kCauchy1d:
      sums = chaos_terms_cauchy(kernel, field, eta, N, K, options.memory_budget_bytes);
      break;
  }
  const double inv_sqrt_r = 1.0 / std::sqrt(overlap.R[N]);
  double scale = 1.0;
  for (int k = 0; k < K; ++k) {
    scale *= inv_sqrt_r;
    sums[k] *= scale;
  }
  return sums;
}

double chaos_term_k(const LatticeKernel& kernel, const OverlapTable& overlap,
                    const DisorderField& field, const EtaParams& eta, int N, int k,
                    const ChaosOptions& options) {
  require(k >= 1, ErrorKind::kDomain, "chaos order must be >= 1");
  return chaos_terms(kernel, overlap, field, eta, N, k, options).back();
}

double truncated_Z(const LatticeKernel& kernel, const OverlapTable& overlap,
                   const DisorderField& field, const EtaParams& eta, int N,
                   double beta_hat, int K) {
  require(K >= 0, ErrorKind::kDomain, "K must be >= 0");
  if (K == 0 || beta_hat == 0.0) return 1.0;
  ChaosOptions options;
  options.k_max = K;
  const auto terms = chaos_terms(kernel, overlap, field, eta, N, K, options);
  NeumaierSum z;
  z.add(1.0);
  double b = 1.0;
  for (int k = 0; k < K; ++k) {
    b *= beta_hat;
    z.add(b * terms[k]);
  }
  return z.value();
}

ChainOrderTable chain_order_table(const OverlapTable& overlap, int N, int K) {
  require(N >= 1 && N <= overlap.horizon(), ErrorKind::kRange,
          "N outside overlap table horizon");
  require(K >= 1, ErrorKind::kDomain, "K must be >= 1");
  ChainOrderTable t;
  t.N = N;
  t.K = K;
  t.U.assign(K + 1, std::vector<double>(N + 1, 0.0));
  std::vector<double> rr(N + 1);
  for (int j = 0; j <= N; ++j) rr[j] = overlap.r[N - j];
  std::vector<double> prev(overlap.r.begin(), overlap.r.begin() + N + 1);
  std::vector<double> cur(N + 1, 0.0);
  for (int k = 1; k <= K; ++k) {
    if (k > 1) {
      std::fill(cur.begin(), cur.end(), 0.0);
      for (int n = k; n <= N; ++n) {
        const double* rp = rr.data() + (N - n);
        const double* up = prev.data();
        double acc = 0.0;
#pragma omp simd reduction(+ : acc)
        for (int m = k - 1; m < n; ++m) acc += up[m] * rp[m];
        cur[n] = acc;
      }
      prev.swap(cur);
    }
    NeumaierSum s;
    for (int n = 1; n <= N; ++n) {
      s.add(prev[n]);
      t.U[k][n] = s.value();
    }
  }
  return t;
}

double truncation_tail(const ChainOrderTable& table, double gamma, int N, int K) {
  require(N >= 1 && N <= table.N, ErrorKind::kRange, "N outside chain table");
  require(K >= 0 && K <= table.K, ErrorKind::kRange, "K outside chain table");
  NeumaierSum s;
  double g = 1.0;
  for (int k = 1; k <= table.K; ++k) {
    g *= gamma;
    if (k > K) s.add(g * table.U[k][N]);
  }
  return s.value();
}

OrderSplitMoment second_moment_by_order(const ChainOrderTable& table,
                                        const OverlapTable& overlap, double gamma,
                                        int N, double tail_tol) {
  require(N >= 1 && N <= table.N, ErrorKind::kRange, "N outside chain table");
  const double x = gamma * overlap.R[N];
  OrderSplitMoment out;
  out.K = table.K;
  if (x < 1.0) {
    for (int k = 1; k <= table.K; ++k) {
      const double bound = std::pow(x, k + 1) / (1.0 - x);
      if (bound < tail_tol) {
        out.K = k;
        break;
      }
    }
    out.tail_bound = std::pow(x, out.K + 1) / (1.0 - x);
  } else {
    out.tail_bound = std::numeric_limits<double>::infinity();
  }
  NeumaierSum s;
  s.add(1.0);
  double g = 1.0;
  for (int k = 1; k <= out.K; ++k) {
    g *= gamma;
    s.add(g * table.U[k][N]);
  }
  out.value = s.value();
  return out;
}

double theta_block(const LatticeKernel& kernel, const OverlapTable& overlap,
                   const DisorderField& field, const EtaParams& eta, int N,
                   const BlockPartition& blocks, const IndexSequence& i,
                   std::optional<SpaceTime> start) {
  require(i.size() == 1 || i.size() == 2, ErrorKind::kDomain,
          "theta_block supports |i| in {1, 2}");
  for (int b : i) {
    require(b >= 1 && b <= blocks.M, ErrorKind::kDomain,
            "block index " + std::to_string(b) + " outside 1.." + std::to_string(blocks.M));
  }
  require(blocks.t.back() == N && N <= overlap.horizon() && N <= kernel.n_max(),
          ErrorKind::kRange, "block partition does not match N");
  const SpaceTime X0 = start.value_or(SpaceTime{});
  const double norm =
      std::pow(static_cast<double>(blocks.M) / overlap.R[N], 0.5 * i.size());

  const int lo1 = blocks.begin(i[0]);
  const int hi1 = blocks.end(i[0]);

  if (kernel.model() == ModelKind::kRenewalHalf) {
    if (i.size() == 1) {
      NeumaierSum s;
      for (int k = lo1 + 1; k <= hi1; ++k) {
        s.add(kernel.mass(k, {}) * field_eta(field, eta, X0.t + k, {}));
      }
      return norm * s.value();
    }
    const int lo2 = blocks.begin(i[1]);
    const int hi2 = blocks.end(i[1]);
    const std::int64_t last = X0.t + hi1 + hi2;
    std::vector<double> e(static_cast<std::size_t>(last - X0.t + 1), 0.0);
    for (std::int64_t n = X0.t + lo1 + 1; n <= last; ++n) {
      e[n - X0.t] = field_eta(field, eta, n, {});
    }
    NeumaierSum s;
    for (int k1 = lo1 + 1; k1 <= hi1; ++k1) {
      double inner = 0.0;
      for (int k2 = lo2 + 1; k2 <= hi2; ++k2) inner += kernel.mass(k2, {}) * e[k1 + k2];
      s.add(kernel.mass(k1, {}) * e[k1] * inner);
    }
    return norm * s.value();
  }

  auto eta_at = [&](std::int64_t n, Site z) {
    return field_eta(field, eta, n, {X0.x.x1 + z.x1, X0.x.x2 + z.x2});
  };
  if (i.size() == 1) {
    return norm * block_sum(kernel, lo1, hi1, [&](int k, Site z) {
             return eta_at(X0.t + k, z);
           });
  }
  const int lo2 = blocks.begin(i[1]);
  const int hi2 = blocks.end(i[1]);
  const double ops = block_volume(kernel, lo1, hi1) * block_volume(kernel, lo2, hi2);
  if (ops > kThetaOpBudget) {
    std::ostringstream os;
    os << "theta_block pair (" << i[0] << "," << i[1] << ") needs ~" << ops
       << " kernel evaluations, budget " << kThetaOpBudget;
    fail(ErrorKind::kSizing, os.str());
  }
  return norm * block_sum(kernel, lo1, hi1, [&](int k1, Site z1) {
           const double e1 = eta_at(X0.t + k1, z1);
           const double inner = block_sum(kernel, lo2, hi2, [&](int k2, Site z2) {
             return eta_at(X0.t + k1 + k2, Site{z1.x1 + z2.x1, z1.x2 + z2.x2});
           });
           return e1 * inner;
         });
}

double theta_variance_exact(const OverlapTable& overlap, int N,
                            const BlockPartition& blocks, const IndexSequence& i) {
  require(N >= 1 && N <= overlap.horizon(), ErrorKind::kRange,
          "N outside overlap table horizon");
  double v = 1.0;
  for (int b : i) {
    require(b >= 1 && b <= blocks.M, ErrorKind::kDomain, "block index out of range");
    const double dR = overlap.R[blocks.end(b)] - overlap.R[blocks.begin(b)];
    v *= static_cast<double>(blocks.M) / overlap.R[N] * dR;
  }
  return v;
}

bool is_sharp(const IndexSequence& i) {
  for (std::size_t a = 0; a < i.size(); ++a) {
    for (std::size_t b = a + 1; b < i.size(); ++b) {
      if (std::abs(i[a] - i[b]) < 2) return false;
    }
  }
  return true;
}

bool is_dominated(const IndexSequence& i) {
  if (i.empty()) return false;
  for (std::size_t a = 1; a < i.size(); ++a) {
    if (i[a] >= i[0]) return false;
  }
  return true;
}

std::vector<IndexSequence> dominated_decomposition(const IndexSequence& i) {
  std::vector<IndexSequence> pieces;
  int running_max = std::numeric_limits<int>::min();
  for (int v : i) {
    if (pieces.empty() || v > running_max) {
      pieces.push_back({v});
      running_max = v;
    } else {
      pieces.back().push_back(v);
    }
  }
  return pieces;
}

double sharp_count(int M, int k) {
  if (k == 0) return 1.0;
  if (k < 0 || M - k + 1 < k) return 0.0;
  double c = 1.0;
  // k! C(M - k + 1, k) = (M - k + 1)! / (M - 2k + 1)!.
  for (int j = 0; j < k; ++j) c *= static_cast<double>(M - k + 1 - j);
  return c;
}

void for_each_sharp(int M, int k, const std::function<void(const IndexSequence&)>& fn) {
  require(M >= 1 && k >= 0, ErrorKind::kDomain, "need M >= 1, k >= 0");
  IndexSequence seq;
  seq.reserve(k);
  std::vector<char> blocked(M + 2, 0);
  std::function<void()> rec = [&] {
    if (static_cast<int>(seq.size()) == k) {
      fn(seq);
      return;
    }
    for (int v = 1; v <= M; ++v) {
      if (blocked[v]) continue;
      seq.push_back(v);
      ++blocked[v - 1];
      ++blocked[v];
      ++blocked[v + 1];
      rec();
      --blocked[v - 1];
      --blocked[v];
      --blocked[v + 1];
      seq.pop_back();
    }
  };
  rec();
}

}  // namespace mrg
