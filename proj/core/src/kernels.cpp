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

#include "mrg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "mrg/error.hpp"
#include "summation.hpp"

namespace mrg {
namespace {

// sum_{x >= 1} 1 / (1 + x^2) = (pi coth pi - 1) / 2.
double cauchy_half_series() {
  return 0.5 * (std::numbers::pi / std::tanh(std::numbers::pi) - 1.0);
}

void build_srw2d(LatticeKernel::RowStore& rows, int n_max,
                 std::size_t budget) {
  const std::size_t entries =
      static_cast<std::size_t>(n_max + 1) * static_cast<std::size_t>(n_max + 2) / 2;
  if (entries * sizeof(double) > budget) {
    std::ostringstream os;
    os << "SRW2D kernel to n_max=" << n_max << " needs "
       << entries * sizeof(double) << " bytes, budget " << budget;
    fail(ErrorKind::kSizing, os.str());
  }
  rows.resize(n_max + 1);
  rows[0] = {1.0};
  for (int n = 1; n <= n_max; ++n) {
    const auto& prev = rows[n - 1];
    auto& row = rows[n];
    row.assign(n + 1, 0.0);
    row[0] = 0.5 * prev[0];
    row[n] = 0.5 * prev[n - 1];
    for (int k = 1; k < n; ++k) row[k] = 0.5 * (prev[k - 1] + prev[k]);
  }
}

}  // namespace

std::string_view to_string(ModelKind m) {
  switch (m) {
    case ModelKind::kSrw2d: return "srw2d";
    case ModelKind::kCauchy1d: return "cauchy1d";
    case ModelKind::kRenewalHalf: return "renewal_half";
  }
  return "?";
}

ModelKind parse_model(std::string_view name) {
  if (name == "srw2d" || name == "SRW2D") return ModelKind::kSrw2d;
  if (name == "cauchy1d" || name == "CAUCHY1D") return ModelKind::kCauchy1d;
  if (name == "renewal_half" || name == "RENEWAL_HALF" || name == "renewal")
    return ModelKind::kRenewalHalf;
  fail(ErrorKind::kConfig, "unknown model '" + std::string(name) + "'");
}

double LatticeKernel::cauchy_normalizer() {
  return std::tanh(std::numbers::pi) / std::numbers::pi;
}

double LatticeKernel::renewal_normalizer() { return 1.0 / std::riemann_zeta(1.5); }

double LatticeKernel::mass(int n, Site x) const {
  require(n >= 0 && n <= n_max_, ErrorKind::kRange,
          "kernel step " + std::to_string(n) + " beyond n_max " +
              std::to_string(n_max_));
  switch (model_) {
    case ModelKind::kSrw2d: {
      const std::int64_t u = x.x1 + x.x2;
      const std::int64_t v = x.x1 - x.x2;
      if (std::abs(u) > n || std::abs(v) > n || ((n + u) & 1) != 0) return 0.0;
      const auto& row = rows_[n];
      return row[(n + u) / 2] * row[(n + v) / 2];
    }
    case ModelKind::kCauchy1d: {
      const std::int64_t w = radius_[n];
      if (std::abs(x.x1) > w) return 0.0;
      return rows_[n][x.x1 + w];
    }
    case ModelKind::kRenewalHalf:
      return rows_[n][0];
  }
  return 0.0;
}

double LatticeKernel::step_mass(Site dx) const {
  switch (model_) {
    case ModelKind::kSrw2d:
      return (std::abs(dx.x1) + std::abs(dx.x2) == 1) ? 0.25 : 0.0;
    case ModelKind::kCauchy1d: {
      const double x = static_cast<double>(dx.x1);
      return cauchy_normalizer() / (1.0 + x * x);
    }
    case ModelKind::kRenewalHalf:
      fail(ErrorKind::kDomain, "renewal kernel has no spatial step law");
  }
  return 0.0;
}

double LatticeKernel::interarrival(int m) const {
  require(model_ == ModelKind::kRenewalHalf, ErrorKind::kDomain,
          "inter-arrival law requested from a walk kernel");
  require(m >= 0 && m <= n_max_, ErrorKind::kRange, "inter-arrival index");
  return f_[m];
}

double LatticeKernel::survival(int k) const {
  require(model_ == ModelKind::kRenewalHalf, ErrorKind::kDomain,
          "survival requested from a walk kernel");
  require(k >= 0 && k <= n_max_, ErrorKind::kRange, "survival index");
  return survival_[k];
}

LatticeKernel build_kernel(ModelKind model, int n_max, double tail_tol,
                           const KernelOptions& options) {
  require(n_max >= 1, ErrorKind::kDomain, "n_max must be >= 1");
  require(tail_tol > 0.0 && tail_tol < 1.0, ErrorKind::kDomain,
          "tail_tol must lie in (0, 1)");

  LatticeKernel k;
  k.model_ = model;
  k.n_max_ = n_max;
  k.tail_tol_ = tail_tol;
  k.renewal_law_ = options.renewal_law;
  k.radius_.assign(n_max + 1, 0);
  k.tail_.assign(n_max + 1, 0.0);

  switch (model) {
    case ModelKind::kSrw2d: {
      build_srw2d(k.rows_, n_max, options.memory_budget_bytes);
      for (int n = 0; n <= n_max; ++n) k.radius_[n] = n;
      break;
    }

    case ModelKind::kCauchy1d: {
      const double c = LatticeKernel::cauchy_normalizer();
      // Half-line tail sum_{x > W} 1/(1+x^2), maintained incrementally as the
      // window grows.
      NeumaierSum prefix;
      const double half = cauchy_half_series();
      std::int64_t w = 0;
      auto step_tail = [&](std::int64_t) {
        return 2.0 * c * (half - prefix.value());
      };

      k.rows_.resize(n_max + 1);
      k.rows_[0] = {1.0};
      std::size_t bytes = sizeof(double);
      std::vector<double> p;  // p[j] = c / (1 + j^2)

      // Each truncated sweep drops about P(|X_1| > W_k); with W_k set by
      // k * P(|X_1| > W_k) <= budget the drops add up to budget * H_n.
      double harmonic = 0.0;
      for (int n = 1; n <= n_max; ++n) harmonic += 1.0 / n;
      const double budget = 0.5 * tail_tol / harmonic;

      for (int n = 1; n <= n_max; ++n) {
        // Window policy: smallest W with n * P(|X_1| > W) <= tail_tol / (2 H_{n_max}).
        while (n * step_tail(w) > budget) {
          if (w >= options.window_cap) {
            std::ostringstream os;
            os << "CAUCHY1D step " << n << ": window cap " << options.window_cap
               << " reached with attained tail mass " << n * step_tail(w)
               << " > tail_tol / (2 H_n_max) = " << budget;
            fail(ErrorKind::kTruncation, os.str());
          }
          ++w;
          const double x = static_cast<double>(w);
          prefix.add(1.0 / (1.0 + x * x));
        }
        const std::int64_t w_prev = k.radius_[n - 1];
        k.radius_[n] = w;
        bytes += sizeof(double) * static_cast<std::size_t>(2 * w + 1);
        if (bytes > options.memory_budget_bytes) {
          fail(ErrorKind::kSizing, "CAUCHY1D kernel exceeds memory budget at step " +
                                       std::to_string(n));
        }

        const std::int64_t span = w + w_prev;
        if (static_cast<std::int64_t>(p.size()) <= span) {
          const std::size_t old = p.size();
          p.resize(span + 1);
          for (std::size_t j = old; j < p.size(); ++j) {
            const double x = static_cast<double>(j);
            p[j] = c / (1.0 + x * x);
          }
        }

        const auto& prev = k.rows_[n - 1];
        auto& row = k.rows_[n];
        row.assign(2 * w + 1, 0.0);
        // Rows are symmetric in x.
        for (std::int64_t x = 0; x <= w; ++x) {
          double acc = 0.0;
          for (std::int64_t y = -w_prev; y <= w_prev; ++y) {
            acc += prev[y + w_prev] * p[std::abs(x - y)];
          }
          row[x + w] = acc;
          row[w - x] = acc;
        }
        NeumaierSum total;
        for (double v : row) total.add(v);
        k.tail_[n] = 1.0 - total.value();
        if (k.tail_[n] > tail_tol) {
          std::ostringstream os;
          os << "CAUCHY1D step " << n << ": tail mass " << k.tail_[n]
             << " exceeds tail_tol " << tail_tol << " at window " << w;
          fail(ErrorKind::kTruncation, os.str());
        }
      }
      break;
    }

    case ModelKind::kRenewalHalf: {
      const std::size_t bytes = sizeof(double) * 4 * static_cast<std::size_t>(n_max + 1);
      if (bytes > options.memory_budget_bytes) {
        fail(ErrorKind::kSizing, "renewal kernel exceeds memory budget");
      }
      k.f_.assign(n_max + 1, 0.0);
      k.survival_.assign(n_max + 1, 0.0);
      if (options.renewal_law == RenewalLaw::kDegenerate) {
        k.f_[1] = 1.0;
        k.survival_[0] = 1.0;
      } else {
        const double cf = LatticeKernel::renewal_normalizer();
        NeumaierSum cum;
        k.survival_[0] = 1.0;
        for (int m = 1; m <= n_max; ++m) {
          const double dm = static_cast<double>(m);
          k.f_[m] = cf / (dm * std::sqrt(dm));
          cum.add(k.f_[m]);
          // Residual P(tau_1 > m) stays explicit so q_n is a true renewal
          // function rather than one conditioned on returning by n_max.
          k.survival_[m] = 1.0 - cum.value();
        }
      }

      // q_n = sum_{m=1}^n f(m) q_{n-m}; q is kept reversed so both operands
      // stream forward.
      std::vector<double> qrev(n_max + 1, 0.0);
      qrev[n_max] = 1.0;
      const double* f = k.f_.data();
      for (int n = 1; n <= n_max; ++n) {
        const double* qr = qrev.data() + (n_max - n);
        double acc = 0.0;
#pragma omp simd reduction(+ : acc)
        for (int m = 1; m <= n; ++m) acc += f[m] * qr[m];
        qrev[n_max - n] = acc;
      }
      k.rows_.resize(n_max + 1);
      for (int n = 0; n <= n_max; ++n) {
        const double q = qrev[n_max - n];
        k.rows_[n] = {q};
        k.tail_[n] = 1.0 - q;
      }
      break;
    }
  }
  return k;
}

double OverlapTable::max_r(int N) const {
  require(N >= 1 && N <= horizon(), ErrorKind::kRange, "overlap index");
  return *std::max_element(r.begin() + 1, r.begin() + N + 1);
}

OverlapTable overlap_table(const LatticeKernel& kernel) {
  OverlapTable t;
  t.model = kernel.model();
  const int n_max = kernel.n_max();
  t.r.assign(n_max + 1, 0.0);
  t.R.assign(n_max + 1, 0.0);
  NeumaierSum cum;
  for (int n = 1; n <= n_max; ++n) {
    const auto row = kernel.payload(n);
    double rn = 0.0;
    switch (kernel.model()) {
      case ModelKind::kSrw2d: {
        // sum_x q_n(x)^2 factorizes over the rotated axes.
        NeumaierSum s;
        for (double b : row) s.add(b * b);
        rn = s.value() * s.value();
        break;
      }
      case ModelKind::kCauchy1d: {
        NeumaierSum s;
        for (double q : row) s.add(q * q);
        rn = s.value();
        break;
      }
      case ModelKind::kRenewalHalf:
        rn = row[0] * row[0];
        break;
    }
    t.r[n] = rn;
    cum.add(rn);
    t.R[n] = cum.value();
  }
  return t;
}

double beta_schedule(const OverlapTable& overlap, int N, double beta_hat) {
  require(N >= 1 && N <= overlap.horizon(), ErrorKind::kRange,
          "N=" + std::to_string(N) + " outside overlap table horizon " +
              std::to_string(overlap.horizon()));
  require(beta_hat >= 0.0, ErrorKind::kDomain, "beta_hat must be >= 0");
  require(overlap.R[N] > 0.0, ErrorKind::kDomain, "R_N must be positive");
  return beta_hat / std::sqrt(overlap.R[N]);
}

BlockPartition block_boundaries(const OverlapTable& overlap, int N, int M) {
  require(N >= 1 && N <= overlap.horizon(), ErrorKind::kRange,
          "N outside overlap table horizon");
  require(M >= 1 && M <= N, ErrorKind::kDomain, "need 1 <= M <= N");
  int support = 0;
  for (int n = 1; n <= N; ++n) support += overlap.r[n] > 0.0 ? 1 : 0;
  if (M > support) {
    fail(ErrorKind::kDomain, "infeasible partition: M=" + std::to_string(M) +
                                 " exceeds the " + std::to_string(support) +
                                 " steps with positive overlap");
  }
  BlockPartition bp;
  bp.M = M;
  bp.t.assign(M + 1, 0);
  const double RN = overlap.R[N];
  int m = 1;
  for (int i = 1; i < M; ++i) {
    const double level = (static_cast<double>(i) * RN) / M;
    while (m < N && overlap.R[m] < level) ++m;
    bp.t[i] = m;
  }
  bp.t[M] = N;
  return bp;
}

TripleNorm triple_norm_zeta(const OverlapTable& overlap, int N,
                            const SpaceTime& X, const SpaceTime& Xp) {
  require(N >= 1 && N <= overlap.horizon(), ErrorKind::kRange,
          "N outside overlap table horizon");
  const int d = dimension(overlap.model);
  const std::int64_t dt = std::abs(X.t - Xp.t);
  std::int64_t spatial = 0;
  if (d == 2) {
    const std::int64_t a = X.x.x1 - Xp.x.x1;
    const std::int64_t b = X.x.x2 - Xp.x.x2;
    spatial = a * a + b * b;  // ceil(|x|^2) is exact on Z^2
  } else if (d == 1) {
    spatial = std::abs(X.x.x1 - Xp.x.x1);
  }
  TripleNorm out;
  out.norm = std::max(dt, spatial);
  if (out.norm == 0) return out;
  if (out.norm > overlap.horizon()) {
    fail(ErrorKind::kRange, "|||X - X'||| = " + std::to_string(out.norm) +
                                " exceeds overlap horizon " +
                                std::to_string(overlap.horizon()));
  }
  out.zeta = std::clamp(overlap.R[out.norm] / overlap.R[N], 0.0, 1.0);
  return out;
}

double renewal_llt_constant(const LatticeKernel& kernel) {
  require(kernel.model() == ModelKind::kRenewalHalf, ErrorKind::kDomain,
          "renewal constant requested from a walk kernel");
  const int n2 = kernel.n_max();
  const int n1 = std::max(1, n2 / 2);
  const double v2 = std::sqrt(static_cast<double>(n2)) * kernel.mass(n2, {});
  if (n1 == n2) return v2;
  const double v1 = std::sqrt(static_cast<double>(n1)) * kernel.mass(n1, {});
  // sqrt(n) q_n = c + a/n + o(1/n).
  return (n2 * v2 - n1 * v1) / static_cast<double>(n2 - n1);
}

double llt_diagnostic(const LatticeKernel& kernel, int n) {
  require(n >= 1 && n <= kernel.n_max(), ErrorKind::kRange, "llt step");
  const double dn = static_cast<double>(n);
  switch (kernel.model()) {
    case ModelKind::kSrw2d: {
      auto limit = [&](double r2) {
        return 2.0 / std::numbers::pi * std::exp(-r2 / dn);
      };
      double sup = 0.0;
      for (std::int64_t x1 = -n; x1 <= n; ++x1) {
        const std::int64_t rem = n - std::abs(x1);
        for (std::int64_t x2 = -rem; x2 <= rem; ++x2) {
          if (((x1 + x2 + n) & 1) != 0) continue;
          const double r2 = static_cast<double>(x1 * x1 + x2 * x2);
          sup = std::max(sup, std::abs(dn * kernel.mass(n, {x1, x2}) - limit(r2)));
        }
      }
      // Outside the L1 ball the mass is zero; bound the limit there.
      const double outer = 0.5 * (dn + 1.0) * (dn + 1.0);
      return std::max(sup, limit(outer));
    }
    case ModelKind::kCauchy1d: {
      auto g = [](double y) { return 1.0 / (std::numbers::pi * (1.0 + y * y)); };
      const std::int64_t w = kernel.window_radius(n);
      double sup = 0.0;
      for (std::int64_t x = -w; x <= w; ++x) {
        sup = std::max(sup, std::abs(dn * kernel.mass(n, {x, 0}) -
                                     g(static_cast<double>(x) / dn)));
      }
      return std::max(sup, g(static_cast<double>(w + 1) / dn));
    }
    case ModelKind::kRenewalHalf:
      return std::abs(std::sqrt(dn) * kernel.mass(n, {}) -
                      renewal_llt_constant(kernel));
  }
  return 0.0;
}

}  // namespace mrg
