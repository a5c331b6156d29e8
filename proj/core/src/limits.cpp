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

#include "mrg/limits.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "mrg/chaos.hpp"
#include "mrg/error.hpp"
#include "mrg/parallel.hpp"
#include "mrg/rng.hpp"
#include "summation.hpp"

namespace mrg {
namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
using TanhSinh = boost::math::quadrature::tanh_sinh<double>;
constexpr unsigned kMaxDepth = 15;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_beta_hat(double beta_hat) {
  require(beta_hat >= 0.0, ErrorKind::kDomain, "beta_hat must be >= 0");
  if (beta_hat >= 1.0) {
    fail(ErrorKind::kDomain, "beta_hat = " + std::to_string(beta_hat) +
                                 " is in the strong-disorder regime (>= 1)");
  }
}

double g_density(int d, double r2) {
  if (d == 2) return std::exp(-0.5 * r2) / (2.0 * std::numbers::pi);
  return 1.0 / (std::numbers::pi * (1.0 + r2));
}

// Antiderivative of c^2 / (sqrt(s - t1) sqrt(s - t2)) up to the factor c^2.
double pinning_primitive(double s, double t1, double t2) {
  return 2.0 * std::log(std::sqrt(std::max(s - t1, 0.0)) + std::sqrt(std::max(s - t2, 0.0)));
}

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

template <unsigned N>
Rule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& wt = G::weights();
  Rule r;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      r.x.push_back(0.0);
      r.w.push_back(wt[i]);
    } else {
      r.x.push_back(a[i]);
      r.w.push_back(wt[i]);
      r.x.push_back(-a[i]);
      r.w.push_back(wt[i]);
    }
  }
  return r;
}

// Gauss-Legendre rules on [-1, 1] for the orders used by the tensor scheme.
Rule legendre_rule(int n) {
  switch (n) {
    case 3: return make_rule<3>();
    case 4: return make_rule<4>();
    case 5: return make_rule<5>();
    case 6: return make_rule<6>();
    case 7: return make_rule<7>();
    case 8: return make_rule<8>();
    case 9: return make_rule<9>();
    case 12: return make_rule<12>();
    case 13: return make_rule<13>();
    case 16: return make_rule<16>();
    case 17: return make_rule<17>();
    case 24: return make_rule<24>();
    case 25: return make_rule<25>();
    case 32: return make_rule<32>();
    case 33: return make_rule<33>();
    default: break;
  }
  fail(ErrorKind::kDomain, "no Gauss-Legendre rule of order " + std::to_string(n));
}

// Integral of psi(p) psi(p + D) K(p, p + D) over p and the offset D, for
// m = d + 1 coordinates (x..., t). For fixed D the p-range is the box
// intersection, where the integrand is smooth; the log singularity sits at
// the corner D = 0 of each orthant and is removed by the pyramid map
// u = rho (v, 1) with Jacobian rho^(m-1). Gauss-Legendre of order n in
// every variable, rho = s^2.
double integrate_spatial(const CovKernel& ck, const FieldWeight& psi, int n) {
  const int m = ck.d + 1;
  std::array<double, 3> lo{}, width{};
  for (int j = 0; j < ck.d; ++j) {
    lo[j] = psi.lo[j];
    width[j] = psi.hi[j] - psi.lo[j];
  }
  lo[ck.d] = std::max(0.0, psi.t_lo);
  width[ck.d] = std::min(1.0, psi.t_hi) - lo[ck.d];
  for (int j = 0; j < m; ++j) {
    if (!(width[j] > 0.0)) return 0.0;
  }
  const Rule r = legendre_rule(n);
  std::vector<double> x(r.x.size()), w(r.w.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = 0.5 * (r.x[i] + 1.0);
    w[i] = 0.5 * r.w[i];
  }
  const int q = static_cast<int>(x.size());
  int cells = 1;
  for (int j = 0; j < m; ++j) cells *= q;
  auto point = [&](const std::array<double, 3>& c) {
    return LimitPoint{c[0], ck.d == 2 ? c[1] : 0.0, c[ck.d]};
  };
  auto psi_at = [&](const std::array<double, 3>& c) {
    return psi(c[0], ck.d == 2 ? c[1] : 0.0, c[ck.d], ck.d);
  };

  double box = 1.0;
  for (int j = 0; j < m; ++j) box *= width[j];
  NeumaierSum total;
  // K is symmetric, so the time offset is taken >= 0 and the result doubled.
  for (int mask = 0; mask < (1 << (m - 1)); ++mask) {
    for (int k = 0; k < m; ++k) {
      for (int outer = 0; outer < cells; ++outer) {
        std::array<double, 3> delta{}, a{}, len{};
        int code = outer;
        const double sn = x[code % q];
        double jac = 2.0 * sn * w[code % q];
        code /= q;
        const double rho = sn * sn;
        for (int j = 0; j < m - 1; ++j) jac *= rho;
        for (int j = 0; j < m; ++j) {
          double u = rho;
          if (j != k) {
            u *= x[code % q];
            jac *= w[code % q];
            code /= q;
          }
          const double sign = (j < m - 1 && (mask >> j & 1)) ? -1.0 : 1.0;
          delta[j] = sign * u * width[j];
          len[j] = width[j] - std::abs(delta[j]);
          a[j] = lo[j] + std::max(0.0, -delta[j]);
        }
        double inner = 0.0;
        for (int c = 0; c < cells; ++c) {
          std::array<double, 3> p1{}, p2{};
          double wt = 1.0;
          int ic = c;
          for (int j = 0; j < m; ++j) {
            p1[j] = a[j] + len[j] * x[ic % q];
            p2[j] = p1[j] + delta[j];
            wt *= len[j] * w[ic % q];
            ic /= q;
          }
          const double f = psi_at(p1) * psi_at(p2);
          if (f != 0.0) inner += wt * f * kernel_K(ck, point(p1), point(p2));
        }
        total.add(jac * inner);
      }
    }
  }
  return 2.0 * box * total.value();
}

// Twice the integral over t < s of psi(t) psi(s) K(t, s), in the diagonal
// offset h = s - t. Double-exponential nodes absorb the log singularity at
// h = 0 and the square-root edge at s = 1.
double integrate_pinning(const CovKernel& ck, const FieldWeight& psi, double tol) {
  const double lo = std::max(0.0, psi.t_lo);
  const double hi = std::min(1.0, psi.t_hi);
  auto psi_t = [&](double t) { return psi(0.0, 0.0, t, 0); };
  TanhSinh ts;
  auto inner = [&](double t) {
    const double pt = psi_t(t);
    if (pt == 0.0 || hi - t <= 0.0) return 0.0;
    return pt * ts.integrate(
                    [&](double h) {
                      if (h <= 0.0) return 0.0;
                      const double s = t + h;
                      return psi_t(s) * 2.0 *
                             std::log((std::sqrt(1.0 - t) + std::sqrt(std::max(1.0 - s, 0.0))) /
                                      std::sqrt(h));
                    },
                    0.0, hi - t, tol);
  };
  return 2.0 * ck.c * ck.c * ts.integrate(inner, lo, hi, tol);
}

}  // namespace

double sigma_sq(double beta_hat) {
  check_beta_hat(beta_hat);
  return -std::log1p(-beta_hat * beta_hat);
}

double cov_limit(double beta_hat, double zeta) {
  check_beta_hat(beta_hat);
  require(zeta >= 0.0 && zeta <= 1.0, ErrorKind::kDomain, "zeta must lie in [0, 1]");
  const double b2 = beta_hat * beta_hat;
  return std::log1p(-b2 * zeta) - std::log1p(-b2);
}

double LimitLaw::second_moment() const { return 1.0 / (1.0 - beta_hat * beta_hat); }

LimitLaw make_limit_law(double beta_hat) {
  LimitLaw law;
  law.beta_hat = beta_hat;
  law.sigma_sq = sigma_sq(beta_hat);
  return law;
}

double limit_sample(const LimitLaw& law, std::uint64_t seed, std::uint64_t index) {
  const CounterStream stream(seed, RngDomain::kLimitLaw, 0);
  const double s = std::sqrt(law.sigma_sq);
  return std::exp(s * stream.normal(index) - 0.5 * law.sigma_sq);
}

std::vector<double> limit_samples(const LimitLaw& law, std::uint64_t seed,
                                  std::size_t count) {
  const CounterStream stream(seed, RngDomain::kLimitLaw, 0);
  const double s = std::sqrt(law.sigma_sq);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = std::exp(s * stream.normal(i) - 0.5 * law.sigma_sq);
  }
  return out;
}

double kernel_K(const CovKernel& ck, const LimitPoint& p1, const LimitPoint& p2) {
  require(ck.d >= 0 && ck.d <= 2, ErrorKind::kDomain, "kernel dimension must be 0, 1 or 2");
  if (ck.d == 0) {
    if (p1.t == p2.t) {
      fail(ErrorKind::kDomain, "kernel K diverges on the diagonal t1 = t2");
    }
    const double top = std::max(p1.t, p2.t);
    if (top >= 1.0) return 0.0;
    return ck.c * ck.c *
           (pinning_primitive(1.0, p1.t, p2.t) - pinning_primitive(top, p1.t, p2.t));
  }

  const double dx1 = p1.x1 - p2.x1;
  const double dx2 = ck.d == 2 ? p1.x2 - p2.x2 : 0.0;
  const double r2 = dx1 * dx1 + dx2 * dx2;
  const double a = std::abs(p1.t - p2.t);
  const double b = 2.0 - p1.t - p2.t;
  if (a == 0.0 && r2 == 0.0) {
    fail(ErrorKind::kDomain, "kernel K diverges at coincident points");
  }
  if (b <= a) return 0.0;
  if (r2 == 0.0) return 0.5 * g_density(ck.d, 0.0) * std::log(b / a);

  // In u = log s the integrand is (1/2) g(dx e^{-u/d}).
  const double inv_d = 1.0 / ck.d;
  auto f = [&](double u) {
    const double scale = std::exp(-2.0 * u * inv_d);
    return 0.5 * g_density(ck.d, r2 * scale);
  };
  const double lo = a > 0.0 ? std::log(a) : -kInf;
  double err = 0.0;
  return GK::integrate(f, lo, std::log(b), kMaxDepth, 1e-10, &err);
}

QuadratureResult sigma_psi_quadrature(const CovKernel& ck, const LimitLaw& law,
                                      const FieldWeight& psi,
                                      const QuadratureOptions& options) {
  check_beta_hat(law.beta_hat);
  const double pref = law.beta_hat * law.beta_hat / (1.0 - law.beta_hat * law.beta_hat);
  QuadratureResult out;
  if (!psi.fn || pref == 0.0) return out;

  if (ck.d == 0) {
    const double width = std::min(1.0, psi.t_hi) - std::max(0.0, psi.t_lo);
    if (width <= 0.0) return out;
    const double coarse = integrate_pinning(ck, psi, 1e-1 * options.rel_tol);
    const double fine = integrate_pinning(ck, psi, 1e-3 * options.rel_tol);
    out.value = pref * fine;
    out.error = pref * std::abs(fine - coarse);
    if (out.error > options.rel_tol * std::abs(out.value) && out.error > 1e-14) {
      std::ostringstream os;
      os.precision(17);
      os << "sigma_psi quadrature did not converge: " << out.value << " +- " << out.error;
      fail(ErrorKind::kQuadrature, os.str());
    }
  } else {
    const std::vector<int> orders = ck.d == 1 ? std::vector<int>{4, 6, 8, 12, 16}
                                              : std::vector<int>{3, 4, 6, 8, 12};
    double prev = std::numeric_limits<double>::quiet_NaN();
    double cur = prev;
    bool converged = false;
    const int levels = std::min<int>(options.max_level, static_cast<int>(orders.size()));
    for (int level = 0; level < levels; ++level) {
      const int n = orders[level];
      const double v = integrate_spatial(ck, psi, n);
      prev = cur;
      cur = v;
      if (level > 0 && std::abs(cur - prev) <= options.rel_tol_spatial * std::abs(cur)) {
        converged = true;
        break;
      }
    }
    out.value = pref * cur;
    out.error = pref * std::abs(cur - prev);
    if (!converged) {
      std::ostringstream os;
      os.precision(17);
      os << "sigma_psi tensor quadrature did not converge; last two iterates "
         << pref * prev << ", " << pref * cur;
      fail(ErrorKind::kQuadrature, os.str());
    }
  }
  if (out.value < -out.error - 1e-14) {
    fail(ErrorKind::kNumeric, "sigma_psi quadrature returned a negative variance");
  }
  return out;
}

double block_limit_second_moment(int M, double beta_hat, int K) {
  require(M >= 1 && K >= 0, ErrorKind::kDomain, "need M >= 1, K >= 0");
  NeumaierSum s;
  s.add(1.0);
  const double b2 = beta_hat * beta_hat;
  double bk = 1.0;
  double mk = 1.0;
  for (int k = 1; k <= K; ++k) {
    bk *= b2;
    mk *= M;
    s.add(bk * sharp_count(M, k) / mk);
  }
  return s.value();
}

BlockLimitSampler::BlockLimitSampler(int M, double beta_hat, int K, std::size_t term_cap)
    : M_(M), beta_hat_(beta_hat), K_(K) {
  check_beta_hat(beta_hat);
  require(M >= 1 && M <= 62, ErrorKind::kDomain, "block limit sampler needs 1 <= M <= 62");
  require(K >= 0, ErrorKind::kDomain, "K must be >= 0");
  double total = 0.0;
  for (int k = 1; k <= K; ++k) total += sharp_count(M, k);
  if (total > static_cast<double>(term_cap)) {
    std::ostringstream os;
    os << "block limit sampler at M=" << M << ", K=" << K << " needs " << total
       << " sharp sequences, cap " << term_cap;
    fail(ErrorKind::kCombinatorial, os.str());
  }
  terms_ = static_cast<std::size_t>(total);

  // Build the trie of dominated pieces by walking every sharp sequence once.
  const int stride = M + 1;
  child_.assign(stride, -1);
  nodes_ = 1;  // node 0 is the root
  std::vector<char> blocked(M + 2, 0);
  std::function<void(int, int, int)> build = [&](int depth, int rm, int node) {
    if (depth == K) return;
    for (int v = 1; v <= M; ++v) {
      if (blocked[v]) continue;
      const int parent = v > rm ? 0 : node;
      std::int32_t& slot = child_[static_cast<std::size_t>(parent) * stride + v];
      if (slot < 0) {
        slot = static_cast<std::int32_t>(nodes_++);
        child_.resize(nodes_ * stride, -1);
      }
      const int next = child_[static_cast<std::size_t>(parent) * stride + v];
      ++blocked[v - 1];
      ++blocked[v];
      ++blocked[v + 1];
      build(depth + 1, std::max(rm, v), next);
      --blocked[v - 1];
      --blocked[v];
      --blocked[v + 1];
    }
  };
  build(0, 0, 0);
}

double BlockLimitSampler::sample(std::uint64_t seed, std::uint64_t index) const {
  if (K_ == 0 || beta_hat_ == 0.0) return 1.0;
  const CounterStream stream(seed, RngDomain::kBlockLimit, index);
  std::vector<double> zeta(nodes_);
  for (std::size_t n = 1; n < nodes_; ++n) zeta[n] = stream.normal(n);

  const int stride = M_ + 1;
  std::vector<double> order_sum(K_ + 1, 0.0);
  std::vector<char> blocked(M_ + 2, 0);
  // P is the product of zeta over completed dominated pieces.
  std::function<void(int, int, int, double)> dfs = [&](int depth, int rm, int node,
                                                       double P) {
    for (int v = 1; v <= M_; ++v) {
      if (blocked[v]) continue;
      int next;
      double nP;
      if (v > rm) {
        nP = depth == 0 ? 1.0 : P * zeta[node];
        next = child_[v];
      } else {
        nP = P;
        next = child_[static_cast<std::size_t>(node) * stride + v];
      }
      order_sum[depth + 1] += nP * zeta[next];
      if (depth + 1 < K_) {
        ++blocked[v - 1];
        ++blocked[v];
        ++blocked[v + 1];
        dfs(depth + 1, std::max(rm, v), next, nP);
        --blocked[v - 1];
        --blocked[v];
        --blocked[v + 1];
      }
    }
  };
  dfs(0, 0, 0, 1.0);

  NeumaierSum z;
  z.add(1.0);
  const double step = beta_hat_ / std::sqrt(static_cast<double>(M_));
  double w = 1.0;
  for (int k = 1; k <= K_; ++k) {
    w *= step;
    z.add(w * order_sum[k]);
  }
  return z.value();
}

std::vector<double> BlockLimitSampler::samples(std::uint64_t seed, std::size_t count,
                                               int threads) const {
  return parallel_map(count, threads, [&](std::size_t i) { return sample(seed, i); });
}

double block_limit_sampler(int M, double beta_hat, int K, std::uint64_t seed,
                           std::uint64_t index) {
  return BlockLimitSampler(M, beta_hat, K).sample(seed, index);
}

}  // namespace mrg
