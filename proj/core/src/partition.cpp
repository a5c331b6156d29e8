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

#include "mrg/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>

#include "mrg/error.hpp"
#include "summation.hpp"

namespace mrg {
namespace {

constexpr double kBlowUpLimit = 1e12;

void check_horizon(const LatticeKernel& kernel, int N) {
  require(N >= 1, ErrorKind::kDomain, "N must be >= 1");
  require(N <= kernel.n_max(), ErrorKind::kRange,
          "N=" + std::to_string(N) + " beyond kernel horizon " +
              std::to_string(kernel.n_max()));
}

// Solves d(n) = gamma (w(n) + sum_{m<n} d(m) r_{n-m}) for n in [start, N] and
// returns sum_n d(n). `w` and `r` are indexed from 0.
double chain_sum(const std::vector<double>& r, const std::vector<double>& w,
                 double gamma, int N, int start, std::vector<double>* out = nullptr) {
  std::vector<double> d(N + 1, 0.0);
  if (gamma == 0.0 || start > N) {
    if (out) *out = std::move(d);
    return 0.0;
  }
  // rr[j] = r[N - j] so that r[n - m] = rr[N - n + m] streams forward in m.
  std::vector<double> rr(N + 1);
  for (int j = 0; j <= N; ++j) rr[j] = r[N - j];
  NeumaierSum total;
  for (int n = start; n <= N; ++n) {
    const double* rp = rr.data() + (N - n);
    const double* dp = d.data();
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (int m = start; m < n; ++m) acc += dp[m] * rp[m];
    d[n] = gamma * (w[n] + acc);
    total.add(d[n]);
    if (!(total.value() < kBlowUpLimit)) {
      std::ostringstream os;
      os << "second-moment chain sum exceeded " << kBlowUpLimit << " at n=" << n
         << " (gamma=" << gamma << ")";
      fail(ErrorKind::kBlowUp, os.str());
    }
  }
  if (out) *out = std::move(d);
  return total.value();
}

// sum_i b_a(i) b_b(i + s) over binomial rows.
double row_correlation(std::span<const double> ba, std::span<const double> bb,
                       std::int64_t s) {
  const std::int64_t a = static_cast<std::int64_t>(ba.size()) - 1;
  const std::int64_t b = static_cast<std::int64_t>(bb.size()) - 1;
  const std::int64_t lo = std::max<std::int64_t>(0, -s);
  const std::int64_t hi = std::min(a, b - s);
  double acc = 0.0;
  for (std::int64_t i = lo; i <= hi; ++i) acc += ba[i] * bb[i + s];
  return acc;
}

double check_beta(const EtaParams& eta) {
  require(eta.beta >= 0.0, ErrorKind::kDomain, "beta must be >= 0");
  return eta.beta;
}

void check_budget(std::size_t bytes, std::size_t budget, const char* what) {
  if (bytes > budget) {
    std::ostringstream os;
    os << what << " needs " << bytes << " bytes, budget " << budget;
    fail(ErrorKind::kSizing, os.str());
  }
}

}  // namespace

bool PartitionSurface::covers(Site x, std::int64_t t) const {
  if (t < 0 || t > N) return false;
  const int d = dimension(model);
  if (d == 0) return true;
  if (std::abs(x.x1) > radius) return false;
  if (d == 2 && std::abs(x.x2) > radius) return false;
  if (d == 1 && x.x2 != 0) return false;
  return true;
}

std::size_t PartitionSurface::index(Site x, std::int64_t t) const {
  const int d = dimension(model);
  const std::int64_t s = side();
  std::int64_t cell = 0;
  if (d == 1) cell = x.x1 + radius;
  if (d == 2) cell = (x.x1 + radius) * s + (x.x2 + radius);
  const std::int64_t plane = d == 2 ? s * s : (d == 1 ? s : 1);
  return static_cast<std::size_t>(t * plane + cell);
}

double PartitionSurface::at(Site x, std::int64_t t) const {
  if (!covers(x, t)) {
    std::ostringstream os;
    os << "point (" << x.x1 << "," << x.x2 << "; t=" << t
       << ") outside surface (radius " << radius << ", N " << N << ")";
    fail(ErrorKind::kCoverage, os.str());
  }
  if (t == N) return 1.0;
  return values[index(x, t)];
}

PartitionSurface polymer_Z_all_starts(const LatticeKernel& kernel,
                                      const DisorderField& field,
                                      const EtaParams& eta, int N,
                                      const PolymerOptions& options) {
  require(kernel.model() != ModelKind::kRenewalHalf, ErrorKind::kDomain,
          "polymer sweep needs a walk kernel");
  require(N >= 1, ErrorKind::kDomain, "N must be >= 1");
  require(options.region_radius >= 0, ErrorKind::kDomain, "region radius must be >= 0");
  check_beta(eta);

  PartitionSurface s;
  s.model = kernel.model();
  s.N = N;
  s.beta = eta.beta;
  s.radius = options.region_radius;
  const std::int64_t A = s.radius;

  if (kernel.model() == ModelKind::kSrw2d) {
    const std::int64_t side_max = 2 * (A + N) + 1;
    const std::size_t surface_bytes =
        sizeof(double) * static_cast<std::size_t>(N) * s.side() * s.side();
    const std::size_t layer_bytes =
        3 * sizeof(double) * static_cast<std::size_t>(side_max * side_max);
    check_budget(surface_bytes + layer_bytes, options.memory_budget_bytes,
                 "SRW2D partition surface");
    s.values.assign(static_cast<std::size_t>(N) * s.side() * s.side(), 0.0);

    std::vector<double> zprev;  // Z_{n+1} on |x|_inf <= A + n + 1
    std::vector<double> g;
    std::vector<double> znew;
    for (int n = N - 1; n >= 0; --n) {
      const std::int64_t L = A + n;
      const std::int64_t Lp = L + 1;
      const std::int64_t sp = 2 * Lp + 1;
      g.resize(static_cast<std::size_t>(sp * sp));
      for (std::int64_t y1 = -Lp; y1 <= Lp; ++y1) {
        for (std::int64_t y2 = -Lp; y2 <= Lp; ++y2) {
          const std::size_t k = static_cast<std::size_t>((y1 + Lp) * sp + (y2 + Lp));
          const double z = (n + 1 == N) ? 1.0 : zprev[k];
          g[k] = field_xi(field, eta, n + 1, {y1, y2}) * z;
        }
      }
      const std::int64_t sn = 2 * L + 1;
      znew.assign(static_cast<std::size_t>(sn * sn), 0.0);
      for (std::int64_t x1 = -L; x1 <= L; ++x1) {
        const double* row = g.data() + (x1 + Lp) * sp + Lp;
        const double* up = row + sp;
        const double* dn = row - sp;
        double* out = znew.data() + (x1 + L) * sn + L;
        for (std::int64_t x2 = -L; x2 <= L; ++x2) {
          out[x2] = 0.25 * ((up[x2] + dn[x2]) + (row[x2 + 1] + row[x2 - 1]));
        }
      }
      for (std::int64_t x1 = -A; x1 <= A; ++x1) {
        for (std::int64_t x2 = -A; x2 <= A; ++x2) {
          s.values[s.index({x1, x2}, n)] = znew[(x1 + L) * sn + (x2 + L)];
        }
      }
      zprev.swap(znew);
    }
    return s;
  }

  // CAUCHY1D on a fixed window |x| <= A + W.
  std::int64_t W = options.window_override;
  if (W < 0) {
    check_horizon(kernel, N);
    W = kernel.window_radius(N);
    s.window_bias_bound = N * kernel.tail_tol();
  } else {
    s.window_bias_bound = std::numeric_limits<double>::quiet_NaN();
  }
  const std::int64_t L = A + W;
  s.window = L;
  const std::int64_t sw = 2 * L + 1;
  check_budget(sizeof(double) * static_cast<std::size_t>(N * s.side() + 6 * sw),
               options.memory_budget_bytes, "CAUCHY1D partition surface");
  s.values.assign(static_cast<std::size_t>(N) * s.side(), 0.0);

  const double c = LatticeKernel::cauchy_normalizer();
  // pfull[k + 2L] = p(k) for |k| <= 2L.
  std::vector<double> pfull(2 * sw - 1);
  for (std::int64_t k = -2 * L; k <= 2 * L; ++k) {
    const double x = static_cast<double>(k);
    pfull[k + 2 * L] = c / (1.0 + x * x);
  }
  // tail[k] = sum_{j > k} p(j), from the closed form of the full series.
  std::vector<double> tail(2 * L + 1);
  {
    NeumaierSum prefix;
    const double half = 0.5 * (std::numbers::pi / std::tanh(std::numbers::pi) - 1.0);
    for (std::int64_t k = 0; k <= 2 * L; ++k) {
      if (k > 0) {
        const double x = static_cast<double>(k);
        prefix.add(1.0 / (1.0 + x * x));
      }
      tail[k] = c * (half - prefix.value());
    }
  }
  std::vector<double> out_mass(sw);
  for (std::int64_t x = -L; x <= L; ++x) out_mass[x + L] = tail[L - x] + tail[L + x];

  std::vector<double> z(sw, 1.0);
  std::vector<double> g(sw);
  for (int n = N - 1; n >= 0; --n) {
    for (std::int64_t y = -L; y <= L; ++y) {
      g[y + L] = field_xi(field, eta, n + 1, {y, 0}) * z[y + L];
    }
    for (std::int64_t x = -L; x <= L; ++x) {
      // p(y - x) for y = -L..L lives at pfull[(y - x) + 2L].
      const double* pk = pfull.data() + (L - x);
      const double* gp = g.data();
      double acc = 0.0;
#pragma omp simd reduction(+ : acc)
      for (std::int64_t j = 0; j < sw; ++j) acc += pk[j] * gp[j];
      z[x + L] = out_mass[x + L] + acc;
    }
    for (std::int64_t x = -A; x <= A; ++x) s.values[s.index({x, 0}, n)] = z[x + L];
  }
  return s;
}

PartitionSurface pinning_Z_all_starts(const LatticeKernel& kernel,
                                      const DisorderField& field,
                                      const EtaParams& eta, int N) {
  require(kernel.model() == ModelKind::kRenewalHalf, ErrorKind::kDomain,
          "pinning sweep needs the renewal kernel");
  check_horizon(kernel, N);
  check_beta(eta);

  PartitionSurface s;
  s.model = ModelKind::kRenewalHalf;
  s.N = N;
  s.beta = eta.beta;
  s.values.assign(N, 0.0);

  const auto f = kernel.interarrival_table();
  const auto S = kernel.survival_table();
  // G[s] = xi(s) Z(s) for s in (t, N].
  std::vector<double> G(N + 1, 0.0);
  G[N] = field_xi(field, eta, N, {});
  for (int t = N - 1; t >= 0; --t) {
    const int len = N - t;
    const double* fp = f.data() + 1;
    const double* gp = G.data() + t + 1;
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (int m = 0; m < len; ++m) acc += fp[m] * gp[m];
    const double z = S[len] + acc;
    s.values[t] = z;
    if (t >= 1) G[t] = field_xi(field, eta, t, {}) * z;
  }
  return s;
}

PartitionSurface partition_surface(const LatticeKernel& kernel,
                                   const DisorderField& field,
                                   const EtaParams& eta, int N,
                                   const PolymerOptions& options) {
  if (kernel.model() == ModelKind::kRenewalHalf) {
    return pinning_Z_all_starts(kernel, field, eta, N);
  }
  return polymer_Z_all_starts(kernel, field, eta, N, options);
}

std::vector<double> second_moment_profile(const OverlapTable& overlap,
                                          double gamma, int N) {
  require(N >= 0 && N <= overlap.horizon(), ErrorKind::kRange,
          "N outside overlap table horizon");
  require(gamma >= 0.0, ErrorKind::kDomain, "gamma must be >= 0");
  std::vector<double> d;
  chain_sum(overlap.r, overlap.r, gamma, N, 1, &d);
  std::vector<double> profile(N + 1, 1.0);
  NeumaierSum acc;
  acc.add(1.0);
  for (int n = 1; n <= N; ++n) {
    acc.add(d[n]);
    profile[n] = acc.value();
  }
  return profile;
}

double second_moment_exact(const OverlapTable& overlap, double gamma, int N) {
  require(N >= 0 && N <= overlap.horizon(), ErrorKind::kRange,
          "N outside overlap table horizon");
  require(gamma >= 0.0, ErrorKind::kDomain, "gamma must be >= 0");
  return 1.0 + chain_sum(overlap.r, overlap.r, gamma, N, 1);
}

double second_moment_exact(const OverlapTable& overlap, const EtaParams& eta, int N) {
  return second_moment_exact(overlap, eta.gamma(), N);
}

std::vector<double> meeting_weights(const LatticeKernel& kernel, int N,
                                    const SpaceTime& X, const SpaceTime& Xp) {
  check_horizon(kernel, N);
  require(X.t >= 0 && Xp.t >= 0 && X.t < N && Xp.t < N, ErrorKind::kDomain,
          "start times must lie in [0, N)");
  std::vector<double> w(N + 1, 0.0);
  const std::int64_t t0 = std::max(X.t, Xp.t);
  switch (kernel.model()) {
    case ModelKind::kRenewalHalf:
      for (std::int64_t n = t0 + 1; n <= N; ++n) {
        w[n] = kernel.mass(static_cast<int>(n - X.t), {}) *
               kernel.mass(static_cast<int>(n - Xp.t), {});
      }
      break;
    case ModelKind::kSrw2d: {
      // sum_y q_a(y) q_b(y - D) factorizes over u = y1 + y2 and v = y1 - y2.
      const std::int64_t du = (Xp.x.x1 - X.x.x1) + (Xp.x.x2 - X.x.x2);
      const std::int64_t dv = (Xp.x.x1 - X.x.x1) - (Xp.x.x2 - X.x.x2);
      for (std::int64_t n = t0 + 1; n <= N; ++n) {
        const std::int64_t a = n - X.t;
        const std::int64_t b = n - Xp.t;
        const std::int64_t su = b - a - du;
        if ((su & 1) != 0) continue;
        const auto ra = kernel.payload(static_cast<int>(a));
        const auto rb = kernel.payload(static_cast<int>(b));
        const double cu = row_correlation(ra, rb, su / 2);
        if (cu == 0.0) continue;
        w[n] = cu * row_correlation(ra, rb, (b - a - dv) / 2);
      }
      break;
    }
    case ModelKind::kCauchy1d: {
      const std::int64_t D = Xp.x.x1 - X.x.x1;
      for (std::int64_t n = t0 + 1; n <= N; ++n) {
        const int a = static_cast<int>(n - X.t);
        const int b = static_cast<int>(n - Xp.t);
        const auto qa = kernel.payload(a);
        const auto qb = kernel.payload(b);
        const std::int64_t Wa = kernel.window_radius(a);
        const std::int64_t Wb = kernel.window_radius(b);
        // sum_y q_a(y) q_b(y - D), y in [-Wa, Wa] and y - D in [-Wb, Wb].
        const std::int64_t lo = std::max(-Wa, D - Wb);
        const std::int64_t hi = std::min(Wa, D + Wb);
        double acc = 0.0;
        for (std::int64_t y = lo; y <= hi; ++y) acc += qa[y + Wa] * qb[y - D + Wb];
        w[n] = acc;
      }
      break;
    }
  }
  return w;
}

double cross_moment_exact(const LatticeKernel& kernel, const OverlapTable& overlap,
                          const EtaParams& eta, int N, const SpaceTime& X,
                          const SpaceTime& Xp) {
  require(N <= overlap.horizon(), ErrorKind::kRange, "N outside overlap table horizon");
  const auto w = meeting_weights(kernel, N, X, Xp);
  const int start = static_cast<int>(std::max(X.t, Xp.t)) + 1;
  return 1.0 + chain_sum(overlap.r, w, eta.gamma(), N, start);
}

bool FieldWeight::in_support(double x1, double x2, double t, int d) const {
  if (t < t_lo || t > t_hi) return false;
  if (d >= 1 && (x1 < lo[0] || x1 > hi[0])) return false;
  if (d >= 2 && (x2 < lo[1] || x2 > hi[1])) return false;
  return true;
}

double FieldWeight::operator()(double x1, double x2, double t, int d) const {
  if (!fn || !in_support(x1, x2, t, d)) return 0.0;
  return fn(x1, x2, t);
}

FieldWeight FieldWeight::zero() {
  FieldWeight w;
  w.fn = [](double, double, double) { return 0.0; };
  return w;
}

FieldWeight FieldWeight::constant(double value, double half_width) {
  FieldWeight w;
  w.fn = [value](double, double, double) { return value; };
  w.lo = {-half_width, -half_width};
  w.hi = {half_width, half_width};
  return w;
}

std::int64_t field_support_radius(ModelKind model, int N, const FieldWeight& psi) {
  const int d = dimension(model);
  if (d == 0) return 0;
  const double phi = d == 2 ? std::sqrt(static_cast<double>(N)) : static_cast<double>(N);
  double extent = std::max(std::abs(psi.lo[0]), std::abs(psi.hi[0]));
  if (d == 2) extent = std::max({extent, std::abs(psi.lo[1]), std::abs(psi.hi[1])});
  return static_cast<std::int64_t>(std::floor(extent * phi));
}

double field_functional_J(const PartitionSurface& surface,
                          const OverlapTable& overlap, const FieldWeight& psi) {
  const int N = surface.N;
  require(N >= 1 && N <= overlap.horizon(), ErrorKind::kRange,
          "surface horizon outside overlap table");
  const int d = dimension(surface.model);
  const std::int64_t need = field_support_radius(surface.model, N, psi);
  if (need > surface.radius) {
    std::ostringstream os;
    os << "psi support needs |x|_inf <= " << need << " for t in [0, " << N
       << "), surface covers radius " << surface.radius;
    fail(ErrorKind::kCoverage, os.str());
  }
  const double dN = static_cast<double>(N);
  const double phi = d == 2 ? std::sqrt(dN) : (d == 1 ? dN : 1.0);
  const double phi_d = d == 0 ? 1.0 : std::pow(phi, d);
  const double scale = std::sqrt(overlap.R[N]) / (phi_d * dN);

  NeumaierSum acc;
  const std::int64_t r = d == 0 ? 0 : need;
  for (int t = 0; t < N; ++t) {
    const double tt = t / dN;
    if (tt < psi.t_lo || tt > psi.t_hi) continue;
    for (std::int64_t x1 = -r; x1 <= r; ++x1) {
      const std::int64_t r2 = d == 2 ? r : 0;
      for (std::int64_t x2 = -r2; x2 <= r2; ++x2) {
        const double w = psi(x1 / phi, x2 / phi, tt, d);
        if (w == 0.0) continue;
        acc.add((surface.at({x1, x2}, t) - 1.0) * w);
      }
    }
  }
  return scale * acc.value();
}

double field_variance_exact(const LatticeKernel& kernel, const OverlapTable& overlap,
                            const EtaParams& eta, int N, const FieldWeight& psi) {
  require(kernel.model() == ModelKind::kRenewalHalf, ErrorKind::kDomain,
          "exact field variance is implemented for d = 0");
  check_horizon(kernel, N);
  require(N <= overlap.horizon(), ErrorKind::kRange, "N outside overlap table horizon");
  const double dN = static_cast<double>(N);
  std::vector<double> weight(N);
  for (int t = 0; t < N; ++t) weight[t] = psi(0.0, 0.0, t / dN, 0);
  // q in reversed order so a(n) = sum_t psi_t q_{n-t} streams forward.
  std::vector<double> qrev(N + 1);
  for (int j = 0; j <= N; ++j) qrev[j] = kernel.mass(N - j, {});
  std::vector<double> w(N + 1, 0.0);
  for (int n = 1; n <= N; ++n) {
    const double* qp = qrev.data() + (N - n);
    double a = 0.0;
#pragma omp simd reduction(+ : a)
    for (int t = 0; t < n; ++t) a += weight[t] * qp[t];
    w[n] = a * a;
  }
  const double total = chain_sum(overlap.r, w, eta.gamma(), N, 1);
  return overlap.R[N] / (dN * dN) * total;
}

}  // namespace mrg
