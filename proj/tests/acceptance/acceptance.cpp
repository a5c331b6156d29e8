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


// Acceptance run: one PASS/FAIL line per criterion. Arguments select a
// subset of criteria by number; no arguments runs all nine.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mrg/chaos.hpp"
#include "mrg/error.hpp"
#include "mrg/harness.hpp"
#include "mrg/limits.hpp"
#include "mrg/parallel.hpp"
#include "mrg/partition.hpp"
#include "mrg/rng.hpp"
#include "mrg/she.hpp"
#include "mrg/stats.hpp"
#include "support/oracles.hpp"

namespace mrg {
namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail] " << what << "; ";
    }
  }
  void note(const std::string& what) { detail << what << "; "; }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

DisorderField gaussian(std::uint64_t seed, std::uint64_t r, FieldMode mode = FieldMode::kOmega) {
  return {seed, r, DisorderLaw::kGaussian, mode};
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

std::string join(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i]);
  return s + "]";
}

// 1. DP equals exhaustive enumeration for N <= 6 on all three models.
void criterion_oracles(Outcome& out) {
  const int seeds = 20;
  double worst = 0.0;
  for (int N : {1, 3, 6}) {
    const auto srw = build_kernel(ModelKind::kSrw2d, N, 1e-6);
    const auto cau = build_kernel(ModelKind::kCauchy1d, N, 1e-1);
    const auto ren = build_kernel(ModelKind::kRenewalHalf, N, 1e-6);
    for (int s = 0; s < seeds; ++s) {
      const auto eta = make_eta_params(DisorderLaw::kGaussian, 0.3 + 0.02 * s);
      const auto f = gaussian(1000 + s, s);
      PolymerOptions po;
      po.region_radius = 1;
      const auto zs = polymer_Z_all_starts(srw, f, eta, N, po);
      for (int t = 0; t < N; ++t) {
        worst = std::max(worst, std::abs(zs.at({1, 0}, t) -
                                         oracle::srw2d_by_paths(f, eta, N, {1, 0}, t)));
      }
      PolymerOptions pc;
      pc.window_override = 2;
      const auto zc = polymer_Z_all_starts(cau, f, eta, N, pc);
      for (int t = 0; t < N; ++t) {
        worst = std::max(worst, std::abs(zc.at({0, 0}, t) -
                                         oracle::cauchy_by_paths(f, eta, N, 0, t, zc.window)));
      }
      const auto zp = pinning_Z_all_starts(ren, f, eta, N);
      for (int t = 0; t < N; ++t) {
        worst = std::max(worst, std::abs(zp.at(t) - oracle::pinning_by_subsets(f, eta, N, t)));
      }
    }
  }
  out.note("max |DP - enumeration| = " + fmt(worst) + " over N in {1,3,6}, 20 seeds, 3 models");
  out.check(worst <= 1e-10, "enumeration mismatch above 1e-10");
}

// 2. Exact second moment at beta_hat = 0.5 approaches 4/3 with strictly
// decreasing gap; the chaos-order split reproduces it to 1e-10.
void criterion_second_moment(Outcome& out) {
  const double bh = 0.5;
  const double target = 1.0 / (1.0 - bh * bh);
  for (auto [model, top] : {std::pair{ModelKind::kRenewalHalf, 16}, std::pair{ModelKind::kSrw2d, 12}}) {
    const int n_max = 1 << top;
    const auto o = overlap_table(build_kernel(model, n_max, 1e-6));
    const auto table = chain_order_table(o, n_max, 28);
    std::vector<double> gaps;
    double worst_split = 0.0;
    int worst_k = 0;
    for (int e = 6; e <= top; ++e) {
      const int N = 1 << e;
      const auto eta = make_eta_params(DisorderLaw::kGaussian, beta_schedule(o, N, bh));
      const double m2 = second_moment_exact(o, eta, N);
      gaps.push_back(std::abs(m2 - target));
      const auto split = second_moment_by_order(table, o, eta.gamma(), N, 1e-12);
      worst_split = std::max(worst_split, std::abs(split.value - m2));
      worst_k = std::max(worst_k, split.K);
      out.check(split.tail_bound < 1e-12,
                std::string(to_string(model)) + " order split tail bound " + fmt(split.tail_bound));
    }
    out.note(std::string(to_string(model)) + " gaps " + join(gaps) + ", split diff " +
             fmt(worst_split) + " (K <= " + std::to_string(worst_k) + ")");
    out.check(strictly_decreasing(gaps), std::string(to_string(model)) + " gap not decreasing");
    out.check(worst_split <= 1e-10, std::string(to_string(model)) + " order split mismatch");
  }
}

// 3. d = 0 distributional limit.
void criterion_single_point(Outcome& out) {
  const std::vector<int> grid = {1 << 10, 1 << 12, 1 << 14};
  const auto k = build_kernel(ModelKind::kRenewalHalf, grid.back(), 1e-6);
  const auto o = overlap_table(k);
  const std::size_t S = 5000;
  for (double bh : {0.25, 0.5}) {
    std::vector<double> ks;
    for (int N : grid) {
      // Same seed at every N: realization s shares its disorder across N.
      const auto z = sample_origin(k, o, DisorderLaw::kGaussian, FieldMode::kOmega, 3, N, bh, S, 0);
      const auto s = summarize_samples(z, ModelKind::kRenewalHalf, N, bh, 0.5, kMinBatches);
      const std::string tag = "b=" + fmt(bh) + " N=" + std::to_string(N);
      out.check(std::abs(s.mean_Z - 1.0) <= 4 * s.se_mean_Z,
                tag + " mean " + fmt(s.mean_Z) + " se " + fmt(s.se_mean_Z));
      const double exact_var =
          second_moment_exact(o, make_eta_params(DisorderLaw::kGaussian, beta_schedule(o, N, bh)),
                              N) -
          1.0;
      out.check(std::abs(s.var_Z - exact_var) <= 4 * s.se_var_Z,
                tag + " var " + fmt(s.var_Z) + " exact " + fmt(exact_var) + " se " + fmt(s.se_var_Z));
      out.note(tag + " mean " + fmt(s.mean_Z) + " var " + fmt(s.var_Z) + " exact " +
               fmt(exact_var));
      ks.push_back(s.ks_lognormal);
    }
    out.note("b=" + fmt(bh) + " KS " + join(ks));
    out.check(strictly_decreasing(ks), "b=" + fmt(bh) + " KS not decreasing");
  }
}

// 4. Multi-point covariance: exact cross moments trend to the limit; Monte
// Carlo covariance of logs inside the limit band at the largest N.
void criterion_multipoint(Outcome& out) {
  const double bh = 0.5;
  const std::vector<double> zetas = {0.25, 0.5, 0.75};
  for (auto [model, lo, hi] : {std::tuple{ModelKind::kRenewalHalf, 8, 14},
                               std::tuple{ModelKind::kSrw2d, 6, 10}}) {
    const auto k = build_kernel(model, 1 << hi, 1e-6);
    const auto o = overlap_table(k);
    for (double zeta : zetas) {
      std::vector<double> gaps;
      for (int e = lo; e <= hi; ++e) {
        const int N = 1 << e;
        const auto L = layout_for_zeta(o, N, zeta);
        // The limit is taken at the zeta the lattice layout realizes.
        const double target = (1 - bh * bh * L.zeta) / (1 - bh * bh);
        const auto eta = make_eta_params(DisorderLaw::kGaussian, beta_schedule(o, N, bh));
        gaps.push_back(std::abs(cross_moment_exact(k, o, eta, N, L.X, L.Xp) - target));
      }
      const std::string tag = std::string(to_string(model)) + " zeta=" + fmt(zeta);
      out.note(tag + " gaps " + join(gaps));
      out.check(strictly_decreasing(gaps), tag + " cross-moment gap not decreasing");
    }
  }

  const int N = 1 << 12;
  const auto k = build_kernel(ModelKind::kRenewalHalf, N, 1e-6);
  const auto o = overlap_table(k);
  std::vector<ZetaLayout> layouts;
  std::vector<SpaceTime> points = {SpaceTime{}};
  for (double zeta : zetas) {
    layouts.push_back(layout_for_zeta(o, N, zeta));
    points.push_back(layouts.back().Xp);
  }
  const std::size_t S = 5000;
  const auto samples = parallel_map(S, 0, [&](std::size_t r) {
    return sample_partition(k, o, gaussian(4, r), N, bh, points);
  });
  const auto cov = covariance_of_logs(samples);
  for (std::size_t j = 0; j < layouts.size(); ++j) {
    const double z = layouts[j].zeta;
    const double band_lo = cov_limit(bh, z);
    const double band_hi = cov_limit(bh, std::max(0.0, z - 0.05));
    const double c = cov.at(0, j + 1);
    const double se = cov.se_at(0, j + 1);
    const std::string tag = "MC zeta=" + fmt(z) + " cov " + fmt(c) + " se " + fmt(se) +
                            " band [" + fmt(band_lo) + ", " + fmt(band_hi) + "]";
    out.note(tag);
    out.check(c >= band_lo - 3 * se && c <= band_hi + 3 * se, tag);
  }
  out.check(cov.filtered == 0, "nonpositive samples in covariance run");
}

// 5. Block variables are close to i.i.d. standard Gaussians.
void criterion_theta(Outcome& out) {
  const int N = 1 << 14;
  const int M = 4;
  const auto k = build_kernel(ModelKind::kRenewalHalf, N, 1e-6);
  const auto o = overlap_table(k);
  const auto blocks = block_boundaries(o, N, M);
  const auto eta = make_eta_params(DisorderLaw::kGaussian, FieldMode::kDirectEta, 0.0);
  const std::vector<IndexSequence> seqs = {{1}, {2}, {3}, {4}, {3, 1}};
  const std::size_t S = 5000;
  const auto th = parallel_map(S, 0, [&](std::size_t r) {
    std::vector<double> v;
    for (const auto& i : seqs) {
      v.push_back(theta_block(k, o, gaussian(5, r, FieldMode::kDirectEta), eta, N, blocks, i));
    }
    return v;
  });
  std::vector<std::vector<double>> cols(seqs.size(), std::vector<double>(S));
  for (std::size_t r = 0; r < S; ++r)
    for (std::size_t j = 0; j < seqs.size(); ++j) cols[j][r] = th[r][j];

  const double bracket = 2.0 * o.max_r(N) / (o.R[N] / M);
  std::vector<double> kurt;
  for (std::size_t j = 0; j < seqs.size(); ++j) {
    const auto m = moments(cols[j]);
    kurt.push_back(m.kurtosis);
    out.check(std::abs(m.kurtosis - 3.0) <= 0.3, "kurtosis " + fmt(m.kurtosis) + " block " +
                                                     std::to_string(j));
    if (seqs[j].size() == 1) {
      const double v = theta_variance_exact(o, N, blocks, seqs[j]);
      out.check(std::abs(v - 1.0) <= bracket,
                "variance " + fmt(v) + " outside bracket +-" + fmt(bracket));
    }
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < seqs.size(); ++a)
    for (std::size_t b = a + 1; b < seqs.size(); ++b)
      worst = std::max(worst, std::abs(correlation(cols[a], cols[b])));
  const double corr_tol = 4.0 / std::sqrt(static_cast<double>(S));
  out.note("kurtosis " + join(kurt) + ", max |corr| " + fmt(worst) + " (tol " + fmt(corr_tol) +
           "), bracket +-" + fmt(bracket));
  out.check(worst <= corr_tol, "correlation above tolerance");
}

// 6. Field variance: quadrature vs Monte Carlo integration, and Var J along N.
void criterion_field(Outcome& out) {
  const double bh = 0.5;
  const std::vector<int> grid = {1 << 10, 1 << 12, 1 << 14};
  const auto k = build_kernel(ModelKind::kRenewalHalf, grid.back(), 1e-6);
  const auto o = overlap_table(k);
  const double c = renewal_llt_constant(k);
  const auto law = make_limit_law(bh);
  const auto psi = FieldWeight::constant(1.0);
  const auto quad = sigma_psi_quadrature({0, c}, law, psi);

  // Independent plain Monte Carlo of the double integral with the closed-form kernel.
  const std::size_t P = 8000000;
  const CounterStream u(11, RngDomain::kTest, 0);
  double s1 = 0, s2 = 0;
  for (std::size_t i = 0; i < P; ++i) {
    const double t1 = u.uniform(2 * i), t2 = u.uniform(2 * i + 1);
    const double v = oracle::kernel_d0(c, t1, t2);
    s1 += v;
    s2 += v * v;
  }
  const double pref = bh * bh / (1 - bh * bh);
  const double mc = pref * s1 / P;
  const double mc_se = pref * std::sqrt((s2 / P - (s1 / P) * (s1 / P)) / P);
  const double rel = std::abs(quad.value - mc) / mc;
  out.note("sigma_psi^2 quad " + fmt(quad.value) + " (+-" + fmt(quad.error) + ") MC " + fmt(mc) +
           " (se " + fmt(mc_se) + "), rel diff " + fmt(rel));
  out.check(rel <= 0.01, "quadrature vs MC above 1%");
  out.check(mc_se / mc < 0.0025, "MC oracle too noisy for a 1% check");

  std::vector<double> exact_gaps, mc_gaps, mc_se_v;
  const std::size_t S = 2000;
  for (int N : grid) {
    // Direct eta: gamma R_N = beta_hat^2 exactly.
    const auto eta =
        make_eta_params(DisorderLaw::kGaussian, FieldMode::kDirectEta, beta_schedule(o, N, bh));
    exact_gaps.push_back(std::abs(field_variance_exact(k, o, eta, N, psi) - quad.value));
    const auto J = parallel_map(S, 0, [&](std::size_t r) {
      return field_functional_J(
          pinning_Z_all_starts(k, gaussian(6, r, FieldMode::kDirectEta), eta, N), o, psi);
    });
    const auto m = moments(J);
    mc_gaps.push_back(std::abs(m.var - quad.value));
    mc_se_v.push_back(batch_variance_se(J));
  }
  out.note("exact gaps " + join(exact_gaps) + ", MC gaps " + join(mc_gaps) + " se " +
           join(mc_se_v));
  out.check(strictly_decreasing(exact_gaps), "exact field-variance gap not decreasing");
  for (std::size_t i = 1; i < mc_gaps.size(); ++i) {
    out.check(mc_gaps[i] <= mc_gaps[i - 1] + 2 * std::hypot(mc_se_v[i], mc_se_v[i - 1]),
              "MC Var J gap increased beyond 2 combined SE at step " + std::to_string(i));
  }
}

// 7. Strong disorder scan.
void criterion_strong(Outcome& out) {
  auto c = parse_config(
      "experiment = strong\n"
      "model = RENEWAL_HALF\n"
      "N_grid = 2^8, 2^10, 2^12\n"
      "beta_hat_grid = 0.5, 0.9, 1.0, 1.2, 1.5\n"
      "samples = 5000\n"
      "theta = 0.5\n"
      "seed = 7\n");
  c.threads = 0;
  const auto k = build_kernel(ModelKind::kRenewalHalf, 1 << 12, 1e-6);
  const auto o = overlap_table(k);
  const auto scan = strong_disorder_scan(c, k, o);
  for (const auto& cell : scan.cells) {
    const std::string tag = "N=" + std::to_string(cell.N) + " b=" + fmt(cell.beta_hat);
    out.note(tag + " E[Z^0.5] " + fmt(cell.moment.value) + " se " + fmt(cell.moment.se));
    if (cell.beta_hat == 0.9) {
      out.check(cell.bound_ok, tag + " above bound " + fmt(cell.bound) + " + 3 SE");
    }
    out.check(cell.monotone_ok, tag + " increase against previous beta_hat beyond 2 SE");
  }
  out.check(scan.monotonicity_violations == 0, "monotonicity violations");
  const auto it = scan.n_trend_decreasing.find(1.2);
  out.check(it != scan.n_trend_decreasing.end() && it->second, "not decreasing in N at b=1.2");
}

// 8. SHE: surrogate second moments inherit criterion 2; grid solver mean.
void criterion_she(Outcome& out) {
  const double bh = 0.5;
  const auto k = build_kernel(ModelKind::kSrw2d, 1 << 12, 1e-6);
  const auto o = overlap_table(k);
  std::vector<double> gaps;
  double worst = 0.0;
  for (int e = 6; e <= 12; ++e) {
    const int N = 1 << e;
    const double eps = 1.0 / std::sqrt(static_cast<double>(N));
    const double sur = she_surrogate_second_moment(o, eps, bh);
    const double ref = second_moment_exact(
        o, make_eta_params(DisorderLaw::kGaussian, beta_schedule(o, N, bh)), N);
    worst = std::max(worst, std::abs(sur - ref));
    gaps.push_back(std::abs(sur - 1.0 / (1.0 - bh * bh)));
  }
  out.note("surrogate gaps " + join(gaps) + ", max |surrogate - exact| " + fmt(worst));
  out.check(worst == 0.0, "surrogate differs from the exact second moment");
  out.check(strictly_decreasing(gaps), "surrogate gap not decreasing");

  SheRun run;
  run.eps = 0.125;
  run.h = run.eps / 2;
  run.cells = 32;
  run.beta_hat = bh;
  run.seed = 8;
  const auto moll = make_mollifier(run.eps, run.h);
  const std::size_t R = 500;
  const auto res = parallel_map(R, 0, [&](std::size_t r) {
    SheRun x = run;
    x.realization = r;
    const auto g = she_grid_solve(x, moll, 0.25);
    return std::pair{g.u_origin, g.u_mean};
  });
  std::vector<double> origin, mean;
  for (const auto& [a, b] : res) {
    origin.push_back(a);
    mean.push_back(b);
  }
  for (auto [name, v] : {std::pair{"u(t,0)", &origin}, std::pair{"torus mean", &mean}}) {
    const auto m = moments(*v);
    const double se = std::sqrt(m.var / m.n);
    out.note(std::string(name) + " mean " + fmt(m.mean) + " se " + fmt(se));
    out.check(std::abs(m.mean - 1.0) <= 4 * se, std::string(name) + " mean off 1 by > 4 SE");
  }
}

// 9. Finite-M block limit object.
void criterion_block_limit(Outcome& out) {
  const double bh = 0.5;
  const int K = 6;
  const std::size_t S = 20000;
  const auto law = make_limit_law(bh);
  // Compare Z directly with the log-normal CDF: nonpositive values sit at F = 0.
  auto cdf = [&](double z) {
    if (z <= 0.0) return 0.0;
    return normal_cdf((std::log(z) - law.log_mean()) / std::sqrt(law.sigma_sq));
  };
  std::vector<double> ks;
  for (int M : {4, 8, 16}) {
    const BlockLimitSampler sampler(M, bh, K);
    const auto z = sampler.samples(9, S, 0);
    double m2 = 0, m4 = 0;
    std::size_t nonpos = 0;
    for (double x : z) {
      m2 += x * x;
      m4 += x * x * x * x;
      nonpos += x <= 0.0;
    }
    m2 /= S;
    const double se = std::sqrt((m4 / S - m2 * m2) / S);
    const double target = sampler.second_moment();
    ks.push_back(ks_distance(z, cdf));
    const std::string tag = "M=" + std::to_string(M) + " E[Z^2] " + fmt(m2) + " target " +
                            fmt(target) + " se " + fmt(se) + " nonpositive " +
                            std::to_string(nonpos);
    out.note(tag);
    out.check(std::abs(m2 - target) <= 3 * se, tag);
  }
  out.note("KS " + join(ks));
  out.check(strictly_decreasing(ks), "KS not decreasing in M");
}

}  // namespace
}  // namespace mrg

int main(int argc, char** argv) {
  using Fn = void (*)(mrg::Outcome&);
  const std::vector<std::pair<const char*, Fn>> criteria = {
      {"exact-oracle equivalence", mrg::criterion_oracles},
      {"deterministic second-moment limit", mrg::criterion_second_moment},
      {"single-point distributional limit", mrg::criterion_single_point},
      {"multi-point covariance", mrg::criterion_multipoint},
      {"block-variable Gaussianity", mrg::criterion_theta},
      {"field variance", mrg::criterion_field},
      {"strong disorder", mrg::criterion_strong},
      {"stochastic heat equation", mrg::criterion_she},
      {"block limit object", mrg::criterion_block_limit},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::stoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!pick.empty() && !pick.count(id)) continue;
    mrg::Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(out);
    } catch (const mrg::Error& e) {
      out.pass = false;
      out.detail << "[error] " << mrg::to_string(e.kind()) << ": " << e.what();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "[error] " << e.what();
    }
    const double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("CRITERION %d %s: %s (%.1f s) %s\n", id, out.pass ? "PASS" : "FAIL",
                criteria[i].first, sec, out.detail.str().c_str());
    std::fflush(stdout);
    failed += out.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
