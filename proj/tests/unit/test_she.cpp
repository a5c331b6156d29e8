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


#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "mrg/error.hpp"
#include "mrg/she.hpp"

namespace mrg {
namespace {

TEST(BetaEps, Examples) {
  EXPECT_NEAR(beta_eps(std::exp(-2 * std::numbers::pi), 1.0), 1.0, 1e-15);
  EXPECT_NEAR(beta_eps(0.125, 0.5), 0.5 * std::sqrt(2 * std::numbers::pi / std::log(8.0)),
              1e-15);
  EXPECT_EQ(beta_eps(0.5, 0.0), 0.0);
  EXPECT_THROW(beta_eps(0.0, 0.5), Error);
  EXPECT_THROW(beta_eps(1.0, 0.5), Error);
}

TEST(Mollifier, NormalizedAndSymmetric) {
  const auto m = make_mollifier(0.125, 0.0625 / 2);
  EXPECT_EQ(m.half, 4);
  double s = 0, sq = 0;
  for (int i = -m.half; i <= m.half; ++i) {
    for (int j = -m.half; j <= m.half; ++j) {
      const double w = m.weight(i, j);
      EXPECT_GE(w, 0.0);
      EXPECT_EQ(w, m.weight(-i, j));
      EXPECT_EQ(w, m.weight(j, i));
      s += w;
      sq += w * w;
    }
  }
  EXPECT_NEAR(s, 1.0, 1e-14);
  EXPECT_NEAR(m.l2_sq, sq / (m.h * m.h), 1e-12);
  EXPECT_EQ(m.weight(m.half, m.half), 0.0);
  EXPECT_THROW(make_mollifier(0.01, 0.1), Error);
}

TEST(Surrogate, StartPoints) {
  const auto X = she_start(0.125, 64, {0.75, 0.3, -0.2});
  EXPECT_EQ(X.t, 16);
  EXPECT_EQ(X.x.x1, 2);
  EXPECT_EQ(X.x.x2, -2);
  EXPECT_EQ(she_start(0.125, 64, {1.0, 0, 0}).t, 0);
  EXPECT_EQ(she_start(0.125, 64, {0.0, 0, 0}).t, 64);
}

TEST(Surrogate, EqualsPartitionSurface) {
  const auto k = build_kernel(ModelKind::kSrw2d, 64, 1e-6);
  const auto o = overlap_table(k);
  const std::vector<ShePoint> pts = {{1.0, 0, 0}, {0.75, 0.25, 0.0}, {0.5, -0.2, 0.3}};
  const auto s = she_surrogate(k, o, 0.125, 0.6, pts, 5, 2);
  ASSERT_EQ(s.N, 64);
  EXPECT_EQ(s.beta, beta_schedule(o, 64, 0.6));
  PolymerOptions opt;
  opt.region_radius = 2;
  const auto surf = partition_surface(
      k, {5, 2, DisorderLaw::kGaussian, FieldMode::kOmega},
      make_eta_params(DisorderLaw::kGaussian, s.beta), 64, opt);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(s.values[i], surf.at(s.starts[i].x, s.starts[i].t));
  }
  const auto z = she_surrogate(k, o, 0.125, 0.0, pts, 5, 2);
  for (double v : z.values) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(she_surrogate_second_moment(o, 0.125, 0.6),
            second_moment_exact(o, make_eta_params(DisorderLaw::kGaussian, s.beta), 64));
}

TEST(Surrogate, Errors) {
  const auto k = build_kernel(ModelKind::kSrw2d, 32, 1e-6);
  const auto o = overlap_table(k);
  try {
    she_surrogate(k, o, 0.125, 0.5, {{}}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kRange);
  }
  const auto r = build_kernel(ModelKind::kRenewalHalf, 64, 1e-6);
  EXPECT_THROW(she_surrogate(r, overlap_table(r), 0.125, 0.5, {{}}, 1), Error);
}

TEST(Grid, ZeroNoiseStaysOne) {
  SheRun run;
  run.beta_hat = 0.0;
  const auto m = make_mollifier(run.eps, run.h);
  const auto res = she_grid_solve(run, m, 0.25);
  EXPECT_EQ(res.steps, 256);
  for (double v : res.u) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(res.u_origin, 1.0);
  EXPECT_EQ(res.u_mean, 1.0);
}

TEST(Grid, StabilityAndConfigErrors) {
  SheRun run;
  run.beta_hat = 0.5;
  run.dt = 0.3 * run.h * run.h;
  const auto m = make_mollifier(run.eps, run.h);
  try {
    she_grid_solve(run, m, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kStability);
  }
  run.dt = 0;
  EXPECT_THROW(she_grid_solve(run, make_mollifier(run.eps, run.h / 2), 0.1), Error);
}

TEST(Grid, DeterministicAndMeanOne) {
  SheRun run;
  run.beta_hat = 0.5;
  run.cells = 16;
  const auto m = make_mollifier(run.eps, run.h);
  run.seed = 3;
  const auto a = she_grid_solve(run, m, 0.1);
  const auto b = she_grid_solve(run, m, 0.1);
  EXPECT_EQ(a.u, b.u);
  const int S = 400;
  double s = 0, s2 = 0;
  for (int r = 0; r < S; ++r) {
    run.realization = r;
    const double v = she_grid_solve(run, m, 0.1).u_origin;
    s += v;
    s2 += v * v;
  }
  const double mean = s / S;
  const double se = std::sqrt((s2 / S - mean * mean) / S);
  EXPECT_GT(se, 0.0);
  EXPECT_LT(std::abs(mean - 1.0), 4 * se);
}

TEST(Grid, SnapshotRoundTrip) {
  SheRun run;
  run.beta_hat = 0.7;
  run.cells = 12;
  run.seed = 8;
  run.realization = 4;
  const auto res = she_grid_solve(run, make_mollifier(run.eps, run.h), 0.05);
  const auto path = std::filesystem::temp_directory_path() / "mrg_test_snapshot.bin";
  write_she_snapshot(res, path);
  const auto back = read_she_snapshot(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.cells, res.cells);
  EXPECT_EQ(back.h, res.h);
  EXPECT_EQ(back.dt, res.dt);
  EXPECT_EQ(back.eps, res.eps);
  EXPECT_EQ(back.t_end, res.t_end);
  EXPECT_EQ(back.steps, res.steps);
  EXPECT_EQ(back.seed, res.seed);
  EXPECT_EQ(back.realization, res.realization);
  EXPECT_EQ(back.u, res.u);
  EXPECT_EQ(back.u_origin, res.u_origin);
  EXPECT_EQ(back.u_mean, res.u_mean);
  EXPECT_THROW(read_she_snapshot(path), Error);
}

}  // namespace
}  // namespace mrg
