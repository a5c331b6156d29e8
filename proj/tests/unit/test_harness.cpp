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


#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "mrg/error.hpp"
#include "mrg/harness.hpp"

namespace mrg {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("mrg_harness_" + name);
  fs::remove_all(p);
  return p;
}

ErrorKind kind_of(const std::string& text) {
  try {
    auto c = parse_config(text);
    validate_config(c);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kNumeric;  // sentinel: no error
}

TEST(Config, ParsesKeys) {
  const auto c = parse_config(
      "experiment = multipoint  # comment\n"
      "model = SRW2D\n"
      "N_grid = 2^8, 512\n"
      "beta_hat_grid = 0.25,0.5\n"
      "law = rademacher\n"
      "mode = direct_eta\n"
      "samples = 300\n"
      "zeta_targets = 0.5\n"
      "psi = constant:0.25\n"
      "seed = 99\n"
      "threads = 2\n"
      "\n");
  EXPECT_EQ(c.experiment, Experiment::kMultipoint);
  EXPECT_EQ(c.model, ModelKind::kSrw2d);
  EXPECT_EQ(c.N_grid, (std::vector<int>{256, 512}));
  EXPECT_EQ(c.beta_hat_grid, (std::vector<double>{0.25, 0.5}));
  EXPECT_EQ(c.law, DisorderLaw::kRademacher);
  EXPECT_EQ(c.mode, FieldMode::kDirectEta);
  EXPECT_EQ(c.samples, 300u);
  EXPECT_EQ(c.zeta_targets, (std::vector<double>{0.5}));
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.threads, 2);
  EXPECT_EQ(c.raw.at("psi"), "constant:0.25");
  EXPECT_NO_THROW(validate_config(c));
  const auto psi = parse_psi(c.psi);
  EXPECT_EQ(psi.hi[0], 0.25);
  EXPECT_EQ(psi(0.2, 0, 0.5, 1), 1.0);
  EXPECT_EQ(psi(0.3, 0, 0.5, 1), 0.0);
}

TEST(Config, Errors) {
  const std::string base = "N_grid = 64\nbeta_hat_grid = 0.5\n";
  EXPECT_EQ(kind_of(base), ErrorKind::kNumeric);
  EXPECT_EQ(kind_of(base + "bogus = 1\n"), ErrorKind::kConfig);
  EXPECT_EQ(kind_of(base + "no equals sign\n"), ErrorKind::kConfig);
  EXPECT_EQ(kind_of(base + "samples = ten\n"), ErrorKind::kConfig);
  EXPECT_EQ(kind_of(base + "mode = sideways\n"), ErrorKind::kConfig);
  EXPECT_EQ(kind_of(base + "batches = 10\n"), ErrorKind::kConfig);
  EXPECT_EQ(kind_of(base + "samples = 40\n"), ErrorKind::kConfig);
  EXPECT_EQ(kind_of(base + "theta = 1\n"), ErrorKind::kConfig);
  EXPECT_EQ(kind_of(base + "psi = triangle\n"), ErrorKind::kConfig);
  EXPECT_EQ(kind_of("beta_hat_grid = 0.5\n"), ErrorKind::kConfig);
  EXPECT_EQ(kind_of(base + "experiment = she\n"), ErrorKind::kConfig);
  EXPECT_THROW(parse_config(base + "model = TORUS\n"), Error);
  EXPECT_THROW(load_config("/nonexistent/mrg.cfg"), Error);
}

TEST(Format, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(ExitCodes, Mapping) {
  CellReport ok;
  CellReport bad;
  bad.ok = false;
  bad.error_kind = ErrorKind::kNumeric;
  CellReport big;
  big.ok = false;
  big.error_kind = ErrorKind::kSizing;
  EXPECT_EQ(exit_code_for({ok, ok}), 0);
  EXPECT_EQ(exit_code_for({ok, bad}), 3);
  EXPECT_EQ(exit_code_for({bad, big}), 4);
  big.error_kind = ErrorKind::kCombinatorial;
  EXPECT_EQ(exit_code_for({big}), 4);
}

ExperimentConfig smoke_config(const fs::path& out, int threads) {
  auto c = parse_config(
      "experiment = single\n"
      "model = RENEWAL_HALF\n"
      "N_grid = 64, 128\n"
      "beta_hat_grid = 0, 0.5\n"
      "samples = 600\n"
      "seed = 7\n");
  c.threads = threads;
  c.out_dir = out;
  return c;
}

TEST(Run, SmokeIsFastAndComplete) {
  const auto out = scratch("smoke");
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_experiment(smoke_config(out, 1));
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(sec, 10.0);
  EXPECT_EQ(r.exit_code, 0);
  for (const auto& c : r.cells) EXPECT_TRUE(c.ok) << c.name << ": " << c.error;
  EXPECT_TRUE(fs::exists(out / "summary.csv"));
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  ASSERT_EQ(r.summaries.size(), 4u);
  for (const auto& s : r.summaries) {
    EXPECT_EQ(s.samples, 600u);
    if (s.beta_hat == 0.0) {
      EXPECT_EQ(s.mean_Z, 1.0);
      EXPECT_EQ(s.var_Z, 0.0);
    } else {
      EXPECT_LT(std::abs(s.mean_Z - 1.0), 4 * s.se_mean_Z);
      EXPECT_GT(s.exact_second_moment, 1.0);
    }
  }
  const std::string manifest = slurp(out / "manifest.json");
  EXPECT_NE(manifest.find("\"seed\""), std::string::npos);
  fs::remove_all(out);
}

TEST(Run, DeterministicAcrossRunsAndThreads) {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const auto c = scratch("det_c");
  run_experiment(smoke_config(a, 1));
  run_experiment(smoke_config(b, 1));
  run_experiment(smoke_config(c, 3));
  int compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    const auto name = e.path().filename();
    const std::string x = slurp(e.path());
    EXPECT_EQ(x, slurp(b / name)) << name;
    EXPECT_EQ(x, slurp(c / name)) << name;
    ++compared;
  }
  EXPECT_GE(compared, 5);
  for (const auto& p : {a, b, c}) fs::remove_all(p);
}

TEST(Run, SizingFailureExitCode) {
  const auto out = scratch("sizing");
  auto c = parse_config(
      "experiment = single\n"
      "model = SRW2D\n"
      "N_grid = 2^22\n"
      "beta_hat_grid = 0.5\n"
      "samples = 60\n");
  c.out_dir = out;
  const auto r = run_experiment(c);
  EXPECT_EQ(r.exit_code, 4);
  ASSERT_FALSE(r.cells.empty());
  EXPECT_FALSE(r.cells.front().ok);
  EXPECT_EQ(r.cells.front().error_kind, ErrorKind::kSizing);
  fs::remove_all(out);
}

TEST(Layout, ZetaTargets) {
  const auto k = build_kernel(ModelKind::kRenewalHalf, 1024, 1e-6);
  const auto o = overlap_table(k);
  for (double z : {0.25, 0.5, 0.75}) {
    const auto L = layout_for_zeta(o, 1024, z);
    EXPECT_EQ(L.Xp.t, [&] {
      int n = 1;
      while (n < 512 && o.R[n] < z * o.R[1024]) ++n;
      return n;
    }());
    EXPECT_NEAR(L.zeta, o.R[L.Xp.t] / o.R[1024], 1e-15);
    EXPECT_GE(L.zeta, z);
    EXPECT_LE(L.zeta, 1.0);
  }
  const auto s = build_kernel(ModelKind::kSrw2d, 256, 1e-6);
  const auto L = layout_for_zeta(overlap_table(s), 256, 0.5);
  EXPECT_EQ(L.Xp.t, 0);
  EXPECT_GT(L.Xp.x.x1, 0);
  EXPECT_EQ((L.Xp.x.x1 + L.Xp.x.x2) % 2, 0);
  EXPECT_GE(L.zeta, 0.5);
  EXPECT_LE(L.zeta, 1.0);
}

}  // namespace
}  // namespace mrg
