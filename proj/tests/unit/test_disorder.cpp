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
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "mrg/disorder.hpp"
#include "mrg/parallel.hpp"
#include "mrg/rng.hpp"

namespace mrg {
namespace {

TEST(Philox, KnownAnswer) {
  // Random123 known-answer vector for philox4x32-10 with all-ones input.
  const PhiloxCounter out = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                       {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Rng, NormalQuantileInvertsCdf) {
  for (double p : {1e-12, 1e-6, 0.01, 0.2, 0.5, 0.7, 0.99, 1 - 1e-9}) {
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-14 + 1e-12 * p) << p;
  }
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-13);
  EXPECT_EQ(normal_quantile(0.5), 0.0);
}

TEST(Rng, UniformStaysInOpenInterval) {
  EXPECT_GT(uniform_open(0, 0), 0.0);
  EXPECT_LT(uniform_open(0xffffffffu, 0xffffffffu), 1.0);
}

TEST(CumulantLambda, ClosedForms) {
  EXPECT_DOUBLE_EQ(cumulant_lambda(DisorderLaw::kGaussian, 1.0), 0.5);
  EXPECT_NEAR(cumulant_lambda(DisorderLaw::kRademacher, 1.0), std::log(std::cosh(1.0)), 1e-15);
  EXPECT_NEAR(cumulant_lambda(DisorderLaw::kRademacher, 1.0), 0.433781, 1e-6);
  EXPECT_EQ(cumulant_lambda(DisorderLaw::kGaussian, 0.0), 0.0);
  EXPECT_EQ(cumulant_lambda(DisorderLaw::kRademacher, 0.0), 0.0);
  // Large arguments stay finite.
  EXPECT_NEAR(cumulant_lambda(DisorderLaw::kRademacher, 800.0), 800.0 - std::log(2.0), 1e-12);
}

TEST(CumulantLambda, SecondDerivativeAtZeroIsOne) {
  const double h = 1e-4;
  for (auto law : {DisorderLaw::kGaussian, DisorderLaw::kRademacher}) {
    const double d2 = (cumulant_lambda(law, h) - 2 * cumulant_lambda(law, 0.0) +
                       cumulant_lambda(law, -h)) / (h * h);
    EXPECT_NEAR(d2, 1.0, 1e-6);
  }
}

TEST(EtaParams, VarianceFormulaAndSmallBetaLimit) {
  const auto g = make_eta_params(DisorderLaw::kGaussian, 0.3);
  EXPECT_NEAR(g.var_eta, std::expm1(0.09) / 0.09, 1e-15);
  const auto r = make_eta_params(DisorderLaw::kRademacher, 0.3);
  const double lr = std::log(std::cosh(0.6)) - 2 * std::log(std::cosh(0.3));
  EXPECT_NEAR(r.var_eta, std::expm1(lr) / 0.09, 1e-14);
  for (auto law : {DisorderLaw::kGaussian, DisorderLaw::kRademacher}) {
    EXPECT_NEAR(make_eta_params(law, 1e-7).var_eta, 1.0, 1e-12);
    EXPECT_NEAR(make_eta_params(law, 0.0).var_eta, 1.0, 0.0);
    // Continuity across the series switch.
    EXPECT_NEAR(make_eta_params(law, 0.99e-6).var_eta, make_eta_params(law, 1.01e-6).var_eta,
                1e-12);
    EXPECT_GT(make_eta_params(law, 0.5).var_eta, 0.0);
  }
  const auto d = make_eta_params(DisorderLaw::kGaussian, FieldMode::kDirectEta, 0.7);
  EXPECT_EQ(d.var_eta, 1.0);
  EXPECT_DOUBLE_EQ(d.gamma(), 0.49);
}

TEST(EtaTransform, Examples) {
  const auto p = make_eta_params(DisorderLaw::kGaussian, 1.0);
  EXPECT_NEAR(eta_transform(p, 0.5), 0.0, 1e-15);
  const auto z = make_eta_params(DisorderLaw::kGaussian, 0.0);
  EXPECT_EQ(eta_transform(z, 1.7), 1.7);
}

TEST(DisorderField, DeterministicAndOrderIndependent) {
  const DisorderField f{42, 3, DisorderLaw::kGaussian, FieldMode::kOmega};
  const double a = field_value(f, 5, {2, -7});
  std::vector<double> many = parallel_map(1000, 4, [&](std::size_t i) {
    return field_value(f, static_cast<std::int64_t>(i % 17) + 1, {static_cast<std::int64_t>(i), 0});
  });
  EXPECT_EQ(field_value(f, 5, {2, -7}), a);
  for (std::size_t i = 0; i < many.size(); ++i) {
    EXPECT_EQ(many[i], field_value(f, static_cast<std::int64_t>(i % 17) + 1,
                                   {static_cast<std::int64_t>(i), 0}));
  }
  // Different realizations, seeds and sites decorrelate.
  EXPECT_NE(field_value({42, 4, DisorderLaw::kGaussian, FieldMode::kOmega}, 5, {2, -7}), a);
  EXPECT_NE(field_value({43, 3, DisorderLaw::kGaussian, FieldMode::kOmega}, 5, {2, -7}), a);
  EXPECT_NE(field_value(f, 5, {-7, 2}), a);
}

TEST(DisorderField, GaussianMomentsOverAMillionSites) {
  const DisorderField f{7, 0, DisorderLaw::kGaussian, FieldMode::kOmega};
  const int n = 1000000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double v = field_value(f, 1 + i / 1000, {i % 1000, (i * 7) % 13});
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(n));
  EXPECT_NEAR(var, 1.0, 0.01);
}

TEST(DisorderField, RademacherTakesSignValues) {
  const DisorderField f{9, 1, DisorderLaw::kRademacher, FieldMode::kOmega};
  std::set<double> seen;
  double s = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double v = field_value(f, 1 + i, {0, 0});
    seen.insert(v);
    s += v;
  }
  EXPECT_EQ(seen, (std::set<double>{-1.0, 1.0}));
  EXPECT_LT(std::abs(s / n), 4.0 / std::sqrt(n));
}

TEST(DisorderField, EtaMomentsMatchParams) {
  for (auto law : {DisorderLaw::kGaussian, DisorderLaw::kRademacher}) {
    const DisorderField f{11, 0, law, FieldMode::kOmega};
    const auto p = make_eta_params(law, 0.3);
    const int n = 1000000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double e = field_eta(f, p, 1 + i, {3, 1});
      s += e;
      s2 += e * e;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    EXPECT_LT(std::abs(mean), 4.0 * std::sqrt(p.var_eta / n));
    EXPECT_NEAR(var, p.var_eta, 0.05 * p.var_eta);
  }
}

TEST(DisorderField, DirectEtaModeIsStandardGaussian) {
  const DisorderField f{5, 2, DisorderLaw::kGaussian, FieldMode::kDirectEta};
  const auto p = make_eta_params(DisorderLaw::kGaussian, FieldMode::kDirectEta, 0.4);
  const DisorderField w{5, 2, DisorderLaw::kGaussian, FieldMode::kOmega};
  // Direct mode reads the same Gaussian stream as eta itself.
  EXPECT_EQ(field_eta(f, p, 3, {1, 1}), field_value(w, 3, {1, 1}));
  EXPECT_DOUBLE_EQ(field_xi(f, p, 3, {1, 1}), 1.0 + 0.4 * field_value(w, 3, {1, 1}));
  const int n = 1000000;
  double s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double e = field_eta(f, p, i + 1, {});
    s2 += e * e;
  }
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(DisorderField, XiIsExponentialWeight) {
  const DisorderField f{5, 2, DisorderLaw::kGaussian, FieldMode::kOmega};
  const auto p = make_eta_params(DisorderLaw::kGaussian, 0.4);
  const double w = field_value(f, 3, {1, 1});
  EXPECT_NEAR(field_xi(f, p, 3, {1, 1}), std::exp(0.4 * w - 0.08), 1e-15);
  EXPECT_NEAR(field_xi(f, p, 3, {1, 1}), 1.0 + 0.4 * field_eta(f, p, 3, {1, 1}), 1e-14);
}

TEST(Parsing, LawNames) {
  EXPECT_EQ(parse_law("gaussian"), DisorderLaw::kGaussian);
  EXPECT_EQ(parse_law("RADEMACHER"), DisorderLaw::kRademacher);
  EXPECT_THROW(parse_law("cauchy"), std::exception);
}

}  // namespace
}  // namespace mrg
