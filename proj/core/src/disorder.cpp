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

#include "mrg/disorder.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mrg/error.hpp"
#include "mrg/rng.hpp"

namespace mrg {
namespace {

double log_cosh(double x) {
  const double a = std::abs(x);
  if (a < 1.0) {
    const double s = std::sinh(a);
    return 0.5 * std::log1p(s * s);
  }
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace

std::string_view to_string(DisorderLaw law) {
  return law == DisorderLaw::kGaussian ? "gaussian" : "rademacher";
}

DisorderLaw parse_law(std::string_view name) {
  if (name == "gaussian" || name == "GAUSSIAN") return DisorderLaw::kGaussian;
  if (name == "rademacher" || name == "RADEMACHER") return DisorderLaw::kRademacher;
  fail(ErrorKind::kConfig, "unknown disorder law '" + std::string(name) + "'");
}

double cumulant_lambda(DisorderLaw law, double beta) {
  switch (law) {
    case DisorderLaw::kGaussian: return 0.5 * beta * beta;
    case DisorderLaw::kRademacher: return log_cosh(beta);
  }
  return 0.0;
}

EtaParams make_eta_params(DisorderLaw law, double beta) {
  EtaParams p;
  p.beta = beta;
  p.lambda_beta = cumulant_lambda(law, beta);
  const double b2 = beta * beta;
  if (std::abs(beta) < 1e-6) {
    // Var[eta] = 1 + b2/2 (Gaussian), 1 - 2 b2/3 (Rademacher) + O(b2^2).
    p.var_eta = law == DisorderLaw::kGaussian ? 1.0 + 0.5 * b2 : 1.0 - 2.0 * b2 / 3.0;
  } else {
    const double diff = cumulant_lambda(law, 2.0 * beta) - 2.0 * p.lambda_beta;
    p.var_eta = std::expm1(diff) / b2;
  }
  return p;
}

EtaParams make_eta_params(DisorderLaw law, FieldMode mode, double beta) {
  if (mode == FieldMode::kOmega) return make_eta_params(law, beta);
  EtaParams p;
  p.beta = beta;
  p.lambda_beta = 0.0;
  p.var_eta = 1.0;
  return p;
}

double eta_transform(const EtaParams& params, double omega) {
  if (params.beta == 0.0) return omega;
  return std::expm1(params.beta * omega - params.lambda_beta) / params.beta;
}

double field_value(const DisorderField& field, std::int64_t n, Site x) {
  static thread_local std::uint64_t cached_seed = ~std::uint64_t{0};
  static thread_local PhiloxKey cached_key{};
  if (cached_seed != field.seed) {
    cached_key = make_key(field.seed, RngDomain::kDisorder);
    cached_seed = field.seed;
  }
  const PhiloxCounter ctr = {static_cast<std::uint32_t>(n),
                             static_cast<std::uint32_t>(x.x1),
                             static_cast<std::uint32_t>(x.x2),
                             static_cast<std::uint32_t>(field.realization)};
  const PhiloxCounter out = philox4x32(ctr, cached_key);
  if (field.mode == FieldMode::kOmega && field.law == DisorderLaw::kRademacher) {
    return (out[0] >> 31) != 0 ? 1.0 : -1.0;
  }
  return normal_quantile(uniform_open(out[0], out[1]));
}

double field_eta(const DisorderField& field, const EtaParams& params,
                 std::int64_t n, Site x) {
  const double v = field_value(field, n, x);
  return field.mode == FieldMode::kDirectEta ? v : eta_transform(params, v);
}

double field_xi(const DisorderField& field, const EtaParams& params,
                std::int64_t n, Site x) {
  const double v = field_value(field, n, x);
  if (field.mode == FieldMode::kDirectEta) return 1.0 + params.beta * v;
  return std::exp(params.beta * v - params.lambda_beta);
}

}  // namespace mrg
