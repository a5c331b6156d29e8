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

// Seeded disorder fields and the centered multiplicative increment
//   eta = (exp(beta omega - lambda(beta)) - 1) / beta.

#ifndef MRG_DISORDER_HPP_
#define MRG_DISORDER_HPP_

#include <cstdint>
#include <string_view>

#include "mrg/kernels.hpp"

namespace mrg {

enum class DisorderLaw : std::uint8_t { kGaussian = 0, kRademacher = 1 };

std::string_view to_string(DisorderLaw law);
DisorderLaw parse_law(std::string_view name);

// kOmega samples omega from the law and applies the eta transform.
// kDirectEta samples eta directly as i.i.d. standard Gaussians, xi = 1 + beta eta.
enum class FieldMode : std::uint8_t { kOmega = 0, kDirectEta = 1 };

// lambda(beta) = log E[exp(beta omega)].
double cumulant_lambda(DisorderLaw law, double beta);

struct EtaParams {
  double beta = 0.0;
  double lambda_beta = 0.0;
  double var_eta = 1.0;

  // gamma = beta^2 Var[eta], the weight of one overlap in the moment chains.
  double gamma() const { return beta * beta * var_eta; }
};

EtaParams make_eta_params(DisorderLaw law, double beta);
EtaParams make_eta_params(DisorderLaw law, FieldMode mode, double beta);

// (exp(beta omega - lambda) - 1) / beta, and omega itself at beta = 0.
double eta_transform(const EtaParams& params, double omega);

struct DisorderField {
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;
  DisorderLaw law = DisorderLaw::kGaussian;
  FieldMode mode = FieldMode::kOmega;
};

// Raw field value at (n, x): omega in kOmega mode, eta in kDirectEta mode.
// A pure function of (seed, realization, n, x).
double field_value(const DisorderField& field, std::int64_t n, Site x);

// Centered increment eta(n, x) under either mode.
double field_eta(const DisorderField& field, const EtaParams& params,
                 std::int64_t n, Site x);

// Multiplicative weight xi = 1 + beta eta: exp(beta omega - lambda) in kOmega
// mode, 1 + beta eta in kDirectEta mode.
double field_xi(const DisorderField& field, const EtaParams& params,
                std::int64_t n, Site x);

}  // namespace mrg

#endif  // MRG_DISORDER_HPP_
