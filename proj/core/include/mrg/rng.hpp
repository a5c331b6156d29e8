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

// Counter-based random numbers. Every draw is a pure function of
// (key, counter), so results do not depend on evaluation order or on the
// number of worker threads.

#ifndef MRG_RNG_HPP_
#define MRG_RNG_HPP_

#include <array>
#include <cstdint>

namespace mrg {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds (Salmon et al., SC'11).
PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key);

// Identifier written into run manifests.
inline constexpr const char* kRngSchemeId =
    "philox4x32-10/u52/acklam-halley-normal";

// Stream domains keep unrelated consumers of the same seed apart.
enum class RngDomain : std::uint32_t {
  kDisorder = 0,
  kLimitLaw = 1,
  kBlockLimit = 2,
  kSheNoise = 3,
  kTest = 7,
};

PhiloxKey make_key(std::uint64_t seed, RngDomain domain);

// Uniform on the open interval (0, 1) from two 32-bit words (52 bits).
double uniform_open(std::uint32_t hi, std::uint32_t lo);

// Inverse of the standard normal CDF, accurate to a few ulp on (0, 1).
double normal_quantile(double p);

double normal_cdf(double x);

// Convenience: standard normal from a single counter block.
double normal_from(PhiloxCounter ctr, PhiloxKey key);

// Keyed stream over a flat 64-bit index, for samplers that just need
// "the i-th Gaussian of stream s".
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, RngDomain domain, std::uint64_t stream);

  double uniform(std::uint64_t index) const;
  double normal(std::uint64_t index) const;

 private:
  PhiloxKey key_;
  std::uint64_t stream_;
};

}  // namespace mrg

#endif  // MRG_RNG_HPP_
