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


// Sample statistics for the experiment harness: moments, batch-mean standard
// errors, Kolmogorov-Smirnov distances and covariance of logs.

#ifndef MRG_STATS_HPP_
#define MRG_STATS_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mrg/limits.hpp"

namespace mrg {

inline constexpr int kMinBatches = 30;

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double var = 0.0;       // unbiased
  double kurtosis = 0.0;  // m4 / m2^2, 3 for a Gaussian; NaN when var = 0
};

Moments moments(std::span<const double> x);

double correlation(std::span<const double> a, std::span<const double> b);

// Standard error of stat(x) from `batches` contiguous batches of equal size
// (the remainder is spread one extra sample over the leading batches).
double batch_se(std::span<const double> x, int batches,
                const std::function<double(std::span<const double>)>& stat);

double batch_mean_se(std::span<const double> x, int batches = kMinBatches);
double batch_variance_se(std::span<const double> x, int batches = kMinBatches);

// sup |F_n - F| for a continuous F.
double ks_distance(std::vector<double> x, const std::function<double(double)>& cdf);

double ks_normal(std::span<const double> x, double mean, double sd);

// KS distance of log(samples) to Normal(-sigma^2 / 2, sigma^2). Needs at least
// 100 samples, all positive.
double ks_lognormal(std::span<const double> samples, const LimitLaw& law);

// E[Z^theta] estimate with its batch-mean SE.
struct FractionalMoment {
  double value = 0.0;
  double se = 0.0;
};

FractionalMoment fractional_moment(std::span<const double> z, double theta,
                                   int batches = kMinBatches);

// samples[s][i] = Z(X_i) in realization s.
struct LogCovariance {
  std::size_t points = 0;
  std::vector<double> cov;  // points x points, row-major
  std::vector<double> se;   // batch-mean SE of each entry
  std::size_t used = 0;
  std::size_t filtered = 0;  // realizations dropped for a nonpositive entry

  double at(std::size_t i, std::size_t j) const { return cov[i * points + j]; }
  double se_at(std::size_t i, std::size_t j) const { return se[i * points + j]; }
};

LogCovariance covariance_of_logs(const std::vector<std::vector<double>>& samples,
                                 int batches = kMinBatches);

}  // namespace mrg

#endif  // MRG_STATS_HPP_
