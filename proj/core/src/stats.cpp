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


#include "mrg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mrg/error.hpp"
#include "mrg/rng.hpp"
#include "summation.hpp"

namespace mrg {
namespace {

double mean_of(std::span<const double> x) {
  NeumaierSum s;
  for (double v : x) s.add(v);
  return s.value() / static_cast<double>(x.size());
}

double sample_cov(std::span<const double> a, std::span<const double> b) {
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  NeumaierSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add((a[i] - ma) * (b[i] - mb));
  return s.value() / static_cast<double>(a.size() - 1);
}

// Start offsets of `batches` near-equal contiguous batches over n samples.
std::vector<std::size_t> batch_offsets(std::size_t n, int batches) {
  require(batches >= 2, ErrorKind::kConfig, "need at least 2 batches");
  require(n >= 2 * static_cast<std::size_t>(batches), ErrorKind::kConfig,
          "need at least 2 samples per batch, got " + std::to_string(n) + " samples for " +
              std::to_string(batches) + " batches");
  std::vector<std::size_t> off(batches + 1, 0);
  const std::size_t base = n / batches, extra = n % batches;
  for (int b = 0; b < batches; ++b) {
    off[b + 1] = off[b] + base + (static_cast<std::size_t>(b) < extra ? 1 : 0);
  }
  return off;
}

double se_of(const std::vector<double>& stats) {
  const Moments m = moments(stats);
  return std::sqrt(m.var / static_cast<double>(stats.size()));
}

}  // namespace

Moments moments(std::span<const double> x) {
  Moments m;
  m.n = x.size();
  if (m.n == 0) return m;
  m.mean = mean_of(x);
  if (m.n < 2) return m;
  NeumaierSum s2, s4;
  for (double v : x) {
    const double d = v - m.mean;
    s2.add(d * d);
    s4.add(d * d * d * d);
  }
  const double n = static_cast<double>(m.n);
  m.var = s2.value() / (n - 1.0);
  const double m2 = s2.value() / n;
  m.kurtosis = m2 > 0.0 ? (s4.value() / n) / (m2 * m2)
                        : std::numeric_limits<double>::quiet_NaN();
  return m;
}

double correlation(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size() && a.size() >= 2, ErrorKind::kConfig,
          "correlation needs two equal-length samples of size >= 2");
  const double c = sample_cov(a, b);
  const double va = sample_cov(a, a), vb = sample_cov(b, b);
  if (va == 0.0 || vb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return c / std::sqrt(va * vb);
}

double batch_se(std::span<const double> x, int batches,
                const std::function<double(std::span<const double>)>& stat) {
  const auto off = batch_offsets(x.size(), batches);
  std::vector<double> stats(batches);
  for (int b = 0; b < batches; ++b) stats[b] = stat(x.subspan(off[b], off[b + 1] - off[b]));
  return se_of(stats);
}

double batch_mean_se(std::span<const double> x, int batches) {
  return batch_se(x, batches, [](std::span<const double> s) { return mean_of(s); });
}

double batch_variance_se(std::span<const double> x, int batches) {
  return batch_se(x, batches, [](std::span<const double> s) { return moments(s).var; });
}

double ks_distance(std::vector<double> x, const std::function<double(double)>& cdf) {
  require(!x.empty(), ErrorKind::kConfig, "KS distance of an empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_normal(std::span<const double> x, double mean, double sd) {
  require(sd > 0.0, ErrorKind::kDomain, "normal reference needs sd > 0");
  return ks_distance(std::vector<double>(x.begin(), x.end()),
                     [&](double v) { return normal_cdf((v - mean) / sd); });
}

double ks_lognormal(std::span<const double> samples, const LimitLaw& law) {
  require(samples.size() >= 100, ErrorKind::kConfig,
          "ks_lognormal needs at least 100 samples, got " + std::to_string(samples.size()));
  std::size_t bad = 0;
  std::vector<double> logs;
  logs.reserve(samples.size());
  for (double z : samples) {
    if (!(z > 0.0)) {
      ++bad;
      continue;
    }
    logs.push_back(std::log(z));
  }
  if (bad > 0) {
    fail(ErrorKind::kDomain,
         "ks_lognormal rejected " + std::to_string(bad) + " nonpositive samples");
  }
  if (law.sigma_sq == 0.0) {
    // Point mass at log Z = 0: the sup is attained on one side of the atom.
    const auto below = std::count_if(logs.begin(), logs.end(), [](double v) { return v < 0.0; });
    const auto above = std::count_if(logs.begin(), logs.end(), [](double v) { return v > 0.0; });
    return static_cast<double>(std::max(below, above)) / static_cast<double>(logs.size());
  }
  return ks_normal(logs, law.log_mean(), std::sqrt(law.sigma_sq));
}

FractionalMoment fractional_moment(std::span<const double> z, double theta, int batches) {
  require(theta > 0.0 && theta < 1.0, ErrorKind::kDomain, "theta must lie in (0, 1)");
  std::vector<double> p(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    require(z[i] >= 0.0, ErrorKind::kDomain, "fractional moment of a negative sample");
    p[i] = std::pow(z[i], theta);
  }
  return {mean_of(p), batch_mean_se(p, batches)};
}

LogCovariance covariance_of_logs(const std::vector<std::vector<double>>& samples,
                                 int batches) {
  require(!samples.empty(), ErrorKind::kConfig, "covariance_of_logs of an empty sample");
  LogCovariance out;
  out.points = samples.front().size();
  const std::size_t P = out.points;
  std::vector<std::vector<double>> logs(P);
  for (const auto& row : samples) {
    require(row.size() == P, ErrorKind::kConfig, "ragged multi-point sample");
    if (!std::all_of(row.begin(), row.end(), [](double z) { return z > 0.0; })) {
      ++out.filtered;
      continue;
    }
    for (std::size_t i = 0; i < P; ++i) logs[i].push_back(std::log(row[i]));
  }
  out.used = samples.size() - out.filtered;
  const auto off = batch_offsets(out.used, batches);
  out.cov.assign(P * P, 0.0);
  out.se.assign(P * P, 0.0);
  for (std::size_t i = 0; i < P; ++i) {
    for (std::size_t j = i; j < P; ++j) {
      const double c = sample_cov(logs[i], logs[j]);
      std::vector<double> bc(batches);
      for (int b = 0; b < batches; ++b) {
        const std::size_t len = off[b + 1] - off[b];
        bc[b] = sample_cov(std::span(logs[i]).subspan(off[b], len),
                           std::span(logs[j]).subspan(off[b], len));
      }
      const double se = se_of(bc);
      out.cov[i * P + j] = out.cov[j * P + i] = c;
      out.se[i * P + j] = out.se[j * P + i] = se;
    }
  }
  return out;
}

}  // namespace mrg
