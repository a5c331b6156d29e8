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


#include "mrg/she.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "mrg/error.hpp"
#include "mrg/rng.hpp"

namespace mrg {
namespace {

int surrogate_horizon(double eps) {
  require(eps > 0.0 && eps < 1.0, ErrorKind::kDomain, "eps must lie in (0, 1)");
  const double n = std::floor(1.0 / (eps * eps));
  require(n < 2147483647.0, ErrorKind::kRange, "eps^-2 exceeds the integer horizon");
  return static_cast<int>(n);
}

}  // namespace

double beta_eps(double eps, double beta_hat) {
  if (!(eps > 0.0 && eps < 1.0)) {
    fail(ErrorKind::kDomain, "beta_eps needs eps in (0, 1), got " + std::to_string(eps));
  }
  return beta_hat * std::sqrt(2.0 * std::numbers::pi / -std::log(eps));
}

Mollifier make_mollifier(double radius, double h) {
  require(radius > 0.0 && h > 0.0, ErrorKind::kDomain, "mollifier needs radius, h > 0");
  Mollifier m;
  m.radius = radius;
  m.h = h;
  m.half = static_cast<int>(std::floor(radius / h));
  require(m.half >= 1, ErrorKind::kDomain, "mollifier radius is below the grid spacing");
  const int s = m.side();
  m.weights.assign(static_cast<std::size_t>(s) * s, 0.0);
  double total = 0.0;
  for (int i = -m.half; i <= m.half; ++i) {
    for (int j = -m.half; j <= m.half; ++j) {
      const double r2 = (i * i + j * j) * h * h / (radius * radius);
      const double v = r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
      m.weights[(i + m.half) * s + (j + m.half)] = v;
      total += v;
    }
  }
  require(total > 0.0, ErrorKind::kDomain, "mollifier radius is below the grid spacing");
  double sq = 0.0;
  for (double& w : m.weights) {
    w /= total;
    sq += w * w;
  }
  // weights = j h^2, so sum j^2 h^2 = sum weights^2 / h^2.
  m.l2_sq = sq / (h * h);
  return m;
}

SpaceTime she_start(double eps, int N, const ShePoint& p) {
  require(p.t >= 0.0 && p.t <= 1.0, ErrorKind::kDomain, "SHE time must lie in [0, 1]");
  const double inv = 1.0 / eps;
  const auto s = static_cast<std::int64_t>(std::floor(inv * inv * (1.0 - p.t)));
  SpaceTime X;
  X.x = {static_cast<std::int64_t>(std::floor(inv * p.x1)),
         static_cast<std::int64_t>(std::floor(inv * p.x2))};
  X.t = std::clamp<std::int64_t>(s, 0, N);
  return X;
}

SheSurrogate she_surrogate(const LatticeKernel& kernel, const OverlapTable& overlap,
                           double eps, double beta_hat, const std::vector<ShePoint>& points,
                           std::uint64_t seed, std::uint64_t realization, DisorderLaw law) {
  require(kernel.model() == ModelKind::kSrw2d, ErrorKind::kConfig,
          "the SHE surrogate runs on SRW2D");
  SheSurrogate out;
  out.N = surrogate_horizon(eps);
  if (out.N > kernel.n_max() || out.N > overlap.horizon()) {
    fail(ErrorKind::kRange, "surrogate horizon eps^-2 = " + std::to_string(out.N) +
                                " exceeds the kernel horizon " +
                                std::to_string(kernel.n_max()));
  }
  out.beta = beta_schedule(overlap, out.N, beta_hat);
  std::int64_t radius = 0;
  for (const auto& p : points) {
    const SpaceTime X = she_start(eps, out.N, p);
    radius = std::max({radius, std::abs(X.x.x1), std::abs(X.x.x2)});
    out.starts.push_back(X);
  }
  if (beta_hat == 0.0) {
    out.values.assign(points.size(), 1.0);
    return out;
  }
  const EtaParams eta = make_eta_params(law, out.beta);
  const DisorderField field{seed, realization, law, FieldMode::kOmega};
  PolymerOptions options;
  options.region_radius = radius;
  const PartitionSurface surface = partition_surface(kernel, field, eta, out.N, options);
  for (const auto& X : out.starts) out.values.push_back(surface.at(X.x, X.t));
  return out;
}

double she_surrogate_second_moment(const OverlapTable& overlap, double eps,
                                   double beta_hat, DisorderLaw law) {
  const int N = surrogate_horizon(eps);
  require(N <= overlap.horizon(), ErrorKind::kRange, "surrogate horizon exceeds the overlap table");
  const EtaParams eta = make_eta_params(law, beta_schedule(overlap, N, beta_hat));
  return second_moment_exact(overlap, eta, N);
}

SheResult she_grid_solve(const SheRun& run, const Mollifier& mollifier, double t_end,
                         const SheObservables& observables) {
  require(run.cells >= 3, ErrorKind::kConfig, "torus needs at least 3 cells per side");
  require(run.h > 0.0 && t_end >= 0.0, ErrorKind::kDomain, "need h > 0 and t_end >= 0");
  require(std::abs(mollifier.h - run.h) <= 1e-12 * run.h, ErrorKind::kConfig,
          "mollifier grid spacing differs from the solver grid");
  require(mollifier.side() <= run.cells, ErrorKind::kConfig,
          "mollifier stencil wider than the torus");
  const double dt = run.dt > 0.0 ? run.dt : 0.25 * run.h * run.h;
  if (dt > 0.25 * run.h * run.h * (1.0 + 1e-12)) {
    std::ostringstream os;
    os.precision(17);
    os << "time step " << dt << " exceeds h^2/4 = " << 0.25 * run.h * run.h;
    fail(ErrorKind::kStability, os.str());
  }
  const double beta = run.beta_hat == 0.0 ? 0.0 : beta_eps(run.eps, run.beta_hat);

  const int n = run.cells;
  const std::size_t cells = static_cast<std::size_t>(n) * n;
  SheResult res;
  res.cells = n;
  res.h = run.h;
  res.dt = dt;
  res.eps = run.eps;
  res.t_end = t_end;
  res.seed = run.seed;
  res.realization = run.realization;
  res.steps = static_cast<std::int64_t>(std::ceil(t_end / dt - 1e-9));
  res.u.assign(cells, 1.0);

  const CounterStream stream(run.seed, RngDomain::kSheNoise, run.realization);
  const double lap = 0.5 * dt / (run.h * run.h);
  const double noise_scale = beta * std::sqrt(dt) / run.h;
  std::vector<double> next(cells), xi(cells), dw(cells);
  auto wrap = [n](int i) { return ((i % n) + n) % n; };
  const int half = mollifier.half;

  for (std::int64_t step = 0; step < res.steps; ++step) {
    if (beta != 0.0) {
      const std::uint64_t base = static_cast<std::uint64_t>(step) * cells;
      for (std::size_t c = 0; c < cells; ++c) xi[c] = stream.normal(base + c);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int a = -half; a <= half; ++a) {
            const int row = wrap(i - a) * n;
            for (int b = -half; b <= half; ++b) s += mollifier.weight(a, b) * xi[row + wrap(j - b)];
          }
          dw[static_cast<std::size_t>(i) * n + j] = noise_scale * s;
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      const int up = wrap(i - 1) * n, down = wrap(i + 1) * n, row = i * n;
      for (int j = 0; j < n; ++j) {
        const double u = res.u[row + j];
        const double l = res.u[up + j] + res.u[down + j] + res.u[row + wrap(j - 1)] +
                         res.u[row + wrap(j + 1)] - 4.0 * u;
        double v = u + lap * l;
        if (beta != 0.0) v += u * dw[row + j];
        next[row + j] = v;
      }
    }
    for (std::size_t c = 0; c < cells; ++c) {
      if (!std::isfinite(next[c])) {
        fail(ErrorKind::kNumeric, "grid solver produced a non-finite value at step " +
                                      std::to_string(step + 1));
      }
    }
    res.u.swap(next);
  }
  if (observables.origin) res.u_origin = res.u[0];
  if (observables.spatial_mean) {
    double s = 0.0;
    for (double v : res.u) s += v;
    res.u_mean = s / static_cast<double>(cells);
  }
  return res;
}

void write_she_snapshot(const SheResult& result, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::kIo, "cannot open " + path.string());
  os.precision(17);
  os << "mrg-she-snapshot 1\n"
     << "cells " << result.cells << '\n'
     << "h " << result.h << '\n'
     << "dt " << result.dt << '\n'
     << "eps " << result.eps << '\n'
     << "t_end " << result.t_end << '\n'
     << "steps " << result.steps << '\n'
     << "seed " << result.seed << '\n'
     << "realization " << result.realization << '\n'
     << "end\n";
  for (double v : result.u) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    char buf[8];
    for (int k = 0; k < 8; ++k) buf[k] = static_cast<char>((bits >> (8 * k)) & 0xff);
    os.write(buf, 8);
  }
  if (!os) fail(ErrorKind::kIo, "write failed for " + path.string());
}

SheResult read_she_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  if (line != "mrg-she-snapshot 1") fail(ErrorKind::kIo, "not a snapshot file: " + path.string());
  SheResult r;
  while (std::getline(is, line) && line != "end") {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "cells") ls >> r.cells;
    else if (key == "h") ls >> r.h;
    else if (key == "dt") ls >> r.dt;
    else if (key == "eps") ls >> r.eps;
    else if (key == "t_end") ls >> r.t_end;
    else if (key == "steps") ls >> r.steps;
    else if (key == "seed") ls >> r.seed;
    else if (key == "realization") ls >> r.realization;
  }
  if (line != "end" || r.cells <= 0) fail(ErrorKind::kIo, "truncated snapshot header");
  r.u.resize(static_cast<std::size_t>(r.cells) * r.cells);
  for (double& v : r.u) {
    unsigned char buf[8];
    if (!is.read(reinterpret_cast<char*>(buf), 8)) fail(ErrorKind::kIo, "truncated snapshot payload");
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
    v = std::bit_cast<double>(bits);
  }
  r.u_origin = r.u[0];
  double s = 0.0;
  for (double v : r.u) s += v;
  r.u_mean = s / static_cast<double>(r.u.size());
  return r;
}

}  // namespace mrg
