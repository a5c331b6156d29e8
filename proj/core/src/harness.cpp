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


#include "mrg/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mrg/chaos.hpp"
#include "mrg/error.hpp"
#include "mrg/parallel.hpp"
#include "mrg/rng.hpp"
#include "mrg/she.hpp"

#ifndef MRG_VERSION
#define MRG_VERSION "unknown"
#endif

namespace mrg {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos == v.size() && std::isfinite(d)) return d;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::kConfig, "key '" + key + "': not a number: '" + v + "'");
}

long long to_integer(const std::string& key, const std::string& v) {
  // Accepts 4096, 2^12 and 1e4.
  const auto caret = v.find('^');
  if (caret != std::string::npos) {
    const long long base = to_integer(key, v.substr(0, caret));
    const long long exp = to_integer(key, v.substr(caret + 1));
    if (base < 0 || exp < 0 || exp > 62) fail(ErrorKind::kConfig, "key '" + key + "': bad power " + v);
    long long r = 1;
    for (long long i = 0; i < exp; ++i) r *= base;
    return r;
  }
  const double d = to_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 9.0e18) {
    fail(ErrorKind::kConfig, "key '" + key + "': not an integer: '" + v + "'");
  }
  return static_cast<long long>(d);
}

std::string cell_tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : os_(path) {
    if (!os_) fail(ErrorKind::kIo, "cannot open " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << '\n';
  }
  void values(std::initializer_list<double> vs) {
    std::vector<std::string> cells;
    for (double v : vs) cells.push_back(format_double(v));
    row(cells);
  }

 private:
  std::ofstream os_;
};

std::string fd(double v) { return format_double(v); }
std::string fi(long long v) { return std::to_string(v); }

LatticeKernel make_kernel(const ExperimentConfig& c, int n_max) {
  if (c.kernel_cache.empty()) return build_kernel(c.model, n_max, c.tail_tol);
  return build_kernel_cached(c.kernel_cache, c.model, n_max, c.tail_tol);
}

int max_N(const ExperimentConfig& c) {
  return *std::max_element(c.N_grid.begin(), c.N_grid.end());
}

EtaParams eta_for(const OverlapTable& overlap, DisorderLaw law, FieldMode mode, int N,
                  double beta_hat) {
  return make_eta_params(law, mode, beta_schedule(overlap, N, beta_hat));
}

struct CellRunner {
  std::vector<CellReport>& reports;

  template <typename Fn>
  void operator()(const std::string& name, const std::filesystem::path& csv, Fn&& fn) {
    CellReport r;
    r.name = name;
    r.csv = csv;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const Error& e) {
      r.ok = false;
      r.error_kind = e.kind();
      r.error = e.what();
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
    r.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    reports.push_back(std::move(r));
  }
};

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SampleSummary>& rows) {
  CsvWriter w(path, {"model", "N", "beta_hat", "samples", "mean_Z", "se_mean_Z", "var_Z",
                     "se_var_Z", "exact_second_moment", "mean_log_Z", "se_mean_log_Z",
                     "var_log_Z", "kurtosis_log_Z", "frac_moment", "se_frac_moment",
                     "ks_lognormal", "filtered"});
  for (const auto& s : rows) {
    w.row({std::string(to_string(s.model)), fi(s.N), fd(s.beta_hat), fi(s.samples),
           fd(s.mean_Z), fd(s.se_mean_Z), fd(s.var_Z), fd(s.se_var_Z),
           fd(s.exact_second_moment), fd(s.mean_log_Z), fd(s.se_mean_log_Z),
           fd(s.var_log_Z), fd(s.kurtosis_log_Z), fd(s.frac_moment), fd(s.se_frac_moment),
           fd(s.ks_lognormal), fi(static_cast<long long>(s.filtered))});
  }
}

void write_manifest(const ExperimentConfig& c, const RunReport& report) {
  nlohmann::json m;
  m["experiment"] = std::string(to_string(c.experiment));
  m["version"] = MRG_VERSION;
  m["rng_scheme"] = kRngSchemeId;
  m["seed"] = c.seed;
  m["threads"] = c.threads;
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [k, v] : c.raw) cfg[k] = v;
  m["config"] = cfg;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& r : report.cells) {
    nlohmann::json j;
    j["name"] = r.name;
    j["ok"] = r.ok;
    if (!r.ok) {
      j["error"] = r.error;
      if (r.error_kind) j["error_kind"] = std::string(to_string(*r.error_kind));
    }
    j["csv"] = r.csv.filename().string();
    j["runtime_seconds"] = r.runtime_seconds;
    cells.push_back(j);
  }
  m["cells"] = cells;
  m["exit_code"] = report.exit_code;
  m["calibration_note"] =
      "KS, covariance and trend bands are calibration choices without a finite-N rate";
  std::ofstream os(c.out_dir / "manifest.json");
  if (!os) fail(ErrorKind::kIo, "cannot write manifest.json");
  os << m.dump(2) << '\n';
}

// --- experiments ----------------------------------------------------------

void run_kernel(const ExperimentConfig& c, const LatticeKernel& kernel,
                const OverlapTable& overlap, CellRunner& cell) {
  for (int N : c.N_grid) {
    const auto path = c.out_dir / ("kernel_N" + fi(N) + ".csv");
    cell("kernel_N" + fi(N), path, [&] {
      require(N <= overlap.horizon(), ErrorKind::kRange, "N beyond kernel horizon");
      CsvWriter w(path, {"n", "r_n", "R_n", "tail_mass", "llt"});
      for (int n = 1; n <= N; ++n) {
        w.values({static_cast<double>(n), overlap.r[n], overlap.R[n], kernel.tail_mass(n),
                  llt_diagnostic(kernel, n)});
      }
    });
  }
}

void run_single(const ExperimentConfig& c, const LatticeKernel& kernel,
                const OverlapTable& overlap, CellRunner& cell, RunReport& report) {
  for (int N : c.N_grid) {
    for (double b : c.beta_hat_grid) {
      const std::string name = "single_N" + fi(N) + "_b" + cell_tag(b);
      const auto path = c.out_dir / (name + ".csv");
      cell(name, path, [&] {
        const auto z = sample_origin(kernel, overlap, c.law, c.mode, c.seed, N, b, c.samples,
                                     c.threads);
        SampleSummary s = summarize_samples(z, c.model, N, b, c.theta, c.batches);
        s.exact_second_moment =
            second_moment_exact(overlap, eta_for(overlap, c.law, c.mode, N, b), N);
        CsvWriter w(path, {"realization", "Z"});
        for (std::size_t i = 0; i < z.size(); ++i) w.row({fi(i), fd(z[i])});
        report.summaries.push_back(s);
      });
    }
  }
}

void run_multipoint(const ExperimentConfig& c, const LatticeKernel& kernel,
                    const OverlapTable& overlap, CellRunner& cell) {
  const auto spath = c.out_dir / "multipoint_summary.csv";
  CsvWriter summary(spath, {"N", "beta_hat", "zeta_target", "zeta", "norm", "exact_E_ZZp",
                            "exact_E_Z2", "limit_E_ZZp", "cov_log_mc", "se_cov_log_mc",
                            "var_log_mc", "cov_limit", "filtered"});
  for (int N : c.N_grid) {
    for (double b : c.beta_hat_grid) {
      for (double zt : c.zeta_targets) {
        const std::string name =
            "multipoint_N" + fi(N) + "_b" + cell_tag(b) + "_z" + cell_tag(zt);
        const auto path = c.out_dir / (name + ".csv");
        cell(name, path, [&] {
          const ZetaLayout L = layout_for_zeta(overlap, N, zt);
          const EtaParams eta = eta_for(overlap, c.law, c.mode, N, b);
          const double cross = cross_moment_exact(kernel, overlap, eta, N, L.X, L.Xp);
          const double second = second_moment_exact(overlap, eta, N);
          const std::vector<SpaceTime> pts = {L.X, L.Xp};
          auto rows = parallel_map(c.samples, c.threads, [&](std::size_t s) {
            const DisorderField f{c.seed, s, c.law, c.mode};
            return sample_partition(kernel, overlap, f, N, b, pts);
          });
          CsvWriter w(path, {"realization", "Z_X", "Z_Xp"});
          for (std::size_t s = 0; s < rows.size(); ++s) {
            w.row({fi(s), fd(rows[s][0]), fd(rows[s][1])});
          }
          const LogCovariance lc = covariance_of_logs(rows, c.batches);
          const double limit = b < 1.0 ? (1.0 - b * b * L.zeta) / (1.0 - b * b) : kNaN;
          const double cl = b < 1.0 ? cov_limit(b, L.zeta) : kNaN;
          summary.row({fi(N), fd(b), fd(zt), fd(L.zeta),
                       fi(std::max(std::abs(L.Xp.t - L.X.t), std::abs(L.Xp.x.x1))),
                       fd(cross), fd(second), fd(limit), fd(lc.at(0, 1)), fd(lc.se_at(0, 1)),
                       fd(lc.at(0, 0)), fd(cl), fi(static_cast<long long>(lc.filtered))});
        });
      }
    }
  }
}

void run_field(const ExperimentConfig& c, const LatticeKernel& kernel,
               const OverlapTable& overlap, CellRunner& cell) {
  const FieldWeight psi = parse_psi(c.psi);
  const int d = dimension(c.model);
  CsvWriter summary(c.out_dir / "field_summary.csv",
                    {"N", "beta_hat", "var_J", "se_var_J", "mean_J", "exact_var_J",
                     "sigma_psi_sq", "sigma_psi_err"});
  for (int N : c.N_grid) {
    for (double b : c.beta_hat_grid) {
      const std::string name = "field_N" + fi(N) + "_b" + cell_tag(b);
      const auto path = c.out_dir / (name + ".csv");
      cell(name, path, [&] {
        PolymerOptions opt;
        opt.region_radius = field_support_radius(c.model, N, psi);
        const EtaParams eta = eta_for(overlap, c.law, c.mode, N, b);
        auto J = parallel_map(c.samples, c.threads, [&](std::size_t s) {
          const DisorderField f{c.seed, s, c.law, c.mode};
          const PartitionSurface surf = partition_surface(kernel, f, eta, N, opt);
          return field_functional_J(surf, overlap, psi);
        });
        CsvWriter w(path, {"realization", "J"});
        for (std::size_t s = 0; s < J.size(); ++s) w.row({fi(s), fd(J[s])});
        const Moments m = moments(J);
        const double exact =
            d == 0 ? field_variance_exact(kernel, overlap, eta, N, psi) : kNaN;
        QuadratureResult q{kNaN, kNaN};
        if (b < 1.0) {
          CovKernel ck{d, d == 0 ? renewal_llt_constant(kernel) : 1.0};
          q = sigma_psi_quadrature(ck, make_limit_law(b), psi);
        }
        summary.row({fi(N), fd(b), fd(m.var), fd(batch_variance_se(J, c.batches)),
                     fd(m.mean), fd(exact), fd(q.value), fd(q.error)});
      });
    }
  }
}

void run_theta(const ExperimentConfig& c, const LatticeKernel& kernel,
               const OverlapTable& overlap, CellRunner& cell) {
  std::vector<IndexSequence> seqs;
  for (int i = 1; i <= c.M; ++i) seqs.push_back({i});
  if (c.M >= 3) seqs.push_back({3, 1});
  CsvWriter summary(c.out_dir / "theta_summary.csv",
                    {"N", "M", "sequence", "var", "se_var", "exact_var", "kurtosis",
                     "max_abs_corr"});
  const double b = c.beta_hat_grid.empty() ? 0.5 : c.beta_hat_grid.front();
  for (int N : c.N_grid) {
    const std::string name = "theta_N" + fi(N) + "_M" + fi(c.M);
    const auto path = c.out_dir / (name + ".csv");
    cell(name, path, [&] {
      const BlockPartition blocks = block_boundaries(overlap, N, c.M);
      const EtaParams eta = eta_for(overlap, c.law, c.mode, N, b);
      auto rows = parallel_map(c.samples, c.threads, [&](std::size_t s) {
        const DisorderField f{c.seed, s, c.law, c.mode};
        std::vector<double> v;
        for (const auto& i : seqs) v.push_back(theta_block(kernel, overlap, f, eta, N, blocks, i));
        return v;
      });
      std::vector<std::string> header = {"realization"};
      std::vector<std::vector<double>> cols(seqs.size());
      for (const auto& i : seqs) {
        std::string tag = "theta";
        for (int v : i) tag += "_" + fi(v);
        header.push_back(tag);
      }
      CsvWriter w(path, header);
      for (std::size_t s = 0; s < rows.size(); ++s) {
        std::vector<std::string> r = {fi(s)};
        for (std::size_t k = 0; k < seqs.size(); ++k) {
          r.push_back(fd(rows[s][k]));
          cols[k].push_back(rows[s][k]);
        }
        w.row(r);
      }
      for (std::size_t k = 0; k < seqs.size(); ++k) {
        double max_corr = 0.0;
        for (std::size_t l = 0; l < seqs.size(); ++l) {
          if (l != k) max_corr = std::max(max_corr, std::abs(correlation(cols[k], cols[l])));
        }
        const Moments m = moments(cols[k]);
        std::string tag;
        for (int v : seqs[k]) tag += (tag.empty() ? "" : " ") + fi(v);
        const double exact = c.model == ModelKind::kRenewalHalf
                                 ? eta.var_eta * theta_variance_exact(overlap, N, blocks, seqs[k])
                                 : kNaN;
        summary.row({fi(N), fi(c.M), tag, fd(m.var), fd(batch_variance_se(cols[k], c.batches)),
                     fd(exact), fd(m.kurtosis), fd(max_corr)});
      }
    });
  }
}

void run_she(const ExperimentConfig& c, const OverlapTable& overlap, CellRunner& cell) {
  CsvWriter summary(c.out_dir / "she_summary.csv",
                    {"kind", "N", "eps", "beta_hat", "value", "se", "target"});
  for (int N : c.N_grid) {
    for (double b : c.beta_hat_grid) {
      const std::string name = "she_surrogate_N" + fi(N) + "_b" + cell_tag(b);
      cell(name, c.out_dir / "she_summary.csv", [&] {
        const double eps = 1.0 / std::sqrt(static_cast<double>(N));
        const double m2 = she_surrogate_second_moment(overlap, eps, b, c.law);
        const double target = b < 1.0 ? 1.0 / (1.0 - b * b) : kNaN;
        summary.row({"surrogate_second_moment", fi(N), fd(eps), fd(b), fd(m2), fd(0.0),
                     fd(target)});
      });
    }
  }
  const Mollifier j = make_mollifier(c.she_eps, 0.5 * c.she_eps);
  for (double b : c.beta_hat_grid) {
    const std::string name = "she_grid_b" + cell_tag(b);
    const auto path = c.out_dir / (name + ".csv");
    cell(name, path, [&] {
      auto us = parallel_map(c.she_runs, c.threads, [&](std::size_t s) {
        SheRun run;
        run.eps = c.she_eps;
        run.beta_hat = b;
        run.h = 0.5 * c.she_eps;
        run.cells = c.she_cells;
        run.seed = c.seed;
        run.realization = s;
        return she_grid_solve(run, j, c.she_t_end).u_origin;
      });
      CsvWriter w(path, {"run", "u_origin"});
      for (std::size_t s = 0; s < us.size(); ++s) w.row({fi(s), fd(us[s])});
      const Moments m = moments(us);
      const int batches = std::min<int>(c.batches, static_cast<int>(us.size() / 2));
      summary.row({"grid_mean", fi(c.she_cells), fd(c.she_eps), fd(b), fd(m.mean),
                   fd(batch_mean_se(us, batches)), fd(1.0)});
      summary.row({"grid_variance", fi(c.she_cells), fd(c.she_eps), fd(b), fd(m.var),
                   fd(batch_variance_se(us, batches)), fd(kNaN)});
    });
  }
}

void run_strong(const ExperimentConfig& c, const LatticeKernel& kernel,
                const OverlapTable& overlap, CellRunner& cell) {
  const auto path = c.out_dir / "strong.csv";
  cell("strong", path, [&] {
    const StrongScan scan = strong_disorder_scan(c, kernel, overlap);
    CsvWriter w(path, {"N", "beta_hat", "frac_moment", "se", "bound", "bound_ok",
                       "monotone_ok"});
    for (const auto& s : scan.cells) {
      w.row({fi(s.N), fd(s.beta_hat), fd(s.moment.value), fd(s.moment.se), fd(s.bound),
             fi(s.bound_ok), fi(s.monotone_ok)});
    }
  });
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::kKernel: return "kernel";
    case Experiment::kSingle: return "single";
    case Experiment::kMultipoint: return "multipoint";
    case Experiment::kField: return "field";
    case Experiment::kTheta: return "theta";
    case Experiment::kShe: return "she";
    case Experiment::kStrong: return "strong";
  }
  return "unknown";
}

Experiment parse_experiment(std::string_view name) {
  for (auto e : {Experiment::kKernel, Experiment::kSingle, Experiment::kMultipoint,
                 Experiment::kField, Experiment::kTheta, Experiment::kShe,
                 Experiment::kStrong}) {
    if (name == to_string(e)) return e;
  }
  fail(ErrorKind::kConfig, "unknown experiment '" + std::string(name) + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

FieldWeight parse_psi(std::string_view text) {
  const std::string s = trim(text);
  if (s == "constant") return FieldWeight::constant(1.0, 0.5);
  if (s.rfind("constant:", 0) == 0) {
    const double h = to_double("psi", s.substr(9));
    require(h > 0.0, ErrorKind::kConfig, "psi half width must be positive");
    return FieldWeight::constant(1.0, h);
  }
  fail(ErrorKind::kConfig, "unknown psi '" + s + "'");
}

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (key == "experiment") {
    c.experiment = parse_experiment(value);
  } else if (key == "model") {
    c.model = parse_model(value);
  } else if (key == "N_grid") {
    c.N_grid.clear();
    for (const auto& v : split_list(value)) {
      const long long n = to_integer(key, v);
      require(n >= 1 && n <= (1LL << 30), ErrorKind::kConfig, "N out of range: " + v);
      c.N_grid.push_back(static_cast<int>(n));
    }
  } else if (key == "M") {
    c.M = static_cast<int>(to_integer(key, value));
  } else if (key == "beta_hat_grid") {
    c.beta_hat_grid.clear();
    for (const auto& v : split_list(value)) c.beta_hat_grid.push_back(to_double(key, v));
  } else if (key == "law") {
    c.law = parse_law(value);
  } else if (key == "mode") {
    if (value == "omega") c.mode = FieldMode::kOmega;
    else if (value == "direct_eta") c.mode = FieldMode::kDirectEta;
    else fail(ErrorKind::kConfig, "mode must be omega or direct_eta");
  } else if (key == "samples") {
    c.samples = static_cast<std::size_t>(to_integer(key, value));
  } else if (key == "batches") {
    c.batches = static_cast<int>(to_integer(key, value));
  } else if (key == "theta") {
    c.theta = to_double(key, value);
  } else if (key == "zeta_targets") {
    c.zeta_targets.clear();
    for (const auto& v : split_list(value)) c.zeta_targets.push_back(to_double(key, v));
  } else if (key == "psi") {
    parse_psi(value);
    c.psi = value;
  } else if (key == "tail_tol") {
    c.tail_tol = to_double(key, value);
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(to_integer(key, value));
  } else if (key == "threads") {
    c.threads = static_cast<int>(to_integer(key, value));
  } else if (key == "out") {
    c.out_dir = value;
  } else if (key == "kernel_cache") {
    c.kernel_cache = value;
  } else if (key == "she_eps") {
    c.she_eps = to_double(key, value);
  } else if (key == "she_cells") {
    c.she_cells = static_cast<int>(to_integer(key, value));
  } else if (key == "she_runs") {
    c.she_runs = static_cast<std::size_t>(to_integer(key, value));
  } else if (key == "she_t_end") {
    c.she_t_end = to_double(key, value);
  } else {
    fail(ErrorKind::kConfig, "unknown key '" + key + "'");
  }
  c.raw[key] = value;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::kConfig, "line " + fi(lineno) + ": expected key=value");
    }
    set_config_value(c, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::kConfig, "cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& c) {
  require(!c.N_grid.empty(), ErrorKind::kConfig, "N_grid must be nonempty");
  if (c.experiment != Experiment::kKernel) {
    require(!c.beta_hat_grid.empty(), ErrorKind::kConfig, "beta_hat_grid must be nonempty");
  }
  for (double b : c.beta_hat_grid) {
    require(b >= 0.0, ErrorKind::kConfig, "beta_hat values must be >= 0");
  }
  require(c.batches >= kMinBatches, ErrorKind::kConfig,
          "batches must be >= " + fi(kMinBatches));
  require(c.samples >= 2 * static_cast<std::size_t>(c.batches), ErrorKind::kConfig,
          "samples must be >= 2 x batches");
  require(c.theta > 0.0 && c.theta < 1.0, ErrorKind::kConfig, "theta must lie in (0, 1)");
  require(c.M >= 1, ErrorKind::kConfig, "M must be >= 1");
  require(c.tail_tol > 0.0 && c.tail_tol < 1.0, ErrorKind::kConfig,
          "tail_tol must lie in (0, 1)");
  if (c.experiment == Experiment::kMultipoint) {
    require(!c.zeta_targets.empty(), ErrorKind::kConfig, "zeta_targets must be nonempty");
    for (double z : c.zeta_targets) {
      require(z > 0.0 && z <= 1.0, ErrorKind::kConfig, "zeta targets must lie in (0, 1]");
    }
  }
  if (c.experiment == Experiment::kShe) {
    require(c.model == ModelKind::kSrw2d, ErrorKind::kConfig, "she runs on SRW2D");
    require(c.she_eps > 0.0 && c.she_eps < 1.0, ErrorKind::kConfig, "she_eps in (0, 1)");
    require(c.she_runs >= 2, ErrorKind::kConfig, "she_runs must be >= 2");
  }
}

SampleSummary summarize_samples(std::span<const double> z, ModelKind model, int N,
                                double beta_hat, double theta, int batches) {
  SampleSummary s;
  s.model = model;
  s.N = N;
  s.beta_hat = beta_hat;
  s.samples = z.size();
  const Moments mz = moments(z);
  s.mean_Z = mz.mean;
  s.var_Z = mz.var;
  s.se_mean_Z = batch_mean_se(z, batches);
  s.se_var_Z = batch_variance_se(z, batches);
  std::vector<double> pos, logs;
  for (double v : z) {
    if (v > 0.0) {
      pos.push_back(v);
      logs.push_back(std::log(v));
    } else {
      ++s.filtered;
    }
  }
  s.kurtosis_log_Z = kNaN;
  s.ks_lognormal = kNaN;
  s.mean_log_Z = kNaN;
  s.var_log_Z = kNaN;
  s.se_mean_log_Z = kNaN;
  s.frac_moment = kNaN;
  s.se_frac_moment = kNaN;
  if (logs.size() >= 2 * static_cast<std::size_t>(batches)) {
    const Moments ml = moments(logs);
    s.mean_log_Z = ml.mean;
    s.var_log_Z = ml.var;
    s.kurtosis_log_Z = ml.kurtosis;
    s.se_mean_log_Z = batch_mean_se(logs, batches);
    const FractionalMoment fm = fractional_moment(pos, theta, batches);
    s.frac_moment = fm.value;
    s.se_frac_moment = fm.se;
    if (beta_hat < 1.0 && pos.size() >= 100) {
      s.ks_lognormal = ks_lognormal(pos, make_limit_law(beta_hat));
    }
  }
  return s;
}

std::vector<double> sample_partition(const LatticeKernel& kernel, const OverlapTable& overlap,
                                     const DisorderField& field, int N, double beta_hat,
                                     const std::vector<SpaceTime>& points,
                                     const PolymerOptions& options) {
  if (beta_hat == 0.0) return std::vector<double>(points.size(), 1.0);
  const EtaParams eta =
      make_eta_params(field.law, field.mode, beta_schedule(overlap, N, beta_hat));
  PolymerOptions opt = options;
  for (const auto& X : points) {
    opt.region_radius = std::max({opt.region_radius, std::abs(X.x.x1), std::abs(X.x.x2)});
  }
  const PartitionSurface surface = partition_surface(kernel, field, eta, N, opt);
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& X : points) out.push_back(surface.at(X.x, X.t));
  return out;
}

std::vector<double> sample_origin(const LatticeKernel& kernel, const OverlapTable& overlap,
                                  DisorderLaw law, FieldMode mode, std::uint64_t seed, int N,
                                  double beta_hat, std::size_t count, int threads,
                                  const PolymerOptions& options) {
  const std::vector<SpaceTime> origin = {SpaceTime{}};
  return parallel_map(count, threads, [&](std::size_t s) {
    const DisorderField f{seed, s, law, mode};
    return sample_partition(kernel, overlap, f, N, beta_hat, origin, options)[0];
  });
}

ZetaLayout layout_for_zeta(const OverlapTable& overlap, int N, double zeta) {
  require(zeta > 0.0 && zeta <= 1.0, ErrorKind::kDomain, "zeta must lie in (0, 1]");
  require(N >= 2 && N <= overlap.horizon(), ErrorKind::kRange, "N outside overlap horizon");
  const int d = dimension(overlap.model);
  // Time shifts stay within the first half of the horizon.
  const int cap = d == 0 ? N / 2 : N;
  int n = 1;
  while (n < cap && overlap.R[n] < zeta * overlap.R[N]) ++n;
  ZetaLayout L;
  L.zeta_target = zeta;
  if (d == 0) {
    L.Xp.t = n;
  } else if (d == 1) {
    L.Xp.x.x1 = n;
  } else {
    // Smallest |x|^2 >= n on the even sublattice a + b = 0 mod 2; the walks
    // never meet across parity classes.
    std::int64_t best = -1;
    const auto top = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n)))) + 1;
    for (std::int64_t a = 0; a <= top; ++a) {
      std::int64_t b = 0;
      while (a * a + b * b < n || (a + b) % 2 != 0) ++b;
      if (best < 0 || a * a + b * b < best) {
        best = a * a + b * b;
        L.Xp.x.x1 = std::max(a, b);
        L.Xp.x.x2 = std::min(a, b);
      }
    }
  }
  L.zeta = triple_norm_zeta(overlap, N, L.X, L.Xp).zeta;
  return L;
}

StrongScan strong_disorder_scan(const ExperimentConfig& c, const LatticeKernel& kernel,
                                const OverlapTable& overlap) {
  require(c.theta > 0.0 && c.theta < 1.0, ErrorKind::kDomain, "theta must lie in (0, 1)");
  std::vector<double> grid = c.beta_hat_grid;
  std::sort(grid.begin(), grid.end());
  StrongScan scan;
  const double th = c.theta;
  for (int N : c.N_grid) {
    // Common random numbers: realization s uses the same disorder at every beta_hat.
    std::vector<std::vector<double>> powers;
    for (double b : grid) {
      const auto z = sample_origin(kernel, overlap, c.law, c.mode, c.seed, N, b, c.samples,
                                   c.threads);
      std::vector<double> p(z.size());
      for (std::size_t s = 0; s < z.size(); ++s) p[s] = std::pow(std::max(z[s], 0.0), th);
      powers.push_back(std::move(p));
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      StrongCell cell;
      cell.N = N;
      cell.beta_hat = grid[k];
      cell.moment = {moments(powers[k]).mean, batch_mean_se(powers[k], c.batches)};
      if (grid[k] < 1.0) {
        cell.bound = std::pow(1.0 - grid[k] * grid[k], -th * (th - 1.0) / 2.0);
        cell.bound_ok = cell.moment.value <= cell.bound + 3.0 * cell.moment.se;
      } else {
        cell.bound = kNaN;
      }
      if (k > 0) {
        std::vector<double> diff(powers[k].size());
        for (std::size_t s = 0; s < diff.size(); ++s) diff[s] = powers[k][s] - powers[k - 1][s];
        const double m = moments(diff).mean;
        cell.monotone_ok = m <= 2.0 * batch_mean_se(diff, c.batches);
        if (!cell.monotone_ok) ++scan.monotonicity_violations;
      }
      scan.cells.push_back(cell);
    }
  }
  for (double target : {1.0, 1.2}) {
    std::vector<FractionalMoment> trend;
    for (const auto& cell : scan.cells) {
      if (std::abs(cell.beta_hat - target) < 1e-12) trend.push_back(cell.moment);
    }
    if (trend.empty()) continue;
    bool dec = true;
    for (std::size_t k = 1; k < trend.size(); ++k) {
      const double se = std::hypot(trend[k].se, trend[k - 1].se);
      if (trend[k].value - trend[k - 1].value > 2.0 * se) dec = false;
    }
    scan.n_trend[target] = trend;
    scan.n_trend_decreasing[target] = dec;
  }
  return scan;
}

int exit_code_for(const std::vector<CellReport>& cells) {
  int code = 0;
  for (const auto& r : cells) {
    if (r.ok) continue;
    if (r.error_kind == ErrorKind::kSizing || r.error_kind == ErrorKind::kCombinatorial) {
      return 4;
    }
    code = 3;
  }
  return code;
}

RunReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  std::filesystem::create_directories(config.out_dir);
  RunReport report;
  CellRunner cell{report.cells};

  std::optional<LatticeKernel> kernel;
  std::optional<OverlapTable> overlap;
  cell("setup_kernel", {}, [&] {
    kernel = make_kernel(config, max_N(config));
    overlap = overlap_table(*kernel);
  });
  if (kernel && overlap) {
    switch (config.experiment) {
      case Experiment::kKernel: run_kernel(config, *kernel, *overlap, cell); break;
      case Experiment::kSingle: run_single(config, *kernel, *overlap, cell, report); break;
      case Experiment::kMultipoint: run_multipoint(config, *kernel, *overlap, cell); break;
      case Experiment::kField: run_field(config, *kernel, *overlap, cell); break;
      case Experiment::kTheta: run_theta(config, *kernel, *overlap, cell); break;
      case Experiment::kShe: run_she(config, *overlap, cell); break;
      case Experiment::kStrong: run_strong(config, *kernel, *overlap, cell); break;
    }
  }
  if (!report.summaries.empty()) write_summary_csv(config.out_dir / "summary.csv", report.summaries);
  report.exit_code = exit_code_for(report.cells);
  write_manifest(config, report);
  return report;
}

}  // namespace mrg
