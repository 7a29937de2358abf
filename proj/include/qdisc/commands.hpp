// Copyright 2026 The qdisc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// The work behind each CLI subcommand, returning plain tables. Argument
// parsing lives in tools/; everything here is callable from tests.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qdisc/photostats.hpp"
#include "qdisc/receivers.hpp"
#include "qdisc/simkit.hpp"
#include "qdisc/table.hpp"

namespace qdisc {

inline std::vector<double> logspace(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw std::invalid_argument("logspace needs 0 < lo < hi, n >= 2");
  std::vector<double> out(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (!(hi > lo) || n < 2) throw std::invalid_argument("linspace needs lo < hi, n >= 2");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = hi;
  return out;
}

// 60 log-spaced signal strengths in [1e-3, 2].
inline std::vector<double> default_nbar_grid() { return logspace(1e-3, 2.0, 60); }

namespace detail {

inline double parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace detail

inline void validate_nbar_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("nbar grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i])) {
      throw std::invalid_argument("nbar grid values must be finite and nonnegative");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("nbar grid must be strictly ascending");
  }
}

// Grid syntax: "a,b,c", "log:lo:hi:n" or "lin:lo:hi:n".
inline std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> grid;
  if (text.rfind("log:", 0) == 0 || text.rfind("lin:", 0) == 0) {
    const auto parts = detail::split(text.substr(4), ':');
    if (parts.size() != 3) throw std::invalid_argument("grid must be kind:lo:hi:n");
    const double lo = detail::parse_number(parts[0]);
    const double hi = detail::parse_number(parts[1]);
    const double n = detail::parse_number(parts[2]);
    if (!(n >= 2.0) || n != std::floor(n)) throw std::invalid_argument("grid point count must be an integer >= 2");
    grid = text[1] == 'o' ? logspace(lo, hi, static_cast<std::size_t>(n))
                          : linspace(lo, hi, static_cast<std::size_t>(n));
  } else {
    for (auto part : detail::split(text, ',')) grid.push_back(detail::parse_number(part));
  }
  validate_nbar_grid(grid);
  return grid;
}

inline constexpr ReceiverKind kAllReceivers[] = {ReceiverKind::DirectDetection, ReceiverKind::Homodyne,
                                                 ReceiverKind::Kennedy, ReceiverKind::GeneralizedKennedy};

struct SweepConfig {
  std::vector<double> nbar_grid = default_nbar_grid();
  std::vector<ReceiverKind> receivers{std::begin(kAllReceivers), std::end(kAllReceivers)};
  bool helstrom = true;
  bool chernoff = true;
  std::optional<std::size_t> trials;  // enables the Monte Carlo columns
  std::uint64_t seed = 1;
  double prior_coherent = 0.5;
  // Monte Carlo columns only; applied to the Kennedy and GK simulations.
  double extinction_db = std::numeric_limits<double>::infinity();
};

// Receivers in canonical column order (dd, hd, kennedy, gk), deduplicated.
inline std::vector<ReceiverKind> canonical_receivers(const std::vector<ReceiverKind>& in) {
  std::vector<ReceiverKind> out;
  for (ReceiverKind k : kAllReceivers) {
    if (std::find(in.begin(), in.end(), k) != in.end()) out.push_back(k);
  }
  return out;
}

// One row per signal strength. Columns, in order and only when requested:
//   nbar_s, p_dd, p_hd, p_kennedy, p_gk, beta_gk, p_helstrom, chernoff_q,
//   chernoff_s, then <r>_emp, <r>_ci_lo, <r>_ci_hi per receiver with trials.
inline Table cmd_curves(const SweepConfig& config) {
  validate_nbar_grid(config.nbar_grid);
  if (config.trials && *config.trials < 1) throw std::invalid_argument("trials must be positive");
  const auto receivers = canonical_receivers(config.receivers);
  Table t;
  t.columns.push_back("nbar_s");
  for (ReceiverKind k : receivers) {
    t.columns.push_back("p_" + std::string(to_string(k)));
    if (k == ReceiverKind::GeneralizedKennedy) t.columns.push_back("beta_gk");
  }
  if (config.helstrom) t.columns.push_back("p_helstrom");
  if (config.chernoff) {
    t.columns.push_back("chernoff_q");
    t.columns.push_back("chernoff_s");
  }
  if (config.trials) {
    for (ReceiverKind k : receivers) {
      const std::string name(to_string(k));
      t.columns.push_back(name + "_emp");
      t.columns.push_back(name + "_ci_lo");
      t.columns.push_back(name + "_ci_hi");
    }
  }

  for (std::size_t row_i = 0; row_i < config.nbar_grid.size(); ++row_i) {
    const DiscriminationProblem problem{config.nbar_grid[row_i], config.prior_coherent};
    problem.validate();
    std::vector<Cell> row{problem.nbar_s};
    std::optional<GkOperatingPoint> gk;
    for (ReceiverKind k : receivers) {
      switch (k) {
        case ReceiverKind::DirectDetection: row.emplace_back(dd_error(problem)); break;
        case ReceiverKind::Homodyne: row.emplace_back(homodyne_error(problem)); break;
        case ReceiverKind::Kennedy: row.emplace_back(kennedy_error(problem)); break;
        case ReceiverKind::GeneralizedKennedy:
          gk = gk_error(problem);
          row.emplace_back(gk->p_err);
          row.emplace_back(gk->beta);
          break;
      }
    }
    if (config.helstrom) row.emplace_back(helstrom_error(problem));
    if (config.chernoff) {
      const ChernoffResult c = chernoff_bound(problem);
      row.emplace_back(c.q);
      row.emplace_back(c.s_opt);
    }
    if (config.trials) {
      for (ReceiverKind k : receivers) {
        ReceiverSpec spec = ReceiverSpec::ideal(k);
        if (is_displacement_kind(k)) spec.extinction_db = config.extinction_db;
        if (k == ReceiverKind::GeneralizedKennedy) spec.beta = gk->beta;
        const auto stream = 100 + static_cast<std::uint64_t>(k);
        const EmpiricalError e =
            empirical_error(run_trials(spec, problem, *config.trials, derive_stream_seed(config.seed, stream, row_i)));
        row.emplace_back(e.p_hat);
        row.emplace_back(e.ci_lo);
        row.emplace_back(e.ci_hi);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

// Rows (n, probability) for poisson <mean>, bose_einstein <nbar> or
// laguerre <nbar_th> <d2>.
inline Table cmd_dist(std::string_view family, const std::vector<double>& params,
                      std::optional<std::size_t> n_cap = std::nullopt) {
  auto need = [&](std::size_t n) {
    if (params.size() != n) {
      throw std::invalid_argument(std::string(family) + " takes " + std::to_string(n) + " parameter(s)");
    }
  };
  CountDistribution d;
  if (family == "poisson") {
    need(1);
    d = n_cap ? poisson_pmf(params[0], *n_cap) : poisson_pmf(params[0]);
  } else if (family == "bose_einstein") {
    need(1);
    d = n_cap ? bose_einstein_pmf(params[0], *n_cap) : bose_einstein_pmf(params[0]);
  } else if (family == "laguerre") {
    need(2);
    d = n_cap ? laguerre_pmf(params[0], params[1], *n_cap) : laguerre_pmf(params[0], params[1]);
  } else {
    throw std::invalid_argument("unknown distribution family '" + std::string(family) + "'");
  }
  Table t{{"n", "probability"}, {}};
  for (std::size_t n = 0; n < d.pmf.size(); ++n) {
    t.rows.push_back({static_cast<std::int64_t>(n), d.pmf[n]});
  }
  return t;
}

struct LoSweepConfig {
  double nbar_s = 0.05;
  double beta_min = 0.0;
  double beta_max = 1.0;
  std::size_t steps = 51;
  std::size_t trials = 0;  // 0: analytic columns only
  std::uint64_t seed = 1;
  double prior_coherent = 0.5;
  double extinction_db = std::numeric_limits<double>::infinity();
  DetectorModel detector = DetectorModel::ideal();
};

// Columns: beta, nbar_lo, p_analytic, p_empirical, ci_lo, ci_hi.
inline Table cmd_losweep(const LoSweepConfig& config) {
  if (!(config.beta_min >= 0.0) || !(config.beta_max > config.beta_min) || !std::isfinite(config.beta_max)) {
    throw std::invalid_argument("losweep needs 0 <= beta_min < beta_max");
  }
  if (config.steps < 2) throw std::invalid_argument("losweep needs steps >= 2");
  const DiscriminationProblem problem{config.nbar_s, config.prior_coherent};
  ReceiverSpec spec = ReceiverSpec::ideal(ReceiverKind::GeneralizedKennedy);
  spec.extinction_db = config.extinction_db;
  spec.detector = config.detector;
  const auto rows = lo_sweep(problem, linspace(config.beta_min, config.beta_max, config.steps), spec,
                             config.trials, config.seed);
  Table t{{"beta", "nbar_lo", "p_analytic", "p_empirical", "ci_lo", "ci_hi"}, {}};
  for (const auto& r : rows) {
    std::vector<Cell> row{r.beta, r.nbar_lo, r.p_analytic};
    if (r.empirical) {
      row.insert(row.end(), {r.empirical->p_hat, r.empirical->ci_lo, r.empirical->ci_hi});
    } else {
      row.insert(row.end(), {std::monostate{}, std::monostate{}, std::monostate{}});
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct SimulateConfig {
  double nbar_s = 0.4;
  ReceiverKind receiver = ReceiverKind::GeneralizedKennedy;
  std::optional<double> beta;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  double prior_coherent = 0.5;
  double extinction_db = std::numeric_limits<double>::infinity();
  DetectorModel detector = DetectorModel::ideal();
  TrialOptions options;
};

namespace detail {

inline ReceiverSpec simulate_spec(const SimulateConfig& c, const DiscriminationProblem& problem) {
  ReceiverSpec spec = ReceiverSpec::ideal(c.receiver);
  spec.beta = c.beta;
  spec.extinction_db = c.extinction_db;
  spec.detector = c.detector;
  if (spec.kind == ReceiverKind::GeneralizedKennedy && !spec.beta) spec.beta = gk_error(problem).beta;
  return spec;
}

}  // namespace detail

// Single-point Monte Carlo summary. Columns: receiver, nbar_s, beta, trials,
// seed, errors, p_hat, ci_lo, ci_hi, p_analytic.
inline Table cmd_simulate(const SimulateConfig& config) {
  const DiscriminationProblem problem{config.nbar_s, config.prior_coherent};
  problem.validate();
  const ReceiverSpec spec = detail::simulate_spec(config, problem);
  const TrialBatch batch = run_trials(spec, problem, config.trials, config.seed, config.options);
  const EmpiricalError e = empirical_error(batch);
  Cell beta = std::monostate{};
  if (spec.kind == ReceiverKind::GeneralizedKennedy) beta = *spec.beta;
  if (spec.kind == ReceiverKind::Kennedy) beta = 0.0;
  Table t{{"receiver", "nbar_s", "beta", "trials", "seed", "errors", "p_hat", "ci_lo", "ci_hi", "p_analytic"}, {}};
  t.rows.push_back({std::string(to_string(spec.kind)), problem.nbar_s, beta,
                    static_cast<std::int64_t>(batch.n_trials), std::to_string(config.seed),
                    static_cast<std::int64_t>(batch.errors()), e.p_hat, e.ci_lo, e.ci_hi,
                    analytic_error(spec, problem)});
  return t;
}

// Per-trial export. Columns: trial, hypothesis, observation, decision.
inline Table batch_records_table(const TrialBatch& batch) {
  Table t{{"trial", "hypothesis", "observation", "decision"}, {}};
  t.rows.reserve(batch.records.size());
  for (std::size_t i = 0; i < batch.records.size(); ++i) {
    const TrialRecord& r = batch.records[i];
    Cell obs = std::holds_alternative<std::uint64_t>(r.observation)
                   ? Cell{static_cast<std::int64_t>(std::get<std::uint64_t>(r.observation))}
                   : Cell{std::get<double>(r.observation)};
    t.rows.push_back({static_cast<std::int64_t>(i), std::string(to_string(r.truth)), obs,
                      std::string(to_string(r.decision))});
  }
  return t;
}

inline Table cmd_simulate_records(const SimulateConfig& config) {
  const DiscriminationProblem problem{config.nbar_s, config.prior_coherent};
  problem.validate();
  return batch_records_table(
      run_trials(detail::simulate_spec(config, problem), problem, config.trials, config.seed, config.options));
}

}  // namespace qdisc
