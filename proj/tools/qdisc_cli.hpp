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

// Argument parsing for the qdisc tool. `run_cli` is separate from main() so
// the test suite can drive every subcommand in-process.

#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qdisc/commands.hpp"

namespace qdisc::cli {

inline constexpr int kUsageError = 2;

struct DetectorFlags {
  double dark_rate = 0.0;
  double dead_time = 50e-9;
  double window = 1e-6;
  bool saturate = false;

  void add_to(CLI::App* app) {
    app->add_option("--dark-rate", dark_rate, "Dark count rate, counts/s");
    app->add_option("--dead-time", dead_time, "Detector dead time, s (with --saturate)");
    app->add_option("--window", window, "Counting window, s");
    app->add_flag("--saturate", saturate, "Cap counts at floor(window / dead-time)");
  }

  DetectorModel model() const {
    DetectorModel d{dead_time, window, dark_rate, saturate};
    d.validate();
    return d;
  }
};

inline std::vector<ReceiverKind> parse_receivers(const std::vector<std::string>& names) {
  std::vector<ReceiverKind> out;
  for (const auto& n : names) out.push_back(parse_receiver_kind(n));
  return out;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coherent versus thermal light discrimination: error curves, count laws, receiver simulation"};
  app.require_subcommand(1);

  std::string format = "csv";
  std::string out_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", out_path, "Write output to this file instead of stdout");
  };

  // curves
  auto* curves = app.add_subcommand("curves", "Analytic error curves and bounds over a signal grid");
  std::string grid_text;
  std::optional<double> curves_nbar;
  std::vector<std::string> receiver_names{"dd", "hd", "kennedy", "gk"};
  std::vector<std::string> bound_names{"helstrom", "chernoff"};
  std::optional<std::size_t> curves_trials;
  std::uint64_t seed = 1;
  double prior = 0.5;
  double extinction_db = std::numeric_limits<double>::infinity();
  curves->add_option("--grid", grid_text, "Signal grid: a,b,c | log:lo:hi:n | lin:lo:hi:n");
  curves->add_option("--nbar", curves_nbar, "Single signal strength (overrides --grid)");
  curves->add_option("--receivers", receiver_names, "Subset of dd,hd,kennedy,gk")->delimiter(',');
  curves->add_option("--bounds", bound_names, "Subset of helstrom,chernoff ('none' for neither)")->delimiter(',');
  curves->add_option("--trials", curves_trials, "Monte Carlo trials per receiver and grid point");
  curves->add_option("--seed", seed, "Monte Carlo seed");
  curves->add_option("--prior-coherent", prior, "Prior probability of the coherent hypothesis");
  curves->add_option("--extinction-db", extinction_db, "Nulling extinction for simulated Kennedy/GK");
  add_common(curves);

  // dist
  auto* dist = app.add_subcommand("dist", "Photon-count distribution table");
  std::string family;
  std::vector<double> params;
  std::optional<std::size_t> n_cap;
  dist->add_option("family", family, "poisson | bose_einstein | laguerre")->required();
  dist->add_option("params", params, "mean | nbar | nbar_th d2")->required();
  dist->add_option("--n-cap", n_cap, "Largest count to tabulate (default: automatic)");
  add_common(dist);

  // losweep
  auto* losweep = app.add_subcommand("losweep", "GK error versus over-displacement");
  LoSweepConfig lo;
  DetectorFlags lo_det;
  losweep->add_option("--nbar", lo.nbar_s, "Signal strength")->required();
  losweep->add_option("--beta-min", lo.beta_min, "Smallest over-displacement");
  losweep->add_option("--beta-max", lo.beta_max, "Largest over-displacement");
  losweep->add_option("--steps", lo.steps, "Grid points, >= 2");
  losweep->add_option("--trials", lo.trials, "Monte Carlo trials per point (0: analytic only)");
  losweep->add_option("--seed", lo.seed, "Monte Carlo seed");
  losweep->add_option("--prior-coherent", lo.prior_coherent, "Prior of the coherent hypothesis");
  losweep->add_option("--extinction-db", lo.extinction_db, "Nulling extinction in dB");
  lo_det.add_to(losweep);
  add_common(losweep);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Single-point Monte Carlo of one receiver");
  SimulateConfig sim;
  DetectorFlags sim_det;
  std::string sim_receiver = "gk";
  std::string estimator = "analytic";
  bool records = false;
  simulate->add_option("--nbar", sim.nbar_s, "Signal strength")->required();
  simulate->add_option("--receiver", sim_receiver, "dd | hd | kennedy | gk");
  simulate->add_option("--beta", sim.beta, "GK over-displacement (default: optimal)");
  simulate->add_option("--trials", sim.trials, "Number of trials");
  simulate->add_option("--seed", sim.seed, "Seed");
  simulate->add_option("--prior-coherent", sim.prior_coherent, "Prior of the coherent hypothesis");
  simulate->add_option("--extinction-db", sim.extinction_db, "Nulling extinction in dB");
  simulate->add_option("--estimator", estimator, "Likelihood tables for the MAP rule")
      ->check(CLI::IsMember({"analytic", "empirical"}));
  simulate->add_option("--calibration-trials", sim.options.calibration_trials,
                       "Draws per hypothesis for the empirical estimator");
  simulate->add_flag("--records", records, "Emit per-trial records instead of the summary");
  sim_det.add_to(simulate);
  add_common(simulate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  Table table;
  try {
    if (curves->parsed()) {
      SweepConfig c;
      if (curves_nbar) {
        c.nbar_grid = {*curves_nbar};
      } else if (!grid_text.empty()) {
        c.nbar_grid = parse_grid(grid_text);
      }
      c.receivers = parse_receivers(receiver_names);
      c.helstrom = c.chernoff = false;
      for (const auto& b : bound_names) {
        if (b == "helstrom") c.helstrom = true;
        else if (b == "chernoff") c.chernoff = true;
        else if (b != "none") throw std::invalid_argument("unknown bound '" + b + "'");
      }
      c.trials = curves_trials;
      c.seed = seed;
      c.prior_coherent = prior;
      c.extinction_db = extinction_db;
      table = cmd_curves(c);
    } else if (dist->parsed()) {
      table = cmd_dist(family, params, n_cap);
    } else if (losweep->parsed()) {
      lo.detector = lo_det.model();
      table = cmd_losweep(lo);
    } else if (simulate->parsed()) {
      sim.receiver = parse_receiver_kind(sim_receiver);
      sim.detector = sim_det.model();
      sim.options.estimator = estimator == "empirical" ? EstimatorSource::Empirical : EstimatorSource::Analytic;
      table = records ? cmd_simulate_records(sim) : cmd_simulate(sim);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  const OutputFormat fmt = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  if (out_path.empty()) {
    write_table(out, table, fmt);
    out.flush();
    return out ? 0 : 1;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) {
    err << "error: cannot open " << out_path << '\n';
    return 1;
  }
  write_table(file, table, fmt);
  file.close();
  if (!file) {
    err << "error: failed writing " << out_path << '\n';
    return 1;
  }
  return 0;
}

}  // namespace qdisc::cli
