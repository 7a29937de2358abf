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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Tolerances are fixed here and not tuned per run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qdisc/commands.hpp"
#include "qdisc/fock.hpp"
#include "qdisc/photostats.hpp"
#include "qdisc/receivers.hpp"
#include "qdisc/simkit.hpp"
#include "qdisc_cli.hpp"
#include "test_util.hpp"

namespace {

using namespace qdisc;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++g_failures;
  std::printf("[%s] %2d %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const std::vector<double>& grid() {
  static const std::vector<double> g = logspace(1e-3, 2.0, 60);
  return g;
}

Outcome helstrom_gk_gap() {
  double max_gap = 0.0, min_margin = 1.0;
  for (double nbar : grid()) {
    const double h = helstrom_error({nbar});
    const double g = gk_error({nbar}).p_err;
    max_gap = std::max(max_gap, (g - h) / h);
    min_margin = std::min(min_margin, g - h);
  }
  return {max_gap <= 0.025 && min_margin >= -1e-9,
          fmt("max (P_GK-P_H)/P_H = %.5f (<= 0.025)", max_gap) + fmt(", min P_GK-P_H = %.3g (>= -1e-9)", min_margin)};
}

Outcome receiver_ordering() {
  int violations = 0;
  for (double nbar : grid()) {
    const DiscriminationProblem p{nbar};
    const double h = helstrom_error(p), g = gk_error(p).p_err, k = kennedy_error(p), d = dd_error(p);
    violations += !(h <= g + 1e-10) + !(g <= k + 1e-10) + !(k <= d + 1e-10);
  }
  return {violations == 0, std::to_string(violations) + " ordering violations of P_H <= P_GK <= P_K <= P_DD over 60 points"};
}

// Sign change of f inside [lo, hi], located by bisection when present.
Outcome crossover(const std::function<double(double)>& f, double lo, double hi, const std::string& label) {
  const double flo = f(lo), fhi = f(hi);
  if ((flo < 0) == (fhi < 0)) {
    return {false, label + " has no sign change in [" + fmt("%g", lo) + ", " + fmt("%g", hi) + "]" +
                       fmt(" (f(lo) = %.4g", flo) + fmt(", f(hi) = %.4g)", fhi)};
  }
  const double root = bisect_root(f, lo, hi, 1e-7);
  return {true, label + fmt(" changes sign at nbar_s = %.4f", root)};
}

Outcome crossovers() {
  const Outcome k = crossover([](double n) { return kennedy_error({n}) - homodyne_error({n}); }, 0.15, 0.35, "P_K - P_HD");
  const Outcome g = crossover([](double n) { return gk_error({n}).p_err - homodyne_error({n}); }, 0.01, 0.04, "P_GK - P_HD");
  return {k.pass && g.pass, k.detail + "; " + g.detail};
}

Outcome improvements_at_point_four() {
  const DiscriminationProblem p{0.4};
  const double gk = gk_error(p).p_err;
  const double vs_dd = 1.0 - gk / dd_error(p);
  const double vs_hd = 1.0 - gk / homodyne_error(p);
  return {vs_dd >= 0.40 && vs_dd <= 0.56 && vs_hd >= 0.12 && vs_hd <= 0.22,
          fmt("1-P_GK/P_DD = %.4f in [0.40,0.56]", vs_dd) + fmt(", 1-P_GK/P_HD = %.4f in [0.12,0.22]", vs_hd)};
}

Outcome sensitivity_gain() {
  const double n_dd = bisect_root([](double n) { return dd_error({n}) - 0.45; }, 1e-6, 5.0, 1e-10);
  const double n_gk = bisect_root([](double n) { return gk_error({n}).p_err - 0.45; }, 1e-6, 5.0, 1e-10);
  const double db = 10.0 * std::log10(n_dd / n_gk);
  return {db >= 14.0 && db <= 20.0,
          fmt("nbar_DD = %.5f", n_dd) + fmt(", nbar_GK = %.5f", n_gk) + fmt(", gain = %.3f dB in [14,20]", db)};
}

Outcome laguerre_oracle() {
  double worst = 0.0;
  for (double nbar : {0.05, 0.1, 0.5}) {
    for (double d2 : {0.1, 0.9, 2.0}) {
      // The displaced thermal tail outruns the coherent bound; double for headroom.
      const FockDim dim(2 * choose_dim(nbar, std::sqrt(d2)).value());
      const TruncatedState s = apply_displacement(thermal_matrix(nbar, dim), std::sqrt(d2));
      const CountDistribution lag = laguerre_pmf(nbar, d2, dim.value() - 1);
      for (Eigen::Index n = 0; n < dim.index(); ++n) {
        worst = std::max(worst, std::abs(s.matrix()(n, n) - lag.pmf[static_cast<std::size_t>(n)]));
      }
    }
  }
  const double mean = laguerre_pmf(0.1, 0.9).mean();
  return {worst <= 1e-10 && std::abs(mean - 1.0) <= 1e-6,
          fmt("max |laguerre - displaced diag| = %.3g (<= 1e-10)", worst) + fmt(", mean(0.1, 0.9) = %.10f", mean)};
}

Outcome monte_carlo_consistency() {
  constexpr std::size_t kTrials = 100000;
  double worst_z = 0.0;
  std::string worst;
  std::uint64_t seed = 1000;
  for (ReceiverKind k : kAllReceivers) {
    for (double nbar : {0.05, 0.2, 0.4, 1.0}) {
      const DiscriminationProblem p{nbar};
      ReceiverSpec spec = ReceiverSpec::ideal(k);
      if (k == ReceiverKind::GeneralizedKennedy) spec.beta = gk_error(p).beta;
      const double analytic = analytic_error(spec, p);
      const EmpiricalError e = empirical_error(run_trials(spec, p, kTrials, seed++));
      const double sigma = std::sqrt(analytic * (1 - analytic) / kTrials);
      const double z = std::abs(e.p_hat - analytic) / sigma;
      if (z > worst_z) {
        worst_z = z;
        worst = std::string(to_string(k)) + fmt(" @ %.2f", nbar);
      }
    }
  }
  return {worst_z <= 3.0, fmt("16 cases, worst |p_hat - p|/sigma = %.3f (<= 3)", worst_z) + " at " + worst};
}

Outcome truncation_stability() {
  double worst = 0.0;
  for (double nbar : {0.1, 0.5, 1.0, 2.0}) {
    const std::size_t dim = choose_dim(nbar, 0.0).value();
    worst = std::max(worst, std::abs(helstrom_error({nbar}, {dim, false}) - helstrom_error({nbar}, {2 * dim, false})));
  }
  return {worst <= 1e-9, fmt("max |P_H(dim) - P_H(2 dim)| = %.3g (<= 1e-9)", worst)};
}

Outcome chernoff_sanity() {
  bool ok = true;
  double worst_grid = 0.0, worst_bound = 1.0;
  for (double nbar : {0.1, 0.5, 1.0}) {
    const DiscriminationProblem p{nbar};
    const ChernoffResult c = chernoff_bound(p);
    double grid_min = 2.0;
    for (int i = 0; i < 10000; ++i) grid_min = std::min(grid_min, chernoff_q(p, i / 9999.0));
    ok = ok && c.q <= std::min(chernoff_q(p, 0.0), chernoff_q(p, 1.0)) + 1e-12;
    worst_grid = std::max(worst_grid, std::abs(c.q - grid_min));
    worst_bound = std::min(worst_bound, 0.5 * c.q - helstrom_error(p));
  }
  ok = ok && worst_grid <= 1e-10 && worst_bound >= -1e-9;
  return {ok, fmt("max |q - grid min| = %.3g (<= 1e-10)", worst_grid) + fmt(", min q/2 - P_H = %.4g (>= -1e-9)", worst_bound)};
}

std::string cli_output(std::vector<std::string> args) {
  args.insert(args.begin(), "qdisc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (status != 0) throw std::runtime_error("CLI failed: " + err.str());
  return out.str();
}

Outcome property_suites() {
  std::vector<std::string> failed;
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> u(0.0, 2.5);

  bool pmf_ok = true;
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng) * u(rng), b = u(rng) * u(rng);
    for (const CountDistribution& d : {poisson_pmf(a), bose_einstein_pmf(a), laguerre_pmf(a, b)}) {
      for (double p : d.pmf) pmf_ok = pmf_ok && std::isfinite(p) && p >= 0.0;
      pmf_ok = pmf_ok && d.total() >= 1 - 1e-10 && d.total() <= 1 + 1e-12 &&
               std::abs(d.mean() - d.analytic_mean()) <= 1e-8;
    }
  }
  if (!pmf_ok) failed.push_back("pmf invariants");

  double round_trip = 0.0;
  for (int i = 0; i < 10; ++i) {
    const TruncatedState s = testing::random_state(rng, 40, 3);
    // Random states occupy all 40 levels; restrict to a low-photon block.
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(60, 60);
    m.topLeftCorner(15, 15) = s.matrix().topLeftCorner(15, 15);
    m /= m.trace();
    const TruncatedState t = TruncatedState::from_matrix(m, StateLabel::Other);
    const double beta = u(rng) - 1.25;
    const TruncatedState back = apply_displacement(apply_displacement(t, beta), -beta);
    round_trip = std::max(round_trip, (back.matrix() - t.matrix()).cwiseAbs().maxCoeff());
  }
  if (round_trip > 1e-8) failed.push_back("displacement round trip " + fmt("%.3g", round_trip));

  bool metric_ok = true;
  for (int i = 0; i < 50; ++i) {
    const auto a = testing::random_state(rng, 10, 1 + i % 5);
    const auto b = testing::random_state(rng, 10, 1 + (i + 2) % 5);
    const auto c = testing::random_state(rng, 10, 1 + (i + 4) % 5);
    const double ab = trace_norm_distance(a, b);
    metric_ok = metric_ok && std::abs(ab - trace_norm_distance(b, a)) <= 1e-9 &&
                ab <= trace_norm_distance(a, c) + trace_norm_distance(c, b) + 1e-9;
  }
  if (!metric_ok) failed.push_back("trace-norm metric");

  bool tie_ok = true;
  for (int i = 0; i < 20; ++i) {
    const CountDistribution d = laguerre_pmf(u(rng), u(rng));
    for (std::size_t n = 0; n <= d.n_cap(); ++n) tie_ok = tie_ok && map_decide(n, d, d, {}) == Hypothesis::Thermal;
  }
  if (!tie_ok) failed.push_back("MAP tie rule");

  const std::vector<std::vector<std::string>> commands{
      {"curves", "--grid", "log:0.01:1:8", "--trials", "2000", "--seed", "5"},
      {"dist", "laguerre", "0.1", "0.9"},
      {"losweep", "--nbar", "0.05", "--beta-max", "1", "--steps", "11", "--trials", "2000", "--seed", "5"},
      {"simulate", "--nbar", "0.4", "--receiver", "gk", "--trials", "5000", "--seed", "5"},
      {"simulate", "--nbar", "0.4", "--receiver", "hd", "--trials", "500", "--seed", "5", "--records"},
  };
  for (const auto& c : commands) {
    if (cli_output(c) != cli_output(c)) failed.push_back("CLI reproducibility: " + c[0]);
  }

  std::string detail = failed.empty() ? "pmf, round-trip, metric, tie-rule, CLI reproducibility all hold" : "";
  for (const auto& f : failed) detail += (detail.empty() ? "" : "; ") + f;
  return {failed.empty(), detail};
}

}  // namespace

int main() {
  report(1, "Helstrom-GK gap", helstrom_gk_gap);
  report(2, "Receiver ordering", receiver_ordering);
  report(3, "Homodyne crossovers", crossovers);
  report(4, "Improvements at nbar_s = 0.4", improvements_at_point_four);
  report(5, "Sensitivity gain at P_err = 0.45", sensitivity_gain);
  report(6, "Laguerre oracle equivalence", laguerre_oracle);
  report(7, "Monte Carlo consistency", monte_carlo_consistency);
  report(8, "Truncation stability", truncation_stability);
  report(9, "Chernoff sanity", chernoff_sanity);
  report(10, "Property suites", property_suites);
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
