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

// Error probabilities for discriminating a coherent state from a thermal
// state of equal mean photon number: the structured receivers (direct
// detection, homodyne, Kennedy, generalized Kennedy), the Helstrom limit and
// the quantum Chernoff quantity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "qdisc/errors.hpp"
#include "qdisc/fock.hpp"
#include "qdisc/optimize.hpp"
#include "qdisc/photostats.hpp"

namespace qdisc {

enum class Hypothesis { Coherent, Thermal };

inline std::string_view to_string(Hypothesis h) {
  return h == Hypothesis::Coherent ? "coherent" : "thermal";
}

struct Priors {
  double coherent = 0.5;

  double thermal() const { return 1.0 - coherent; }

  void validate() const {
    if (!(coherent >= 0.0 && coherent <= 1.0)) {
      throw std::invalid_argument("prior of the coherent hypothesis must lie in [0, 1]");
    }
  }
};

struct DiscriminationProblem {
  double nbar_s = 0.0;  // mean signal photons per mode, either hypothesis
  double prior_coherent = 0.5;

  Priors priors() const { return Priors{prior_coherent}; }

  void validate() const {
    if (!(nbar_s >= 0.0) || !std::isfinite(nbar_s)) {
      throw std::invalid_argument("nbar_s must be finite and nonnegative");
    }
    priors().validate();
  }
};

struct GkOperatingPoint {
  double beta = 0.0;  // over-displacement amplitude beyond exact nulling
  double p_err = 0.5;
};

// MAP rule on a single count. Coherent only on a strict likelihood win.
inline Hypothesis map_decide(std::size_t count, const CountDistribution& p_coh,
                             const CountDistribution& p_th, Priors priors) {
  if (count > p_coh.n_cap() || count > p_th.n_cap()) {
    throw std::out_of_range("map_decide: count " + std::to_string(count) +
                            " beyond a distribution's n_cap");
  }
  return priors.coherent * p_coh.pmf[count] > priors.thermal() * p_th.pmf[count]
             ? Hypothesis::Coherent
             : Hypothesis::Thermal;
}

// Bayes error of the MAP rule, sum_n min(pi_c p_c[n], pi_t p_t[n]). The
// shorter table is treated as zero-padded.
inline double error_from_pmfs(const CountDistribution& p_coh, const CountDistribution& p_th,
                              Priors priors) {
  const std::size_t len = std::max(p_coh.pmf.size(), p_th.pmf.size());
  double err = 0.0;
  for (std::size_t n = 0; n < len; ++n) {
    err += std::min(priors.coherent * p_coh.probability(n), priors.thermal() * p_th.probability(n));
  }
  return err;
}

// Ideal photon-number-resolving detection without displacement.
inline std::pair<CountDistribution, CountDistribution> dd_pmfs(const DiscriminationProblem& p) {
  return {poisson_pmf(p.nbar_s), bose_einstein_pmf(p.nbar_s)};
}

inline double dd_error(const DiscriminationProblem& problem) {
  problem.validate();
  const auto [coh, th] = dd_pmfs(problem);
  return error_from_pmfs(coh, th, problem.priors());
}

// Count laws after displacing the input by -(alpha + beta): the coherent
// hypothesis lands on |-beta>, the thermal one on a displaced thermal state of
// squared mean (sqrt(nbar_s) + beta)^2. beta = 0 is the Kennedy receiver.
inline std::pair<CountDistribution, CountDistribution> gk_pmfs(const DiscriminationProblem& p,
                                                               double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("over-displacement beta must be finite and nonnegative");
  }
  const double shifted = std::sqrt(p.nbar_s) + beta;
  return {poisson_pmf(beta * beta), laguerre_pmf(p.nbar_s, shifted * shifted)};
}

// Error of the displacement receiver at a fixed over-displacement.
inline double gk_objective(const DiscriminationProblem& problem, double beta) {
  const auto [coh, th] = gk_pmfs(problem, beta);
  return error_from_pmfs(coh, th, problem.priors());
}

inline double kennedy_error(const DiscriminationProblem& problem) {
  problem.validate();
  return gk_objective(problem, 0.0);
}

inline constexpr std::size_t kGkGridPoints = 200;
inline constexpr double kGkBetaTolerance = 1e-6;

inline double gk_beta_upper(const DiscriminationProblem& problem) {
  return std::sqrt(problem.nbar_s) + 5.0;
}

// Optimised over-displacement: 200-point scan of [0, sqrt(nbar_s) + 5]
// refined by golden section. The scan includes beta = 0, so the result is
// never worse than the Kennedy receiver.
inline GkOperatingPoint gk_error(const DiscriminationProblem& problem) {
  problem.validate();
  if (problem.nbar_s == 0.0) return {0.0, gk_objective(problem, 0.0)};
  const ScalarMinimum best = grid_then_golden(
      [&](double beta) { return gk_objective(problem, beta); }, 0.0, gk_beta_upper(problem),
      kGkGridPoints, kGkBetaTolerance);
  return {best.x, best.value};
}

// Quadrature convention x = (a + a^dag)/2: vacuum variance 1/4.
struct HomodyneModel {
  double mean_coherent = 0.0;
  double var_coherent = 0.25;
  double var_thermal = 0.25;

  explicit HomodyneModel(double nbar_s)
      : mean_coherent(std::sqrt(nbar_s)), var_thermal((2.0 * nbar_s + 1.0) / 4.0) {}
};

// Acceptance region for the coherent hypothesis. Because the thermal
// quadrature is wider, the region where pi_c f_c > pi_t f_t is a bounded
// interval (possibly empty, or everything when the Gaussians coincide).
struct HomodyneRule {
  enum class Shape { Empty, Interval, All } shape = Shape::Empty;
  double lo = 0.0;
  double hi = 0.0;

  Hypothesis decide(double x) const {
    switch (shape) {
      case Shape::All: return Hypothesis::Coherent;
      case Shape::Interval: return (x > lo && x < hi) ? Hypothesis::Coherent : Hypothesis::Thermal;
      case Shape::Empty: break;
    }
    return Hypothesis::Thermal;
  }
};

inline HomodyneRule homodyne_rule(const DiscriminationProblem& problem) {
  problem.validate();
  const Priors pr = problem.priors();
  HomodyneRule rule;
  if (pr.coherent == 0.0) return rule;
  if (pr.thermal() == 0.0) {
    rule.shape = HomodyneRule::Shape::All;
    return rule;
  }
  const HomodyneModel m(problem.nbar_s);
  if (m.var_thermal == m.var_coherent) {
    // Identical Gaussians: decided by the priors alone.
    if (pr.coherent > pr.thermal()) rule.shape = HomodyneRule::Shape::All;
    return rule;
  }
  // log(pi_c f_c) - log(pi_t f_t) = a x^2 + b x + c.
  const double a = -0.5 / m.var_coherent + 0.5 / m.var_thermal;
  const double b = m.mean_coherent / m.var_coherent;
  const double c = -0.5 * m.mean_coherent * m.mean_coherent / m.var_coherent +
                   0.5 * std::log(m.var_thermal / m.var_coherent) +
                   std::log(pr.coherent / pr.thermal());
  const double disc = b * b - 4.0 * a * c;
  if (disc <= 0.0) return rule;
  const double root = std::sqrt(disc);
  const double x1 = (-b + root) / (2.0 * a);
  const double x2 = (-b - root) / (2.0 * a);
  rule.shape = HomodyneRule::Shape::Interval;
  rule.lo = std::min(x1, x2);
  rule.hi = std::max(x1, x2);
  return rule;
}

inline double normal_cdf(double x, double mean, double variance) {
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

inline double homodyne_error(const DiscriminationProblem& problem) {
  const HomodyneRule rule = homodyne_rule(problem);
  const Priors pr = problem.priors();
  const HomodyneModel m(problem.nbar_s);
  double inside_coh = 0.0;
  double inside_th = 0.0;
  switch (rule.shape) {
    case HomodyneRule::Shape::All:
      inside_coh = inside_th = 1.0;
      break;
    case HomodyneRule::Shape::Interval:
      inside_coh = normal_cdf(rule.hi, m.mean_coherent, m.var_coherent) -
                   normal_cdf(rule.lo, m.mean_coherent, m.var_coherent);
      inside_th = normal_cdf(rule.hi, 0.0, m.var_thermal) - normal_cdf(rule.lo, 0.0, m.var_thermal);
      break;
    case HomodyneRule::Shape::Empty:
      break;
  }
  return pr.coherent * (1.0 - inside_coh) + pr.thermal() * inside_th;
}

// Fock truncation used by the Helstrom computation. Without a fixed
// dimension, choose_dim decides; verify_doubling recomputes at twice the
// dimension and throws TruncationError when the two disagree by > 1e-9.
struct DimPolicy {
  std::optional<std::size_t> fixed_dim;
  bool verify_doubling = false;
};

inline constexpr double kHelstromDoublingTolerance = 1e-9;

namespace detail {

inline double helstrom_at(const DiscriminationProblem& problem, FockDim dim) {
  const Priors pr = problem.priors();
  const TruncatedState coh = coherent_state(Amplitude(std::sqrt(problem.nbar_s)), dim);
  const TruncatedState th = thermal_matrix(problem.nbar_s, dim);
  const double norm = trace_norm(pr.thermal() * th.matrix() - pr.coherent * coh.matrix());
  return 0.5 * (1.0 - norm);
}

}  // namespace detail

// Minimum error over all measurements, 1/2 (1 - ||pi_t rho_th - pi_c rho_coh||_1);
// with equal priors this is 1/2 (1 - 1/2 ||rho_th - rho_coh||_1).
inline double helstrom_error(const DiscriminationProblem& problem, const DimPolicy& policy = {}) {
  problem.validate();
  const FockDim dim = policy.fixed_dim ? FockDim(*policy.fixed_dim) : choose_dim(problem.nbar_s, 0.0);
  const double value = detail::helstrom_at(problem, dim);
  if (policy.verify_doubling) {
    const double doubled = detail::helstrom_at(problem, FockDim(2 * dim.value()));
    if (std::abs(doubled - value) > kHelstromDoublingTolerance) {
      throw TruncationError("Helstrom value unstable under dimension doubling at dim " +
                            std::to_string(dim.value()));
    }
  }
  return value;
}

struct ChernoffResult {
  double s_opt = 0.0;
  double q = 1.0;
};

// Q(s) = Tr(rho_coh^s rho_th^(1-s)). rho_coh is a pure projector so
// rho_coh^s = rho_coh and Q(s) = sum_n |c_n|^2 p_n^(1-s); the s = 0 value is
// the continuous limit <alpha|rho_th|alpha>.
inline double chernoff_q(const DiscriminationProblem& problem, double s) {
  problem.validate();
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("Chernoff exponent s must lie in [0, 1]");
  const double nbar = problem.nbar_s;
  if (nbar == 0.0) return 1.0;
  const CountDistribution weights = poisson_pmf(nbar);
  const double log_nbar = std::log(nbar);
  const double log_nbar1 = std::log1p(nbar);
  double q = 0.0;
  for (std::size_t n = 0; n < weights.pmf.size(); ++n) {
    const double k = static_cast<double>(n);
    const double log_p = k * log_nbar - (k + 1.0) * log_nbar1;
    q += weights.pmf[n] * std::exp((1.0 - s) * log_p);
  }
  return q;
}

inline constexpr double kChernoffSTolerance = 1e-12;

// min_s Q(s) by golden section on [0, 1]; error exponent per copy is -ln q.
inline ChernoffResult chernoff_bound(const DiscriminationProblem& problem) {
  problem.validate();
  if (problem.nbar_s == 0.0) return {0.0, 1.0};
  const ScalarMinimum best = golden_section_minimize(
      [&](double s) { return chernoff_q(problem, s); }, 0.0, 1.0, kChernoffSTolerance);
  return {best.x, best.value};
}

}  // namespace qdisc
