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

// Monte Carlo emulation of the photon-counting and homodyne receivers with
// detector imperfections: residual light from a finite nulling extinction,
// dark counts, and the dead-time saturation of a quasi photon-number
// resolving detector.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qdisc/photostats.hpp"
#include "qdisc/receivers.hpp"

namespace qdisc {

// Mix (seed, stream, index) into a 64-bit generator seed (splitmix64
// finaliser). Each trial and each calibration draw gets its own stream.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream,
                                        std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ stream) ^ index);
}

inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return std::mt19937_64(derive_stream_seed(seed, stream, index));
}

struct DetectorModel {
  double tau_d = 50e-9;    // dead time, s
  double tau_s = 1e-6;     // counting window, s
  double dark_rate = 0.0;  // counts / s
  bool saturates = true;   // false: ideal PNR, no count cap

  static DetectorModel ideal() {
    DetectorModel d;
    d.saturates = false;
    return d;
  }

  double zeta() const { return tau_d / tau_s; }

  // floor(tau_s / tau_d), guarded against the ratio landing a hair below an
  // integer in floating point.
  std::size_t count_cap() const {
    return static_cast<std::size_t>(std::floor(tau_s / tau_d * (1.0 + 1e-12)));
  }

  void validate() const {
    if (!(tau_d > 0.0) || !(tau_s > 0.0)) throw std::invalid_argument("detector times must be positive");
    if (!(zeta() < 1.0)) throw std::invalid_argument("dead time must be shorter than the window");
    if (!(dark_rate >= 0.0) || !std::isfinite(dark_rate)) {
      throw std::invalid_argument("dark count rate must be finite and nonnegative");
    }
  }
};

enum class ReceiverKind { DirectDetection, Homodyne, Kennedy, GeneralizedKennedy };

inline std::string_view to_string(ReceiverKind k) {
  switch (k) {
    case ReceiverKind::DirectDetection: return "dd";
    case ReceiverKind::Homodyne: return "hd";
    case ReceiverKind::Kennedy: return "kennedy";
    case ReceiverKind::GeneralizedKennedy: return "gk";
  }
  return "dd";
}

inline ReceiverKind parse_receiver_kind(std::string_view name) {
  if (name == "dd") return ReceiverKind::DirectDetection;
  if (name == "hd") return ReceiverKind::Homodyne;
  if (name == "kennedy") return ReceiverKind::Kennedy;
  if (name == "gk") return ReceiverKind::GeneralizedKennedy;
  throw std::invalid_argument("unknown receiver '" + std::string(name) + "'");
}

inline bool is_displacement_kind(ReceiverKind k) {
  return k == ReceiverKind::Kennedy || k == ReceiverKind::GeneralizedKennedy;
}

struct ReceiverSpec {
  ReceiverKind kind = ReceiverKind::DirectDetection;
  // GK only. Unset means "use the analytic optimum for the problem".
  std::optional<double> beta;
  double extinction_db = std::numeric_limits<double>::infinity();
  DetectorModel detector = DetectorModel::ideal();

  static ReceiverSpec ideal(ReceiverKind kind) {
    ReceiverSpec s;
    s.kind = kind;
    return s;
  }

  void validate() const {
    if (beta && kind != ReceiverKind::GeneralizedKennedy) {
      throw std::invalid_argument("beta applies only to the generalized Kennedy receiver");
    }
    if (beta && (!(*beta >= 0.0) || !std::isfinite(*beta))) {
      throw std::invalid_argument("beta must be finite and nonnegative");
    }
    if (!(extinction_db >= 0.0)) throw std::invalid_argument("extinction must be nonnegative dB");
    if (std::isfinite(extinction_db) && !is_displacement_kind(kind)) {
      throw std::invalid_argument("extinction applies only to displacement receivers");
    }
    detector.validate();
  }

  // Fraction of the signal's mean photon number left after nulling.
  double residual_fraction() const {
    return std::isinf(extinction_db) ? 0.0 : std::pow(10.0, -extinction_db / 10.0);
  }
};

// Over-displacement used by a ReceiverSpec for a problem: 0 for Kennedy, the set or
// optimal value for GK.
inline double resolve_beta(const ReceiverSpec& spec, const DiscriminationProblem& problem) {
  if (spec.kind == ReceiverKind::Kennedy) return 0.0;
  if (spec.kind != ReceiverKind::GeneralizedKennedy) return 0.0;
  return spec.beta ? *spec.beta : gk_error(problem).beta;
}

// Linear convolution of two count laws.
inline CountDistribution convolve(const CountDistribution& a, const CountDistribution& b) {
  CountDistribution out;
  out.pmf.assign(a.pmf.size() + b.pmf.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.pmf.size(); ++i) {
    if (a.pmf[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.pmf.size(); ++j) out.pmf[i + j] += a.pmf[i] * b.pmf[j];
  }
  return out;
}

// Mass at counts >= cap moved onto cap. No-op when the table already fits.
inline CountDistribution apply_count_cap(CountDistribution dist, std::size_t cap) {
  if (dist.pmf.size() <= cap + 1) return dist;
  double lumped = 0.0;
  for (std::size_t n = cap; n < dist.pmf.size(); ++n) lumped += dist.pmf[n];
  dist.pmf.resize(cap + 1);
  dist.pmf[cap] = lumped;
  dist.family = CountFamily::Custom;
  return dist;
}

struct EffectivePmfs {
  CountDistribution coherent;
  CountDistribution thermal;
};

// Count laws seen by the detector for each hypothesis: ideal receiver laws,
// then residual light from finite extinction (coherent hypothesis, Kennedy
// and GK only), then dark counts, then the dead-time cap.
inline EffectivePmfs effective_pmfs(const ReceiverSpec& spec, const DiscriminationProblem& problem) {
  spec.validate();
  problem.validate();
  if (spec.kind == ReceiverKind::Homodyne) {
    throw std::invalid_argument("homodyne detection has no photon-count distribution");
  }
  EffectivePmfs out;
  if (spec.kind == ReceiverKind::DirectDetection) {
    auto [c, t] = dd_pmfs(problem);
    out = {std::move(c), std::move(t)};
  } else {
    const double beta = resolve_beta(spec, problem);
    auto [c, t] = gk_pmfs(problem, beta);
    out = {std::move(c), std::move(t)};
    const double residual = spec.residual_fraction();
    if (residual > 0.0) out.coherent = poisson_pmf(beta * beta + residual * problem.nbar_s);
  }
  const double dark_mean = spec.detector.dark_rate * spec.detector.tau_s;
  if (dark_mean > 0.0) {
    const CountDistribution dark = poisson_pmf(dark_mean);
    out.coherent = convolve(out.coherent, dark);
    out.thermal = convolve(out.thermal, dark);
  }
  if (spec.detector.saturates) {
    const std::size_t cap = spec.detector.count_cap();
    out.coherent = apply_count_cap(std::move(out.coherent), cap);
    out.thermal = apply_count_cap(std::move(out.thermal), cap);
  }
  // Common length so every observable count is in range for the MAP rule.
  const std::size_t len = std::max(out.coherent.pmf.size(), out.thermal.pmf.size());
  out.coherent.pmf.resize(len, 0.0);
  out.thermal.pmf.resize(len, 0.0);
  return out;
}

// Analytic error of a spec, including its imperfections.
inline double analytic_error(const ReceiverSpec& spec, const DiscriminationProblem& problem) {
  if (spec.kind == ReceiverKind::Homodyne) {
    spec.validate();
    return homodyne_error(problem);
  }
  const EffectivePmfs p = effective_pmfs(spec, problem);
  return error_from_pmfs(p.coherent, p.thermal, problem.priors());
}

using Observation = std::variant<std::uint64_t, double>;

struct TrialRecord {
  Hypothesis truth = Hypothesis::Coherent;
  Observation observation = std::uint64_t{0};
  Hypothesis decision = Hypothesis::Coherent;

  bool is_error() const { return truth != decision; }
  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct TrialBatch {
  std::size_t n_trials = 0;
  std::uint64_t seed = 0;
  ReceiverKind kind = ReceiverKind::DirectDetection;
  std::vector<TrialRecord> records;

  std::size_t errors() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const TrialRecord& r) { return r.is_error(); }));
  }
};

// Where the MAP estimator gets its likelihood tables from.
enum class EstimatorSource {
  Analytic,   // the effective pmfs themselves
  Empirical,  // histograms from a seeded calibration run per hypothesis
};

struct TrialOptions {
  EstimatorSource estimator = EstimatorSource::Analytic;
  std::size_t calibration_trials = 1000;
};

namespace detail {

inline constexpr std::uint64_t kTrialStream = 0;
inline constexpr std::uint64_t kCalibrationCoherentStream = 1;
inline constexpr std::uint64_t kCalibrationThermalStream = 2;

inline Hypothesis draw_hypothesis(std::mt19937_64& rng, Priors priors) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < priors.coherent
             ? Hypothesis::Coherent
             : Hypothesis::Thermal;
}

inline CountDistribution calibration_histogram(const CountDistribution& law, std::size_t draws,
                                               std::uint64_t seed, std::uint64_t stream) {
  const CountSampler sampler(law);
  CountDistribution hist;
  hist.pmf.assign(law.pmf.size(), 0.0);
  for (std::size_t i = 0; i < draws; ++i) {
    auto rng = stream_rng(seed, stream, i);
    hist.pmf[sampler(rng)] += 1.0;
  }
  for (double& p : hist.pmf) p /= static_cast<double>(draws);
  return hist;
}

}  // namespace detail

// Simulates n_trials independent discrimination rounds. Trial i uses its own
// generator stream derived from (seed, i), so the batch is reproducible and
// can be split across workers without changing any record.
inline TrialBatch run_trials(const ReceiverSpec& spec, const DiscriminationProblem& problem,
                             std::size_t n_trials, std::uint64_t seed, const TrialOptions& options = {}) {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be at least 1");
  spec.validate();
  problem.validate();
  const Priors priors = problem.priors();
  TrialBatch batch{n_trials, seed, spec.kind, {}};
  batch.records.reserve(n_trials);

  if (spec.kind == ReceiverKind::Homodyne) {
    if (options.estimator == EstimatorSource::Empirical) {
      throw std::invalid_argument("empirical estimator needs a photon-counting receiver");
    }
    const HomodyneModel m(problem.nbar_s);
    const HomodyneRule rule = homodyne_rule(problem);
    for (std::size_t i = 0; i < n_trials; ++i) {
      auto rng = stream_rng(seed, detail::kTrialStream, i);
      const Hypothesis truth = detail::draw_hypothesis(rng, priors);
      const double x = truth == Hypothesis::Coherent
                           ? std::normal_distribution<double>(m.mean_coherent, std::sqrt(m.var_coherent))(rng)
                           : std::normal_distribution<double>(0.0, std::sqrt(m.var_thermal))(rng);
      batch.records.push_back({truth, x, rule.decide(x)});
    }
    return batch;
  }

  const EffectivePmfs laws = effective_pmfs(spec, problem);
  EffectivePmfs likelihood = laws;
  if (options.estimator == EstimatorSource::Empirical) {
    if (options.calibration_trials < 1) throw std::invalid_argument("calibration_trials must be positive");
    likelihood.coherent = detail::calibration_histogram(laws.coherent, options.calibration_trials, seed,
                                                        detail::kCalibrationCoherentStream);
    likelihood.thermal = detail::calibration_histogram(laws.thermal, options.calibration_trials, seed,
                                                       detail::kCalibrationThermalStream);
  }
  // Decisions are a pure function of the count; tabulate them once.
  std::vector<Hypothesis> decide(laws.coherent.pmf.size());
  for (std::size_t n = 0; n < decide.size(); ++n) {
    decide[n] = map_decide(n, likelihood.coherent, likelihood.thermal, priors);
  }
  const CountSampler coh(laws.coherent);
  const CountSampler th(laws.thermal);
  for (std::size_t i = 0; i < n_trials; ++i) {
    auto rng = stream_rng(seed, detail::kTrialStream, i);
    const Hypothesis truth = detail::draw_hypothesis(rng, priors);
    const std::size_t count = truth == Hypothesis::Coherent ? coh(rng) : th(rng);
    batch.records.push_back({truth, static_cast<std::uint64_t>(count), decide[count]});
  }
  return batch;
}

struct EmpiricalError {
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 1.0;
};

// Error fraction with a 95% Wilson score interval.
inline EmpiricalError wilson_interval(std::size_t errors, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("wilson_interval needs at least one trial");
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  const double lo = errors == 0 ? 0.0 : std::clamp(center - half, 0.0, 1.0);
  const double hi = errors == trials ? 1.0 : std::clamp(center + half, 0.0, 1.0);
  return {p, lo, hi};
}

inline EmpiricalError empirical_error(const TrialBatch& batch) {
  return wilson_interval(batch.errors(), batch.records.size());
}

struct LoSweepRow {
  double beta = 0.0;
  double nbar_lo = 0.0;  // (sqrt(nbar_s) + beta)^2, mean count of the displaced thermal light
  double p_analytic = 0.5;
  std::optional<EmpiricalError> empirical;
};

// GK error as a function of the over-displacement. Each row is a GK ReceiverSpec
// derived from `spec_template` with beta set; the empirical column is filled
// when n_trials > 0, row i seeded from stream (seed, 3, i).
inline std::vector<LoSweepRow> lo_sweep(const DiscriminationProblem& problem,
                                        const std::vector<double>& beta_grid,
                                        const ReceiverSpec& spec_template, std::size_t n_trials = 0,
                                        std::uint64_t seed = 0) {
  if (beta_grid.empty()) throw std::invalid_argument("lo_sweep: empty beta grid");
  for (std::size_t i = 1; i < beta_grid.size(); ++i) {
    if (!(beta_grid[i] > beta_grid[i - 1])) throw std::invalid_argument("lo_sweep: beta grid must ascend");
  }
  std::vector<LoSweepRow> rows;
  rows.reserve(beta_grid.size());
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    ReceiverSpec spec = spec_template;
    spec.kind = ReceiverKind::GeneralizedKennedy;
    spec.beta = beta_grid[i];
    const double shifted = std::sqrt(problem.nbar_s) + beta_grid[i];
    LoSweepRow row{beta_grid[i], shifted * shifted, analytic_error(spec, problem), std::nullopt};
    if (n_trials > 0) {
      row.empirical = empirical_error(run_trials(spec, problem, n_trials, derive_stream_seed(seed, 3, i)));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qdisc
