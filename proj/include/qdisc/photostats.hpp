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

// Photon-count probability mass functions: Poisson (coherent light),
// Bose-Einstein (thermal light) and Laguerre (displaced thermal light),
// plus an inverse-CDF sampler over the finite tables.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qdisc/errors.hpp"

namespace qdisc {

// Mass allowed beyond the last retained count.
inline constexpr double kPmfTailTolerance = 1e-10;
inline constexpr double kPmfNegligibleTerm = 1e-18;

enum class CountFamily { Poisson, BoseEinstein, Laguerre, Custom };

inline std::string_view to_string(CountFamily f) {
  switch (f) {
    case CountFamily::Poisson: return "poisson";
    case CountFamily::BoseEinstein: return "bose_einstein";
    case CountFamily::Laguerre: return "laguerre";
    case CountFamily::Custom: return "custom";
  }
  return "custom";
}

// Family parameters. Poisson uses `mean`; Bose-Einstein uses `nbar_th`;
// Laguerre uses `nbar_th` and `d2` (squared displacement).
struct CountParams {
  double mean = 0.0;
  double nbar_th = 0.0;
  double d2 = 0.0;
};

struct CountDistribution {
  std::vector<double> pmf;
  CountFamily family = CountFamily::Custom;
  CountParams params;

  std::size_t n_cap() const { return pmf.empty() ? 0 : pmf.size() - 1; }

  // Zero beyond the retained table.
  double probability(std::size_t n) const { return n < pmf.size() ? pmf[n] : 0.0; }

  double total() const {
    double s = 0.0;
    for (double p : pmf) s += p;
    return s;
  }

  double mean() const {
    double m = 0.0;
    for (std::size_t n = 0; n < pmf.size(); ++n) m += static_cast<double>(n) * pmf[n];
    return m;
  }

  // Mean implied by the family parameters; NaN for Custom.
  double analytic_mean() const {
    switch (family) {
      case CountFamily::Poisson: return params.mean;
      case CountFamily::BoseEinstein: return params.nbar_th;
      case CountFamily::Laguerre: return params.nbar_th + params.d2;
      case CountFamily::Custom: break;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }
};

namespace detail {

inline void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be a finite nonnegative number");
  }
}

inline std::vector<double> point_mass_at_zero(std::size_t n_cap) {
  std::vector<double> pmf(n_cap + 1, 0.0);
  pmf[0] = 1.0;
  return pmf;
}

inline void check_tail(const std::vector<double>& pmf, const char* family) {
  double s = 0.0;
  for (double p : pmf) s += p;
  if (1.0 - s > kPmfTailTolerance) {
    throw TruncationError(std::string(family) + " pmf: mass beyond n_cap " +
                          std::to_string(pmf.size() - 1) + " is " + std::to_string(1.0 - s));
  }
}

// Mean + 12 standard deviations, grown until the retained mass passes and the
// last retained term is below kPmfNegligibleTerm, so totals sit at 1 to rounding.
template <class Build>
std::size_t search_cap(double mean, double variance, Build&& build) {
  auto cap = static_cast<std::size_t>(std::ceil(mean + 12.0 * std::sqrt(variance)));
  cap = std::max<std::size_t>(cap, 1);
  for (;;) {
    const std::vector<double> pmf = build(cap);
    double s = 0.0;
    for (double p : pmf) s += p;
    if (1.0 - s <= kPmfTailTolerance && pmf.back() <= kPmfNegligibleTerm) return cap;
    cap += std::max<std::size_t>(4, cap / 4);
  }
}

inline std::vector<double> poisson_table(double mean, std::size_t n_cap) {
  if (mean == 0.0) return point_mass_at_zero(n_cap);
  std::vector<double> pmf(n_cap + 1);
  const double log_mean = std::log(mean);
  for (std::size_t n = 0; n <= n_cap; ++n) {
    const double k = static_cast<double>(n);
    pmf[n] = std::exp(-mean + k * log_mean - std::lgamma(k + 1.0));
  }
  return pmf;
}

inline std::vector<double> bose_einstein_table(double nbar, std::size_t n_cap) {
  if (nbar == 0.0) return point_mass_at_zero(n_cap);
  // Geometric recurrence; underflows gracefully to 0 deep in the tail.
  std::vector<double> pmf(n_cap + 1);
  const double ratio = nbar / (nbar + 1.0);
  pmf[0] = 1.0 / (nbar + 1.0);
  for (std::size_t n = 1; n <= n_cap; ++n) pmf[n] = pmf[n - 1] * ratio;
  return pmf;
}

// log L_n(-x) for n = 0..n_max via the three-term recurrence
//   (n+1) L_{n+1} = (2n+1+x) L_n - n L_{n-1}
// renormalised every step so the running values stay O(1).
inline std::vector<double> log_laguerre_negative_arg(double x, std::size_t n_max) {
  std::vector<double> out(n_max + 1);
  out[0] = 0.0;
  if (n_max == 0) return out;
  double log_scale = 0.0;
  double prev = 1.0;     // L_{n-1} / scale
  double cur = 1.0 + x;  // L_n / scale
  out[1] = std::log(cur);
  for (std::size_t n = 1; n < n_max; ++n) {
    const double k = static_cast<double>(n);
    const double next = ((2.0 * k + 1.0 + x) * cur - k * prev) / (k + 1.0);
    log_scale += std::log(next);
    prev = cur / next;
    cur = 1.0;
    out[n + 1] = log_scale;
  }
  return out;
}

inline std::vector<double> laguerre_table(double nbar, double d2, std::size_t n_cap) {
  if (nbar == 0.0) return poisson_table(d2, n_cap);
  if (d2 == 0.0) return bose_einstein_table(nbar, n_cap);
  const double x = d2 / (nbar * (nbar + 1.0));
  const std::vector<double> log_lag = log_laguerre_negative_arg(x, n_cap);
  const double log_nbar = std::log(nbar);
  const double log_nbar1 = std::log1p(nbar);
  const double shift = -d2 / (nbar + 1.0);
  std::vector<double> pmf(n_cap + 1);
  for (std::size_t n = 0; n <= n_cap; ++n) {
    const double k = static_cast<double>(n);
    pmf[n] = std::exp(k * log_nbar - (k + 1.0) * log_nbar1 + shift + log_lag[n]);
  }
  return pmf;
}

}  // namespace detail

// Poisson(mean); pmf[n] = e^-mean mean^n / n!.
inline CountDistribution poisson_pmf(double mean, std::size_t n_cap) {
  detail::require_nonnegative(mean, "mean");
  CountDistribution d{detail::poisson_table(mean, n_cap), CountFamily::Poisson, {mean, 0.0, 0.0}};
  detail::check_tail(d.pmf, "poisson");
  return d;
}

inline std::size_t poisson_cap(double mean) {
  detail::require_nonnegative(mean, "mean");
  return detail::search_cap(mean, mean, [&](std::size_t c) { return detail::poisson_table(mean, c); });
}

inline CountDistribution poisson_pmf(double mean) { return poisson_pmf(mean, poisson_cap(mean)); }

// Geometric law of thermal light; pmf[n] = nbar^n / (nbar+1)^(n+1).
inline CountDistribution bose_einstein_pmf(double nbar, std::size_t n_cap) {
  detail::require_nonnegative(nbar, "nbar");
  CountDistribution d{detail::bose_einstein_table(nbar, n_cap), CountFamily::BoseEinstein,
                      {0.0, nbar, 0.0}};
  detail::check_tail(d.pmf, "bose_einstein");
  return d;
}

inline std::size_t bose_einstein_cap(double nbar) {
  detail::require_nonnegative(nbar, "nbar");
  return detail::search_cap(nbar, nbar * (nbar + 1.0),
                            [&](std::size_t c) { return detail::bose_einstein_table(nbar, c); });
}

inline CountDistribution bose_einstein_pmf(double nbar) {
  return bose_einstein_pmf(nbar, bose_einstein_cap(nbar));
}

// Counts of a thermal state of mean `nbar_th` displaced by an amplitude with
// squared modulus `d2`:
//   pmf[n] = nbar^n/(nbar+1)^(n+1) * exp(-d2/(nbar+1)) * L_n(-d2/(nbar(nbar+1))).
// nbar_th == 0 reduces to Poisson(d2), d2 == 0 to Bose-Einstein(nbar_th).
inline CountDistribution laguerre_pmf(double nbar_th, double d2, std::size_t n_cap) {
  detail::require_nonnegative(nbar_th, "nbar_th");
  detail::require_nonnegative(d2, "d2");
  CountDistribution d{detail::laguerre_table(nbar_th, d2, n_cap), CountFamily::Laguerre,
                      {0.0, nbar_th, d2}};
  detail::check_tail(d.pmf, "laguerre");
  return d;
}

inline std::size_t laguerre_cap(double nbar_th, double d2) {
  detail::require_nonnegative(nbar_th, "nbar_th");
  detail::require_nonnegative(d2, "d2");
  const double variance = nbar_th * (nbar_th + 1.0) + d2 * (2.0 * nbar_th + 1.0);
  return detail::search_cap(nbar_th + d2, variance, [&](std::size_t c) {
    return detail::laguerre_table(nbar_th, d2, c);
  });
}

inline CountDistribution laguerre_pmf(double nbar_th, double d2) {
  return laguerre_pmf(nbar_th, d2, laguerre_cap(nbar_th, d2));
}

// Inverse-CDF sampler over a finite pmf table. Holds its own cumulative table
// so repeated draws cost a binary search.
class CountSampler {
 public:
  explicit CountSampler(const CountDistribution& dist) : cdf_(dist.pmf.size()) {
    double acc = 0.0;
    for (std::size_t n = 0; n < dist.pmf.size(); ++n) {
      acc += dist.pmf[n];
      cdf_[n] = acc;
    }
  }

  template <class Rng>
  std::size_t operator()(Rng& rng) const {
    // Scale by the retained total so the truncated tail is never selected.
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return cdf_.size() - 1;
    return static_cast<std::size_t>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

template <class Rng>
std::size_t sample_count(const CountDistribution& dist, Rng& rng) {
  return CountSampler(dist)(rng);
}

}  // namespace qdisc
