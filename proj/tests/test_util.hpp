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

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qdisc/fock.hpp"

namespace qdisc::testing {

// Poisson pmf by the product recurrence p_n = p_{n-1} mean / n; shares no
// code with the log-gamma route in the library.
inline std::vector<double> poisson_by_recurrence(double mean, std::size_t n_max) {
  std::vector<double> p(n_max + 1, 0.0);
  p[0] = std::exp(-mean);
  for (std::size_t n = 1; n <= n_max; ++n) p[n] = p[n - 1] * mean / static_cast<double>(n);
  return p;
}

// Displaced-thermal law as a finite sum of positive terms:
//   p_n = e^{-d2/(nbar+1)}/(nbar+1) sum_k C(n,k) r^{n-k} t^k / k!,
//   r = nbar/(nbar+1), t = d2/(nbar+1)^2.
inline std::vector<double> laguerre_by_binomial_sum(double nbar, double d2, std::size_t n_max) {
  std::vector<double> p(n_max + 1, 0.0);
  const double r = nbar / (nbar + 1.0);
  const double t = d2 / ((nbar + 1.0) * (nbar + 1.0));
  for (std::size_t n = 0; n <= n_max; ++n) {
    double s = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      const double kk = static_cast<double>(k);
      const double nn = static_cast<double>(n);
      const double log_term = std::lgamma(nn + 1) - std::lgamma(kk + 1) - std::lgamma(nn - kk + 1) +
                              (nn - kk) * std::log(r) + kk * std::log(t) - std::lgamma(kk + 1);
      s += std::exp(log_term);
    }
    p[n] = s * std::exp(-d2 / (nbar + 1.0)) / (nbar + 1.0);
  }
  return p;
}

// Random density matrix of rank <= `rank` in dimension `dim`.
inline TruncatedState random_state(std::mt19937_64& rng, std::size_t dim, std::size_t rank) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rank));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = g(rng);
  Eigen::MatrixXd m = a * a.transpose();
  m /= m.trace();
  m = 0.5 * (m + m.transpose()).eval();
  return TruncatedState::from_matrix(m, StateLabel::Other);
}

}  // namespace qdisc::testing
