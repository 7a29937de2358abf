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

// Truncated Fock-space representations of single-mode coherent and thermal
// states and the real displacement operator. Amplitudes are real (the phase
// reference is fixed), so every density matrix here is real symmetric.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qdisc/errors.hpp"

namespace qdisc {

// Probability mass a truncated state may drop beyond its last Fock level.
inline constexpr double kFockTailTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-12;
// Looser trace tolerance accepted after a displacement (leakage bound).
inline constexpr double kDisplacedTraceTolerance = 1e-10;
inline constexpr double kUnitarityTolerance = 1e-8;
inline constexpr std::size_t kMinFockDim = 30;

// Number of retained Fock levels; indices 0..value()-1.
class FockDim {
 public:
  explicit FockDim(std::size_t dim) : dim_(dim) {
    if (dim < 2) throw std::invalid_argument("FockDim must be at least 2");
  }
  std::size_t value() const { return dim_; }
  Eigen::Index index() const { return static_cast<Eigen::Index>(dim_); }
  friend bool operator==(FockDim a, FockDim b) { return a.dim_ == b.dim_; }

 private:
  std::size_t dim_;
};

// Nonnegative real field amplitude, |alpha|^2 = mean photon number.
class Amplitude {
 public:
  explicit Amplitude(double value) : value_(value) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument("Amplitude must be finite and nonnegative");
    }
  }
  double value() const { return value_; }

 private:
  double value_;
};

enum class StateLabel { Coherent, Thermal, DisplacedThermal, Other };

inline std::string_view to_string(StateLabel l) {
  switch (l) {
    case StateLabel::Coherent: return "coherent";
    case StateLabel::Thermal: return "thermal";
    case StateLabel::DisplacedThermal: return "displaced-thermal";
    case StateLabel::Other: return "other";
  }
  return "other";
}

// Smallest eigenvalue of a real symmetric matrix.
inline double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Sum of |eigenvalues| of a real symmetric matrix.
inline double trace_norm(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

// A density matrix in a truncated Fock basis. Construction validates
// symmetry, positivity and trace; an instance is always a valid state.
class TruncatedState {
 public:
  static TruncatedState from_matrix(Eigen::MatrixXd matrix, StateLabel label,
                                    double trace_tolerance = kTraceTolerance) {
    if (matrix.rows() != matrix.cols()) throw InvalidStateError("density matrix must be square");
    FockDim dim(static_cast<std::size_t>(matrix.rows()));
    if (matrix != matrix.transpose()) throw InvalidStateError("density matrix must be symmetric");
    const double tr = matrix.trace();
    if (std::abs(tr - 1.0) > trace_tolerance) {
      throw InvalidStateError("density matrix trace " + std::to_string(tr) + " is not 1");
    }
    const double lo = min_eigenvalue(matrix);
    if (lo < -kPsdTolerance) {
      throw InvalidStateError("density matrix has negative eigenvalue " + std::to_string(lo));
    }
    return TruncatedState(dim, std::move(matrix), label);
  }

  FockDim dim() const { return dim_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  StateLabel label() const { return label_; }
  double trace() const { return matrix_.trace(); }

  // Photon-number distribution (the diagonal).
  Eigen::VectorXd diagonal() const { return matrix_.diagonal(); }

 private:
  TruncatedState(FockDim dim, Eigen::MatrixXd m, StateLabel label)
      : dim_(dim), matrix_(std::move(m)), label_(label) {}

  FockDim dim_;
  Eigen::MatrixXd matrix_;
  StateLabel label_;
};

namespace detail {

// Sum_{n >= first} Poisson(n; mean), evaluated term by term in log space.
inline double poisson_tail_from(double mean, std::size_t first) {
  if (mean == 0.0) return first == 0 ? 1.0 : 0.0;
  const double log_mean = std::log(mean);
  double sum = 0.0;
  for (std::size_t n = first;; ++n) {
    const double k = static_cast<double>(n);
    const double term = std::exp(-mean + k * log_mean - std::lgamma(k + 1.0));
    sum += term;
    if (k > mean && term <= 1e-20 * sum) break;
    if (term == 0.0 && k > mean) break;
  }
  return sum;
}

inline double geometric_tail_from(double nbar, std::size_t first) {
  if (nbar == 0.0) return first == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(first) * (std::log(nbar) - std::log1p(nbar)));
}

}  // namespace detail

// Fock coefficients c_n = e^{-a^2/2} a^n / sqrt(n!) for n < dim.
inline Eigen::VectorXd coherent_vector(Amplitude alpha, FockDim dim) {
  const double a = alpha.value();
  const double tail = detail::poisson_tail_from(a * a, dim.value());
  if (tail > kFockTailTolerance) {
    throw TruncationError("coherent state amplitude " + std::to_string(a) +
                          " needs more than " + std::to_string(dim.value()) +
                          " Fock levels (tail " + std::to_string(tail) + ")");
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dim.index());
  if (a == 0.0) {
    c(0) = 1.0;
    return c;
  }
  const double log_a = std::log(a);
  for (Eigen::Index n = 0; n < dim.index(); ++n) {
    const double k = static_cast<double>(n);
    c(n) = std::exp(-0.5 * a * a + k * log_a - 0.5 * std::lgamma(k + 1.0));
  }
  return c;
}

inline TruncatedState coherent_state(Amplitude alpha, FockDim dim) {
  const Eigen::VectorXd c = coherent_vector(alpha, dim);
  return TruncatedState::from_matrix(c * c.transpose(), StateLabel::Coherent);
}

// Diagonal thermal state with Bose-Einstein weights nbar^n/(nbar+1)^(n+1).
inline TruncatedState thermal_matrix(double nbar, FockDim dim) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw std::invalid_argument("thermal mean photon number must be finite and nonnegative");
  }
  const double tail = detail::geometric_tail_from(nbar, dim.value());
  if (tail > kFockTailTolerance) {
    throw TruncationError("thermal state nbar " + std::to_string(nbar) + " needs more than " +
                          std::to_string(dim.value()) + " Fock levels (tail " +
                          std::to_string(tail) + ")");
  }
  Eigen::VectorXd p = Eigen::VectorXd::Zero(dim.index());
  if (nbar == 0.0) {
    p(0) = 1.0;
  } else {
    const double log_nbar = std::log(nbar);
    const double log_nbar1 = std::log1p(nbar);
    for (Eigen::Index n = 0; n < dim.index(); ++n) {
      const double k = static_cast<double>(n);
      p(n) = std::exp(k * log_nbar - (k + 1.0) * log_nbar1);
    }
  }
  return TruncatedState::from_matrix(p.asDiagonal().toDenseMatrix(), StateLabel::Thermal);
}

// Extra levels the displacement exponential is computed with before cropping.
inline std::size_t displacement_pad(double beta) {
  return 4 * static_cast<std::size_t>(std::ceil(beta * beta)) + 20;
}

namespace detail {

// exp(beta (a^dag - a)) on the first `size` Fock levels.
inline Eigen::MatrixXd padded_displacement(double beta, std::size_t size) {
  const auto n = static_cast<Eigen::Index>(size);
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) {
    const double amp = beta * std::sqrt(static_cast<double>(k));
    gen(k, k - 1) = amp;
    gen(k - 1, k) = -amp;
  }
  return gen.exp();
}

inline double unitarity_defect(const Eigen::MatrixXd& padded, std::size_t dim, std::size_t pad) {
  // Columns in the lower half of the retained block, rows extended three
  // quarters into the pad; artefacts reflected from the truncation edge show up here.
  const auto rows = static_cast<Eigen::Index>(dim + 3 * pad / 4);
  const auto cols = static_cast<Eigen::Index>(std::max<std::size_t>(dim / 2, 1));
  const Eigen::MatrixXd b = padded.topLeftCorner(rows, cols);
  return (b.transpose() * b - Eigen::MatrixXd::Identity(cols, cols)).cwiseAbs().maxCoeff();
}

}  // namespace detail

// Max-entry defect of B^T B - I for the guarded interior block of the
// padded exponential. Exposed so callers can probe a padding choice.
inline double displacement_unitarity_defect(double beta, FockDim dim, std::size_t pad) {
  return detail::unitarity_defect(detail::padded_displacement(beta, dim.value() + pad),
                                  dim.value(), pad);
}

// D(beta) = exp(beta (a^dag - a)) cropped to dim x dim. Column 0 is the
// coherent vector |beta> (alternating signs for beta < 0).
inline Eigen::MatrixXd displacement_matrix(double beta, FockDim dim, std::size_t pad) {
  if (!std::isfinite(beta)) throw std::invalid_argument("displacement must be finite");
  if (pad < displacement_pad(beta)) {
    throw PaddingError("displacement pad " + std::to_string(pad) + " below required " +
                       std::to_string(displacement_pad(beta)));
  }
  const Eigen::MatrixXd padded = detail::padded_displacement(beta, dim.value() + pad);
  const double defect = detail::unitarity_defect(padded, dim.value(), pad);
  if (defect > kUnitarityTolerance) {
    throw PaddingError("displacement unitarity defect " + std::to_string(defect) +
                       " exceeds tolerance");
  }
  return padded.topLeftCorner(dim.index(), dim.index());
}

inline Eigen::MatrixXd displacement_matrix(double beta, FockDim dim) {
  return displacement_matrix(beta, dim, displacement_pad(beta));
}

// D(beta) rho D(beta)^T. A thermal input is relabelled displaced-thermal.
inline TruncatedState apply_displacement(const TruncatedState& state, double beta) {
  if (beta == 0.0) return state;
  const Eigen::MatrixXd d = displacement_matrix(beta, state.dim());
  Eigen::MatrixXd out = d * state.matrix() * d.transpose();
  out = 0.5 * (out + out.transpose()).eval();
  const double tr = out.trace();
  if (tr < 1.0 - kDisplacedTraceTolerance) {
    throw TruncationError("displaced state leaks " + std::to_string(1.0 - tr) +
                          " probability beyond dim " + std::to_string(state.dim().value()));
  }
  StateLabel label = state.label();
  if (label == StateLabel::Thermal) label = StateLabel::DisplacedThermal;
  return TruncatedState::from_matrix(std::move(out), label, kDisplacedTraceTolerance);
}

inline double trace_norm_distance(const TruncatedState& a, const TruncatedState& b) {
  if (!(a.dim() == b.dim())) {
    throw std::invalid_argument("trace_norm_distance: dimension mismatch (" +
                                std::to_string(a.dim().value()) + " vs " +
                                std::to_string(b.dim().value()) + ")");
  }
  return trace_norm(a.matrix() - b.matrix());
}

// Smallest dimension (at least 30) holding both a coherent state of amplitude
// sqrt(nbar) + beta_max and a thermal state of mean nbar to 1e-12 tail mass.
inline FockDim choose_dim(double nbar, double beta_max) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar) || !std::isfinite(beta_max)) {
    throw std::invalid_argument("choose_dim: parameters must be finite, nbar nonnegative");
  }
  const double amp = std::sqrt(nbar) + std::abs(beta_max);
  const double mean = amp * amp;
  std::size_t dim = kMinFockDim;
  while (detail::poisson_tail_from(mean, dim) > kFockTailTolerance ||
         detail::geometric_tail_from(nbar, dim) > kFockTailTolerance) {
    ++dim;
  }
  return FockDim(dim);
}

}  // namespace qdisc
