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
#include <limits>
#include <utility>
#include <vector>

namespace qdisc {

struct ScalarMinimum {
  double x = 0.0;
  double value = std::numeric_limits<double>::infinity();
};

// Golden-section search for a minimum of `f` on [lo, hi]. Stops once the
// bracket is narrower than `x_tol`. The returned point is the best of the
// interior probes and the two endpoints, so a minimum sitting on the
// boundary is reported exactly.
template <class F>
ScalarMinimum golden_section_minimize(F&& f, double lo, double hi, double x_tol) {
  constexpr double kInvPhi = 0.6180339887498948482;
  ScalarMinimum best{lo, f(lo)};
  auto consider = [&best](double x, double v) {
    if (v < best.value) best = {x, v};
  };
  consider(hi, f(hi));
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > x_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  consider(c, fc);
  consider(d, fd);
  return best;
}

// Coarse uniform grid scan followed by golden-section refinement inside the
// cell pair around the best grid point. Guards against multimodal objectives
// where a plain bracket search would lock onto a side minimum.
template <class F>
ScalarMinimum grid_then_golden(F&& f, double lo, double hi, std::size_t grid_points,
                               double x_tol) {
  if (grid_points < 2 || !(hi > lo)) return {lo, f(lo)};
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  ScalarMinimum best{lo, std::numeric_limits<double>::infinity()};
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double x = (i + 1 == grid_points) ? hi : lo + step * static_cast<double>(i);
    const double v = f(x);
    if (v < best.value) {
      best = {x, v};
      best_i = i;
    }
  }
  const double a = best_i == 0 ? lo : lo + step * static_cast<double>(best_i - 1);
  const double b = best_i + 1 >= grid_points ? hi : lo + step * static_cast<double>(best_i + 1);
  const ScalarMinimum refined = golden_section_minimize(f, a, b, x_tol);
  return refined.value < best.value ? refined : best;
}

// Bisection for a root of a continuous `f` with f(lo), f(hi) of opposite sign.
template <class F>
double bisect_root(F&& f, double lo, double hi, double x_tol, int max_iter = 200) {
  double flo = f(lo);
  for (int i = 0; i < max_iter && hi - lo > x_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace qdisc
