// Copyright 2026 The braggio authors
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

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "braggio/errors.hpp"

namespace braggio {

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0 = pick from interval length
  std::int64_t max_steps = 4'000'000;
};

namespace detail {

// Scaled RMS error norm: |e| measured against atol + rtol*max(|y0|,|y1|)
// componentwise, so tolerances hold per entry rather than in aggregate.
template <typename State>
double error_norm(const State& err, const State& y0, const State& y1,
                  double atol, double rtol) {
  const auto scale =
      (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).eval();
  return std::sqrt((err.cwiseAbs().array() / scale).square().mean());
}

}  // namespace detail

// Embedded Dormand-Prince 5(4) pair with FSAL and standard step control.
// Integrates y' = rhs(y, t) in place from t0 to t1; either direction.
// Rhs signature: rhs(const State& y, State& dydt, double t).
template <typename State, typename Rhs>
void integrate_adaptive(Rhs&& rhs, State& y, double t0, double t1,
                        const OdeOptions& opt = {}) {
  if (t1 == t0) return;
  const double dir = (t1 > t0) ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y;
  State ytmp = y, ynew = y, yerr = y;

  double t = t0;
  double h = (opt.initial_step != 0.0) ? std::abs(opt.initial_step)
                                       : std::min(span, 0.1);
  h *= dir;

  rhs(y, k1, t);
  std::int64_t steps = 0;
  bool rejected = false;

  while ((t - t1) * dir < 0.0) {
    if (++steps > opt.max_steps)
      throw ConvergenceFailure("adaptive stepper exceeded max step count");
    if ((t + h - t1) * dir > 0.0) h = t1 - t;
    if (std::abs(h) < 1e-14 * std::max(std::abs(t), span))
      throw ConvergenceFailure("adaptive stepper step size underflow");

    ytmp = y + h * (a21 * k1);
    rhs(ytmp, k2, t + c2 * h);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(ytmp, k3, t + c3 * h);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(ytmp, k4, t + c4 * h);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(ytmp, k5, t + c5 * h);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(ytmp, k6, t + h);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(ynew, k7, t + h);
    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double err =
        detail::error_norm(yerr, y, ynew, opt.abs_tol, opt.rel_tol);
    if (err <= 1.0) {
      t += h;
      y.swap(ynew);
      k1.swap(k7);  // first-same-as-last
      double fac = (err == 0.0) ? 5.0 : 0.9 * std::pow(err, -0.2);
      if (rejected) fac = std::min(fac, 1.0);
      h *= std::clamp(fac, 0.2, 5.0);
      rejected = false;
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
      rejected = true;
    }
  }
}

}  // namespace braggio
