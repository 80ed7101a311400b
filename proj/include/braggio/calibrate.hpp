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
//
// Pulse calibration: beam-splitter balance root-find and adapted-mirror
// box search, both at q = 0.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "braggio/bragg.hpp"
#include "braggio/errors.hpp"
#include "braggio/ladder.hpp"
#include "braggio/ode.hpp"

namespace braggio {

// Moduli-squared of the q = 0 transition amplitudes the calibrations need.
struct PulseEfficiencies {
  double reflect_third = 0.0;   // |A_{+3,-3}|^2
  double transmit_third = 0.0;  // |A_{-3,-3}|^2
  double reflect_first = 0.0;   // |A_{+1,-1}|^2 + |A_{-1,+1}|^2
};

struct BeamSplitterCalibration {
  GaussianPulse pulse;
  double balance_residual = 0.0;  // | |A_{+3,-3}|^2 - |A_{-3,-3}|^2 |
  PulseEfficiencies efficiencies;
  int m_max = 0;
};

struct MirrorCalibration {
  GaussianPulse pulse;
  double objective = 0.0;
  PulseEfficiencies efficiencies;
  int m_max = 0;
  bool bypass = false;
};

struct TauBracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct SearchBox {
  double omega_lo = 0.0;
  double omega_hi = 0.0;
  double tau_lo = 0.0;
  double tau_hi = 0.0;
};

inline PulseEfficiencies q0_efficiencies(const GaussianPulse& pulse,
                                         const MomentumLadder& ladder,
                                         const OdeOptions& opts) {
  const TransitionAmplitudes amps = propagate_pulse(pulse, 0.0, ladder, opts);
  PulseEfficiencies e;
  e.reflect_third = std::norm(amps.amplitude(3, -3));
  e.transmit_third = std::norm(amps.amplitude(-3, -3));
  e.reflect_first =
      std::norm(amps.amplitude(1, -1)) + std::norm(amps.amplitude(-1, 1));
  return e;
}

// Third-order perturbative pi/2 duration: the ladder couples -3 -> +3 through
// two intermediates detuned by 8, giving an effective rate Omega^3(t)/512 and
// a Gaussian area of tau * Omega0^3 * sqrt(2*pi/3) / 512.
inline double beam_splitter_tau_estimate(double omega0) {
  return 0.5 * std::numbers::pi * 512.0 /
         (omega0 * omega0 * omega0 * std::sqrt(2.0 * std::numbers::pi / 3.0));
}

inline TauBracket default_beam_splitter_bracket(double omega0) {
  const double t = beam_splitter_tau_estimate(omega0);
  return {t / 16.0, 3.0 * t};
}

inline BeamSplitterCalibration calibrate_beam_splitter(
    double omega0, const MomentumLadder& ladder = MomentumLadder(),
    TauBracket bracket = {}, double balance_tol = 1e-6,
    double window_factor = 6.0, OdeOptions opts = {}, int scan_points = 48) {
  if (!(omega0 > 0.0))
    throw NoRootInBracket("no diffraction at zero Rabi frequency");
  if (!(bracket.hi > bracket.lo) || !(bracket.lo > 0.0))
    bracket = default_beam_splitter_bracket(omega0);
  if (scan_points < 2) throw InvalidArgument("need at least 2 scan points");

  // Signed balance defect; the smallest-tau zero crossing is the splitter.
  OdeOptions scan_opts = opts;
  scan_opts.rel_tol = std::max(opts.rel_tol, 1e-8);
  scan_opts.abs_tol = std::max(opts.abs_tol, 1e-10);
  const auto balance = [&](double tau, const OdeOptions& o) {
    const PulseEfficiencies e =
        q0_efficiencies(GaussianPulse(omega0, tau, window_factor), ladder, o);
    return e.reflect_third - e.transmit_third;
  };

  const double ratio = bracket.hi / bracket.lo;
  double a = bracket.lo;
  double fa = balance(a, scan_opts);
  double b = 0.0, fb = 0.0;
  bool found = false;
  for (int i = 1; i < scan_points; ++i) {
    b = bracket.lo * std::pow(ratio, double(i) / (scan_points - 1));
    fb = balance(b, scan_opts);
    if (fa == 0.0 || fa * fb <= 0.0) {
      found = true;
      break;
    }
    a = b;
    fa = fb;
  }
  if (!found)
    throw NoRootInBracket("no balanced splitter in the tau bracket");

  std::uintmax_t iters = 120;
  const auto small = [](double lo, double hi) {
    return std::abs(hi - lo) < 1e-11 * std::max(std::abs(lo), std::abs(hi));
  };
  const auto [ra, rb] = boost::math::tools::toms748_solve(
      [&](double t) { return balance(t, scan_opts); }, a, b, fa, fb, small,
      iters);
  double tau = 0.5 * (ra + rb);

  double residual = balance(tau, opts);
  if (std::abs(residual) > balance_tol) {
    // The relaxed-tolerance location can sit off the full-tolerance root by
    // the solver-accuracy gap; re-bracket tightly and solve at full tolerance.
    double lo = tau, hi = tau, flo = residual, fhi = residual;
    for (double d = 1e-3 * tau; d <= 0.3 * tau; d *= 4.0) {
      lo = std::max(bracket.lo, tau - d);
      hi = std::min(bracket.hi, tau + d);
      flo = balance(lo, opts);
      fhi = balance(hi, opts);
      if (flo * fhi <= 0.0) break;
    }
    if (flo * fhi > 0.0)
      throw ConvergenceFailure("balance root lost on full-tolerance refine");
    iters = 120;
    const auto [qa, qb] = boost::math::tools::toms748_solve(
        [&](double t) { return balance(t, opts); }, lo, hi, flo, fhi, small,
        iters);
    tau = 0.5 * (qa + qb);
    residual = balance(tau, opts);
    if (std::abs(residual) > balance_tol)
      throw ConvergenceFailure("balance residual exceeds tolerance");
  }

  BeamSplitterCalibration out{GaussianPulse(omega0, tau, window_factor),
                              std::abs(residual),
                              {},
                              ladder.m_max()};
  out.efficiencies = q0_efficiencies(out.pulse, ladder, opts);
  return out;
}

// Default box encloses the deepest reflectivity basin of the default ladder
// (about Omega0 = 9.47, tau = 0.93, where |A_{+3,-3}|^2 > 0.9999); the
// objective oscillates outside it, so wide boxes need denser coarse grids.
inline SearchBox default_mirror_box() { return {8.0, 12.0, 0.5, 1.3}; }

// Adapted mirror: maximal third-order reflectivity with a penalty on
// reflecting the first-order parasitic classes.
inline MirrorCalibration calibrate_adapted_mirror(
    SearchBox box, double penalty_weight = 1.0,
    const MomentumLadder& ladder = MomentumLadder(),
    double window_factor = 6.0, OdeOptions opts = {}, int coarse_points = 17,
    int refine_rounds = 3, int refine_points = 9) {
  if (!(box.omega_hi >= box.omega_lo) || !(box.tau_hi >= box.tau_lo) ||
      !(box.omega_lo > 0.0) || !(box.tau_lo > 0.0))
    throw EmptySearchBox("mirror search box is empty");
  if (!(penalty_weight >= 0.0))
    throw InvalidArgument("penalty weight must be nonnegative");
  if (coarse_points < 2 || refine_points < 2)
    throw InvalidArgument("need at least a 2x2 search grid");

  OdeOptions scan_opts = opts;
  scan_opts.rel_tol = std::max(opts.rel_tol, 1e-8);
  scan_opts.abs_tol = std::max(opts.abs_tol, 1e-10);
  const auto objective = [&](double omega, double tau, const OdeOptions& o) {
    const PulseEfficiencies e =
        q0_efficiencies(GaussianPulse(omega, tau, window_factor), ladder, o);
    return (1.0 - e.reflect_third) + penalty_weight * e.reflect_first;
  };

  const auto grid_min = [&](double olo, double ohi, double tlo, double thi,
                            int n, double& bo, double& bt) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double omega =
          (n == 1) ? olo : olo + (ohi - olo) * i / double(n - 1);
      for (int j = 0; j < n; ++j) {
        const double tau =
            (n == 1) ? tlo : tlo + (thi - tlo) * j / double(n - 1);
        const double f = objective(omega, tau, scan_opts);
        if (f < best) {
          best = f;
          bo = omega;
          bt = tau;
        }
      }
    }
    return best;
  };

  double bo = box.omega_lo, bt = box.tau_lo;
  const bool point_box =
      box.omega_hi == box.omega_lo && box.tau_hi == box.tau_lo;
  if (point_box) {
    objective(bo, bt, scan_opts);
  } else {
    grid_min(box.omega_lo, box.omega_hi, box.tau_lo, box.tau_hi, coarse_points,
             bo, bt);
    double ho = (box.omega_hi - box.omega_lo) / (coarse_points - 1);
    double ht = (box.tau_hi - box.tau_lo) / (coarse_points - 1);
    for (int r = 0; r < refine_rounds; ++r) {
      const double olo = std::max(box.omega_lo, bo - ho);
      const double ohi = std::min(box.omega_hi, bo + ho);
      const double tlo = std::max(box.tau_lo, bt - ht);
      const double thi = std::min(box.tau_hi, bt + ht);
      grid_min(olo, ohi, tlo, thi, refine_points, bo, bt);
      ho = 2.0 * ho / (refine_points - 1);
      ht = 2.0 * ht / (refine_points - 1);
    }
  }

  MirrorCalibration out{GaussianPulse(bo, bt, window_factor),
                        0.0,
                        {},
                        ladder.m_max(),
                        false};
  out.efficiencies = q0_efficiencies(out.pulse, ladder, opts);
  out.objective = (1.0 - out.efficiencies.reflect_third) +
                  penalty_weight * out.efficiencies.reflect_first;
  return out;
}

// Bypass mode: the configured (Omega0, tau) are taken verbatim; only the
// efficiencies are measured.
inline MirrorCalibration bypass_mirror(double omega0, double tau,
                                       const MomentumLadder& ladder =
                                           MomentumLadder(),
                                       double window_factor = 6.0,
                                       OdeOptions opts = {}) {
  MirrorCalibration out{GaussianPulse(omega0, tau, window_factor),
                        0.0,
                        {},
                        ladder.m_max(),
                        true};
  out.efficiencies = q0_efficiencies(out.pulse, ladder, opts);
  out.objective = (1.0 - out.efficiencies.reflect_third) +
                  out.efficiencies.reflect_first;
  return out;
}

}  // namespace braggio
