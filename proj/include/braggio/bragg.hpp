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

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "braggio/errors.hpp"
#include "braggio/ladder.hpp"
#include "braggio/ode.hpp"

namespace braggio {

using cplx = std::complex<double>;

// Gaussian two-photon coupling envelope Omega(t) = Omega0 exp(-t^2/2tau^2),
// truncated to |t| <= window_factor * tau.
struct GaussianPulse {
  double omega0;
  double tau;
  double window_factor = 6.0;

  GaussianPulse(double omega0_, double tau_, double window_factor_ = 6.0)
      : omega0(omega0_), tau(tau_), window_factor(window_factor_) {
    if (!(tau > 0.0)) throw InvalidPulse("pulse duration must be positive");
    if (!(omega0 >= 0.0))
      throw InvalidPulse("pulse amplitude must be non-negative");
    if (!(window_factor >= 4.0))
      throw InvalidPulse("integration window must span >= 4 sigma");
  }

  double amplitude(double t) const {
    return omega0 * std::exp(-t * t / (2.0 * tau * tau));
  }
  double half_window() const { return window_factor * tau; }
};

// H(q, t) over the ladder: kinetic terms (m+q)^2 on the diagonal, lattice
// coupling Omega(t)/2 between neighbours.  q = quasimomentum in hbar*k.
inline Eigen::MatrixXd build_hamiltonian(double q, double omega,
                                         const MomentumLadder& ladder) {
  const int n = ladder.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double p = ladder.momentum(i) + q;
    h(i, i) = p * p;
    if (i + 1 < n) {
      h(i, i + 1) = 0.5 * omega;
      h(i + 1, i) = 0.5 * omega;
    }
  }
  return h;
}

// Full transition-amplitude matrix of one pulse: a(j, i) maps input state i
// at t = -T to output state j at t = +T, T = half the integration window.
struct TransitionAmplitudes {
  double q;
  MomentumLadder ladder;
  double t_half;
  Eigen::MatrixXcd a;

  cplx amplitude(int m_out, int m_in) const {
    return a(ladder.index_of(m_out), ladder.index_of(m_in));
  }
};

// Solves i dU/dt = H(t) U across the pulse window in the rotating frame of
// the kinetic term: U(t) = exp(-iK(t+T)) V(t) with K = diag((m+q)^2), so the
// integrated system carries only the envelope-limited coupling
//   i dV/dt = (Omega(t)/2) exp(+iK(t+T)) C exp(-iK(t+T)) V,   V(-T) = 1.
// This keeps step sizes tied to Omega(t) instead of the fastest kinetic
// phase, and reproduces pure free evolution exactly at Omega0 = 0.
inline TransitionAmplitudes propagate_pulse(const GaussianPulse& pulse,
                                            double q,
                                            const MomentumLadder& ladder,
                                            const OdeOptions& opt = {}) {
  const int n = ladder.size();
  const double t_half = pulse.half_window();

  Eigen::VectorXd k(n);
  for (int i = 0; i < n; ++i) {
    const double p = ladder.momentum(i) + q;
    k(i) = p * p;
  }
  Eigen::VectorXd dk_up(n - 1);  // K_i - K_{i+1}
  for (int i = 0; i + 1 < n; ++i) dk_up(i) = k(i) - k(i + 1);

  Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);

  auto rhs = [&](const Eigen::MatrixXcd& u, Eigen::MatrixXcd& dudt,
                 double t) {
    dudt.setZero();
    const double om = pulse.amplitude(t);
    if (om == 0.0) return;
    const double s = t + t_half;
    for (int i = 0; i + 1 < n; ++i) {
      const cplx cu = cplx(0.0, -0.5 * om) * std::polar(1.0, dk_up(i) * s);
      dudt.row(i) += cu * u.row(i + 1);
      dudt.row(i + 1) -= std::conj(cu) * u.row(i);
    }
  };

  integrate_adaptive(rhs, v, -t_half, t_half, opt);

  // Back to the lab frame: U(T) = exp(-iK*2T) V(T).
  Eigen::VectorXcd lab_phase(n);
  for (int i = 0; i < n; ++i) lab_phase(i) = std::polar(1.0, -2.0 * t_half * k(i));
  Eigen::MatrixXcd a = lab_phase.asDiagonal() * v;
  return TransitionAmplitudes{q, ladder, t_half, std::move(a)};
}

// Removes the kinetic phases accumulated from the pulse centre outwards on
// both legs: a_stripped = exp(+iKT) a exp(+iKT).  Sequences composed from
// stripped pulses reference every element to its own centre, which is the
// frame in which the ideal beam-splitter/mirror limits hold.
inline TransitionAmplitudes strip_free_evolution(
    const TransitionAmplitudes& raw) {
  const int n = raw.ladder.size();
  Eigen::VectorXcd ph(n);
  for (int i = 0; i < n; ++i) {
    const double p = raw.ladder.momentum(i) + raw.q;
    ph(i) = std::polar(1.0, raw.t_half * p * p);
  }
  TransitionAmplitudes out = raw;
  out.a = ph.asDiagonal() * raw.a * ph.asDiagonal();
  return out;
}

// Two-port restriction onto the interferometer arms.  Port 1 = m_hi (upper
// arm), port 2 = m_lo (lower arm); losses show up as ||column|| < 1.
inline Eigen::Matrix2cd extract_two_port(const TransitionAmplitudes& amps,
                                         int m_hi = 3, int m_lo = -3) {
  Eigen::Matrix2cd z;
  z << amps.amplitude(m_hi, m_hi), amps.amplitude(m_hi, m_lo),
      amps.amplitude(m_lo, m_hi), amps.amplitude(m_lo, m_lo);
  return z;
}

// Truncation + tolerance sensitivity of the stripped two-port block: compares
// against a ladder four momenta wider solved at half the tolerance.
inline double convergence_defect(const GaussianPulse& pulse, double q,
                                 const MomentumLadder& ladder,
                                 const OdeOptions& opt = {}, int m_hi = 3,
                                 int m_lo = -3) {
  const Eigen::Matrix2cd z =
      extract_two_port(strip_free_evolution(propagate_pulse(pulse, q, ladder, opt)),
                       m_hi, m_lo);
  OdeOptions tight = opt;
  tight.rel_tol *= 0.5;
  tight.abs_tol *= 0.5;
  const MomentumLadder wider(ladder.m_max() + 4);
  const Eigen::Matrix2cd zw = extract_two_port(
      strip_free_evolution(propagate_pulse(pulse, q, wider, tight)), m_hi,
      m_lo);
  return (z - zw).cwiseAbs().maxCoeff();
}

}  // namespace braggio
