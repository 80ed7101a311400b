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
#include <limits>
#include <numbers>
#include <vector>

#include "braggio/errors.hpp"
#include "braggio/spin_io.hpp"

namespace braggio {

// Symmetric-subspace state over the J_3 eigenbasis: c(k) multiplies
// |j, m = k - N/2>, j = N/2, k = 0..N.
struct DickeState {
  int n_atoms;
  Eigen::VectorXcd c;
};

// Coherent spin state along axis 1: binomial amplitudes, evaluated through
// lgamma so N = 2*10^4 stays in range.
inline DickeState css_state(int n) {
  if (n < 1) throw InvalidArgument("atom number must be >= 1");
  DickeState s{n, Eigen::VectorXcd(n + 1)};
  for (int k = 0; k <= n; ++k) {
    const double lg = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                             std::lgamma(n - k + 1.0)) -
                      0.5 * n * std::numbers::ln2;
    s.c(k) = std::exp(lg);
  }
  s.c /= s.c.norm();  // lgamma rounding leaves ~1e-11 at N = 2e4
  return s;
}

// One-axis twisting exp(-i (mu/2) J_3^2) applied to the CSS.  The phase
// m^2 mu/2 reaches ~1e5 rad at N = 2e4, so the reduction mod 2pi is done in
// long double before rounding to the unit circle.
inline DickeState oat_state(int n, double mu) {
  DickeState s = css_state(n);
  for (int k = 0; k <= n; ++k) {
    const long double d = 2.0L * k - n;  // 2m
    const long double arg = -static_cast<long double>(mu) * d * d / 8.0L;
    const long double red =
        std::remainder(arg, 2.0L * std::numbers::pi_v<long double>);
    s.c(k) *= std::polar(1.0, static_cast<double>(red));
  }
  return s;
}

namespace detail {

// Ladder actions on Dicke coefficients; all O(N).
inline Eigen::VectorXcd apply_j3(const DickeState& s) {
  Eigen::VectorXcd v(s.c.size());
  for (int k = 0; k < s.c.size(); ++k) v(k) = (k - 0.5 * s.n_atoms) * s.c(k);
  return v;
}

inline Eigen::VectorXcd apply_j1(const DickeState& s) {
  const int n = s.n_atoms;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n + 1);
  for (int k = 0; k <= n; ++k) {
    if (k + 1 <= n)
      v(k + 1) += 0.5 * std::sqrt(double(n - k) * (k + 1.0)) * s.c(k);
    if (k - 1 >= 0)
      v(k - 1) += 0.5 * std::sqrt(double(k) * (n - k + 1.0)) * s.c(k);
  }
  return v;
}

inline Eigen::VectorXcd apply_j2(const DickeState& s) {
  const int n = s.n_atoms;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n + 1);
  const cplx half_over_i(0.0, -0.5);
  for (int k = 0; k <= n; ++k) {
    if (k + 1 <= n)
      v(k + 1) += half_over_i * std::sqrt(double(n - k) * (k + 1.0)) * s.c(k);
    if (k - 1 >= 0)
      v(k - 1) -= half_over_i * std::sqrt(double(k) * (n - k + 1.0)) * s.c(k);
  }
  return v;
}

}  // namespace detail

// Exact moments of a symmetric-subspace state: P_0 = N/2 and a vanishing
// 0-row/column in Gamma hold identically at fixed atom number.
inline SpinMoments dicke_moments(const DickeState& s) {
  const Eigen::VectorXcd v1 = detail::apply_j1(s);
  const Eigen::VectorXcd v2 = detail::apply_j2(s);
  const Eigen::VectorXcd v3 = detail::apply_j3(s);
  const Eigen::VectorXcd* v[3] = {&v1, &v2, &v3};

  SpinMoments m;
  m.p.setZero();
  m.gamma.setZero();
  m.p(0) = 0.5 * s.n_atoms;
  for (int a = 0; a < 3; ++a) m.p(a + 1) = s.c.dot(*v[a]).real();
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      const double sym = v[a]->dot(*v[b]).real();
      m.gamma(a + 1, b + 1) = sym - m.p(a + 1) * m.p(b + 1);
      m.gamma(b + 1, a + 1) = m.gamma(a + 1, b + 1);
    }
  return m;
}

inline SpinMoments css_moments(int n) {
  if (n < 1) throw InvalidArgument("atom number must be >= 1");
  SpinMoments m;
  m.p << 0.5 * n, 0.5 * n, 0.0, 0.0;
  m.gamma.setZero();
  m.gamma(2, 2) = 0.25 * n;
  m.gamma(3, 3) = 0.25 * n;
  return m;
}

inline SpinMoments oat_moments(int n, double mu) {
  return dicke_moments(oat_state(n, mu));
}

// Right-handed rotation about axis 1 applied to the moments (never to the
// state): theta = pi/2 maps axis 2 onto axis 3.
inline SpinMoments rotate_about_1(const SpinMoments& m, double theta) {
  Eigen::Matrix4d r = Eigen::Matrix4d::Identity();
  const double c = std::cos(theta), s = std::sin(theta);
  r(2, 2) = c;
  r(2, 3) = -s;
  r(3, 2) = s;
  r(3, 3) = c;
  SpinMoments out;
  out.p = r * m.p;
  out.gamma = r * m.gamma * r.transpose();
  return out;
}

// Angle minimizing Gamma_22 after rotation; the variance along axis 2 is
// A + B cos 2theta + C sin 2theta, minimized in closed form.  Result folded
// into [0, pi); ties (isotropic noise) resolve to 0.
inline double optimal_theta(const SpinMoments& m) {
  const double b = 0.5 * (m.gamma(2, 2) - m.gamma(3, 3));
  const double c = -m.gamma(2, 3);
  const double tie = 1e-9 * std::max(m.gamma(2, 2) + m.gamma(3, 3), 1e-300);
  if (std::abs(b) < tie && std::abs(c) < tie) return 0.0;
  double theta = 0.5 * std::atan2(-c, -b);
  if (theta < 0.0) theta += std::numbers::pi;
  return theta;
}

inline double optimal_theta(int n, double mu) {
  return optimal_theta(oat_moments(n, mu));
}

// Angle minimizing the measured output variance [Q Gamma(theta) Q^T]_33 for
// states whose mean spin points along axis 1 (P_2 = P_3 = 0, so the noise
// matrix does not move with theta).  With w = (Q_32, Q_33) the objective is
// again A + B cos 2theta + C sin 2theta over the (2,3) noise ellipse.
inline double aligned_rotation_angle(const SpinMoments& m, const QMatrix& qm) {
  const double scale = std::max(1.0, m.p(0));
  if (std::abs(m.p(2)) > 1e-9 * scale || std::abs(m.p(3)) > 1e-9 * scale ||
      std::abs(m.gamma(1, 2)) > 1e-7 * scale * scale ||
      std::abs(m.gamma(1, 3)) > 1e-7 * scale * scale)
    throw InvalidArgument(
        "readout alignment assumes mean spin along axis 1 with noise "
        "confined to the (2,3) plane");
  const double w2 = qm.q(3, 2), w3 = qm.q(3, 3);
  const double g22 = m.gamma(2, 2), g33 = m.gamma(3, 3), g23 = m.gamma(2, 3);
  const double b = 0.5 * (g22 - g33) * (w2 * w2 - w3 * w3) + 2.0 * g23 * w2 * w3;
  const double c = (g22 - g33) * w2 * w3 - g23 * (w2 * w2 - w3 * w3);
  if (b == 0.0 && c == 0.0) return 0.0;
  double theta = 0.5 * std::atan2(-c, -b);
  if (theta < 0.0) theta += std::numbers::pi;
  return theta;
}

// Wineland parameter xi = sqrt(N) * sqrt(Gamma_22) / P_1 of the moments as
// given (apply the rotation first to read out the squeezed quadrature).
inline double wineland_xi(const SpinMoments& m) {
  if (!(m.p(1) > 1e-12 * m.p(0)))
    throw DepolarizedState("mean spin collapsed; squeezing undefined");
  const double n = 2.0 * m.p(0);
  return std::sqrt(n) * std::sqrt(std::max(m.gamma(2, 2), 0.0)) / m.p(1);
}

// xi(mu) at the optimal readout angle.
inline double oat_xi(int n, double mu) {
  const SpinMoments m = oat_moments(n, mu);
  return wineland_xi(rotate_about_1(m, optimal_theta(m)));
}

struct OatOptimum {
  double mu;
  double xi;
};

// Location and depth of the squeezing minimum: coarse log-spaced scan over
// the twisting strength followed by golden-section refinement.
inline OatOptimum optimal_mu(int n, int scan_points = 240) {
  // Depolarized points (mean spin wrapped through zero) sit far beyond the
  // minimum; treat them as worst-possible rather than erroring out.
  const auto safe_xi = [n](double mu) {
    try {
      return oat_xi(n, mu);
    } catch (const DepolarizedState&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const double lo = 1e-6, hi = std::numbers::pi;
  double best_mu = 0.0, best_xi = 1.0;
  int best_i = -1;
  std::vector<double> mus(scan_points);
  for (int i = 0; i < scan_points; ++i) {
    mus[i] = lo * std::pow(hi / lo, double(i) / (scan_points - 1));
    const double xi = safe_xi(mus[i]);
    if (xi < best_xi) {
      best_xi = xi;
      best_mu = mus[i];
      best_i = i;
    }
  }
  if (best_i <= 0 || best_i >= scan_points - 1)
    return OatOptimum{best_mu, best_xi};
  double a = mus[best_i - 1], b = mus[best_i + 1];
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = safe_xi(x1), f2 = safe_xi(x2);
  while ((b - a) > 1e-10 * b) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = safe_xi(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = safe_xi(x2);
    }
  }
  const double mu = 0.5 * (a + b);
  return OatOptimum{mu, safe_xi(mu)};
}

// Inverts xi(mu) on the monotone branch mu in [0, mu*] by bisection.
inline double xi_to_mu(int n, double xi_target) {
  if (xi_target > 1.0)
    throw OutOfRange("target squeezing above the coherent-state value");
  if (xi_target == 1.0) return 0.0;
  const OatOptimum opt = optimal_mu(n);
  if (xi_target < opt.xi)
    throw OutOfRange("target squeezing below the one-axis-twisting minimum");
  double lo = 0.0, hi = opt.mu;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (oat_xi(n, mid) > xi_target)
      lo = mid;
    else
      hi = mid;
    if ((hi - lo) < 1e-10 * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace braggio
