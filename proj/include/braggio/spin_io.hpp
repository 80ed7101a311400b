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
#include <functional>
#include <utility>

#include "braggio/errors.hpp"

namespace braggio {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.  The positive
// half is computed and mirrored, so node pairs are exactly +-symmetric.
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("quadrature order must be positive");
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // Re-evaluate P'_n at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes(i) = -x;  // ascending order, i runs over the negative half
    r.weights(i) = w;
    r.nodes(n - 1 - i) = x;
    r.weights(n - 1 - i) = w;
  }
  if (n % 2 == 1) r.nodes(half - 1) = 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Momentum wave packet
// ---------------------------------------------------------------------------

// Discretized |phi(p)|^2 for a Gaussian packet of width dp (units hbar*k):
// Gauss-Legendre nodes over [-L, L], L = min(span*dp, 1), weights carrying
// the density and renormalized to unit mass.
struct WavePacket {
  double dp = 0.0;
  Eigen::VectorXd nodes;    // quasimomentum samples
  Eigen::VectorXd weights;  // positive, sum exactly renormalized to 1

  static WavePacket gaussian(double dp, int n_nodes = 64,
                             double span_sigmas = 6.0,
                             double clip_tol = 1e-6) {
    if (!(dp > 0.0)) throw InvalidArgument("packet width must be positive");
    if (n_nodes < 2) throw InvalidArgument("need at least two packet nodes");
    const double L = std::min(span_sigmas * dp, 1.0);
    const double clipped = std::erfc(L / (std::sqrt(2.0) * dp));
    if (clipped > clip_tol)
      throw QuadratureUnderflow(
          "packet mass outside the quasimomentum window exceeds clip_tol");
    const QuadratureRule gl = gauss_legendre(n_nodes);
    WavePacket p;
    p.dp = dp;
    p.nodes = L * gl.nodes;
    p.weights.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      const double q = p.nodes(i);
      p.weights(i) = gl.weights(i) * std::exp(-q * q / (2.0 * dp * dp));
    }
    p.weights /= p.weights.sum();
    return p;
  }

  // Single-node packet pinned at q = 0 (the plane-wave reference).
  static WavePacket delta() {
    WavePacket p;
    p.dp = 0.0;
    p.nodes = Eigen::VectorXd::Zero(1);
    p.weights = Eigen::VectorXd::Ones(1);
    return p;
  }
};

// ---------------------------------------------------------------------------
// Moment transport
// ---------------------------------------------------------------------------

// First and symmetrized second moments of the pseudospin components
// S_alpha = 1/2 sum_ij sigma^alpha_ij a_i^dag a_j over the two ports.
struct SpinMoments {
  Eigen::Vector4d p;      // <S_alpha>
  Eigen::Matrix4d gamma;  // 1/2<{S_a,S_b}> - <S_a><S_b>
};

inline Eigen::Matrix2cd pauli(int alpha) {
  Eigen::Matrix2cd s;
  switch (alpha) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0); break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw InvalidArgument("pauli index out of range");
  }
  return s;
}

// Lambda(P): first row/column carry P, the remaining diagonal carries P_0.
inline Eigen::Matrix4d lambda_matrix(const Eigen::Vector4d& p) {
  Eigen::Matrix4d l = Eigen::Matrix4d::Zero();
  for (int a = 0; a < 4; ++a) {
    l(0, a) = p(a);
    l(a, 0) = p(a);
    if (a > 0) l(a, a) = p(0);
  }
  l(0, 0) = p(0);
  return l;
}

// Two-port transfer matrix and its phase derivative at one (q, phi).
struct TwoPortTransfer {
  Eigen::Matrix2cd z;
  Eigen::Matrix2cd dz;
};

using TransferFn = std::function<TwoPortTransfer(double q, double phi)>;

// Packet-averaged moment-transport matrix and its phase derivative:
// Q_ab = sum_q w(q) 1/2 tr{Z^dag(q) sigma_a Z(q) sigma_b}.
struct QMatrix {
  Eigen::Matrix4d q;
  Eigen::Matrix4d dq;
};

inline QMatrix q_matrix(const TransferFn& fn, const WavePacket& packet,
                        double phi, double imag_tol = 1e-10) {
  QMatrix out;
  out.q.setZero();
  out.dq.setZero();
  for (int i = 0; i < packet.nodes.size(); ++i) {
    const double w = packet.weights(i);
    const TwoPortTransfer t = fn(packet.nodes(i), phi);
    for (int a = 0; a < 4; ++a) {
      const Eigen::Matrix2cd za = t.z.adjoint() * pauli(a);
      const Eigen::Matrix2cd ta = za * t.z;
      const Eigen::Matrix2cd da =
          t.dz.adjoint() * pauli(a) * t.z + za * t.dz;
      for (int b = 0; b < 4; ++b) {
        const cplx tr_q = 0.5 * (ta * pauli(b)).trace();
        const cplx tr_d = 0.5 * (da * pauli(b)).trace();
        if (std::abs(tr_q.imag()) > imag_tol ||
            std::abs(tr_d.imag()) > imag_tol)
          throw Error("transport trace acquired an imaginary part");
        out.q(a, b) += w * tr_q.real();
        out.dq(a, b) += w * tr_d.real();
      }
    }
  }
  return out;
}

// Closed-form input-output relations for the moments.  The noise term is the
// symmetrized second-moment defect of the one-body channel; for a channel
// with uniform transmission eta it reduces to (eta(1-eta)/2) Lambda(P_in).
struct TransportResult {
  SpinMoments out;
  Eigen::Matrix4d gamma_noise;
};

inline TransportResult propagate_moments(const SpinMoments& in,
                                         const QMatrix& qm) {
  TransportResult r;
  r.out.p = qm.q * in.p;
  Eigen::Matrix4d noise =
      0.5 * (lambda_matrix(r.out.p) - qm.q * lambda_matrix(in.p) * qm.q.transpose());
  noise = 0.5 * (noise + noise.transpose()).eval();
  r.gamma_noise = noise;
  Eigen::Matrix4d g = qm.q * in.gamma * qm.q.transpose() + noise;
  r.out.gamma = 0.5 * (g + g.transpose()).eval();
  return r;
}

// Error-propagated phase resolution of the population-difference signal at
// the operating point: dphi = sqrt(Var S_3^out) / |d<S_3^out>/dphi|.
inline double sensitivity(const SpinMoments& in, const QMatrix& qm,
                          double slope_floor = 1e-12) {
  const double slope = (qm.dq * in.p)(3);
  if (std::abs(slope) <= slope_floor)
    throw ZeroSlope("phase response is flat at the operating point");
  const TransportResult r = propagate_moments(in, qm);
  const double var = std::max(r.out.gamma(3, 3), 0.0);
  return std::sqrt(var) / std::abs(slope);
}

}  // namespace braggio
