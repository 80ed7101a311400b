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
// Self-verification suite: the closed-form moment transport against the
// brute-force many-body reference, the unitary (lossless) limit, and the
// uniform-loss closed forms.  Each check reports its worst-case deviation.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "braggio/mzi.hpp"
#include "braggio/optimize.hpp"
#include "braggio/oracle.hpp"
#include "braggio/spin_io.hpp"
#include "braggio/states.hpp"

namespace braggio {

struct CheckResult {
  std::string name;
  double worst = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool pass = true;

  void add(std::string name, double worst, double tol) {
    const bool ok = worst < tol;
    checks.push_back({std::move(name), worst, tol, ok});
    pass = pass && ok;
  }
};

namespace detail {

inline double max_abs(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
  return (a - b).cwiseAbs().maxCoeff();
}
inline double max_abs(const Eigen::Matrix4d& a, const Eigen::Matrix4d& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace detail

// `inject_fault` flips the sign of the loss-noise term in the closed-form
// side, which the many-body comparison must catch: a self-test that the suite
// can actually fail.
inline VerifyReport run_verification(unsigned seed = 1,
                                     bool inject_fault = false,
                                     int trials_per_n = 10) {
  VerifyReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mu_d(0.0, 2.5);
  std::uniform_real_distribution<double> th_d(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  const auto closed_form = [&](const SpinMoments& in,
                               const Eigen::Matrix2cd& z) {
    const TransferFn fn = [&z](double, double) {
      return TwoPortTransfer{z, Eigen::Matrix2cd::Zero()};
    };
    const TransportResult r =
        propagate_moments(in, q_matrix(fn, WavePacket::delta(), 0.0));
    SpinMoments out = r.out;
    if (inject_fault) out.gamma -= 2.0 * r.gamma_noise;
    return out;
  };

  {
    double worst = 0.0;
    for (int n = 1; n <= 5; ++n) {
      for (int t = 0; t < trials_per_n; ++t) {
        const double mu = mu_d(rng), th = th_d(rng);
        const Eigen::Matrix2cd z = oracle::random_subunitary(rng);
        const SpinMoments in = rotate_about_1(oat_moments(n, mu), th);
        const SpinMoments closed = closed_form(in, z);
        const SpinMoments exact = oracle::exact_output_moments(
            oracle::build_oat_fock(n, mu, th), oracle::dilate(z));
        worst = std::max(worst, detail::max_abs(closed.p, exact.p));
        worst = std::max(worst, detail::max_abs(closed.gamma, exact.gamma));
      }
    }
    rep.add("transport vs many-body reference", worst, 1e-9);
  }

  {
    // Lossless devices add no noise and act orthogonally on the spin block.
    double worst_noise = 0.0, worst_orth = 0.0;
    for (int t = 0; t < 10; ++t) {
      const Eigen::Matrix2cd z = oracle::random_unitary(rng);
      const TransferFn fn = [&z](double, double) {
        return TwoPortTransfer{z, Eigen::Matrix2cd::Zero()};
      };
      const QMatrix qm = q_matrix(fn, WavePacket::delta(), 0.0);
      const SpinMoments in = rotate_about_1(oat_moments(4, 0.7), th_d(rng));
      const TransportResult r = propagate_moments(in, qm);
      worst_noise =
          std::max(worst_noise, r.gamma_noise.cwiseAbs().maxCoeff());
      const Eigen::Matrix3d rblock = qm.q.bottomRightCorner<3, 3>();
      worst_orth = std::max(
          worst_orth, (rblock.transpose() * rblock - Eigen::Matrix3d::Identity())
                          .cwiseAbs()
                          .maxCoeff());
      worst_orth = std::max(worst_orth, qm.q.row(0).tail(3).cwiseAbs().maxCoeff());
      worst_orth = std::max(worst_orth, qm.q.col(0).tail(3).cwiseAbs().maxCoeff());
      worst_orth = std::max(worst_orth, std::abs(qm.q(0, 0) - 1.0));
    }
    rep.add("lossless limit: zero noise", worst_noise, 1e-12);
    rep.add("lossless limit: orthogonal spin block", worst_orth, 1e-12);
  }

  {
    // Uniform transmission eta: noise is (eta(1-eta)/2) Lambda(P_in) and an
    // uncorrelated input reads at the shot-noise level of the kept atoms.
    double worst_form = 0.0, worst_sql = 0.0;
    for (int t = 0; t < 8; ++t) {
      const double eta = 0.05 + 0.9 * u01(rng);
      const int n = 50 + t * 25;
      const SpinMoments in = css_moments(n);
      const TransferFn fn = uniform_loss_mzi_fn(eta);
      const QMatrix qm = q_matrix(fn, WavePacket::delta(), 0.0);
      const TransportResult r = propagate_moments(in, qm);
      const Eigen::Matrix4d want =
          0.5 * eta * (1.0 - eta) * lambda_matrix(in.p);
      worst_form = std::max(worst_form,
                            (r.gamma_noise - want).cwiseAbs().maxCoeff());
      const double dphi = sensitivity(in, qm);
      worst_sql = std::max(worst_sql,
                           std::abs(dphi * std::sqrt(eta * n) - 1.0));
    }
    rep.add("uniform-loss noise closed form", worst_form, 1e-12);
    rep.add("shot-noise floor under uniform loss", worst_sql, 1e-8);
  }

  {
    // Ideal device reads the input squeezing parameter exactly.
    const Pipeline pipe(ideal_mzi_fn(), WavePacket::delta());
    double worst = 0.0;
    const int n = 100;
    for (const double mu : {0.0, 0.02, 0.08, optimal_mu(n).mu}) {
      const double dphi = pipe.evaluate(n, mu).dphi;
      worst = std::max(worst,
                       std::abs(dphi * std::sqrt(double(n)) - oat_xi(n, mu)));
    }
    rep.add("ideal device gain equals input squeezing", worst, 1e-8);
  }

  return rep;
}

}  // namespace braggio
