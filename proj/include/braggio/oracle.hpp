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
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "braggio/errors.hpp"
#include "braggio/spin_io.hpp"

// Brute-force many-body reference: propagates number states of N atoms over
// 4 modes (2 detected + 2 loss) through a unitary dilation of the two-port
// transfer matrix and takes spin moments on the detected modes directly.
// Deliberately naive; capped at small N.
namespace braggio::oracle {

inline constexpr int kAtomCap = 12;

// ---------------------------------------------------------------------------
// Dilation
// ---------------------------------------------------------------------------

// Unitary completion [[Z, sqrt(1-ZZ^dag)], [sqrt(1-Z^dag Z), -Z^dag]] of a
// contraction Z.
inline Eigen::Matrix4cd dilate(const Eigen::Matrix2cd& z) {
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(
      z, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector2d s = svd.singularValues();
  if (s.maxCoeff() > 1.0 + 1e-10)
    throw NotSubUnitary("transfer matrix has singular value above 1");
  Eigen::Vector2d loss;
  for (int i = 0; i < 2; ++i)
    loss(i) = std::sqrt(std::max(0.0, 1.0 - std::min(s(i), 1.0) *
                                            std::min(s(i), 1.0)));
  const Eigen::Matrix2cd w = svd.matrixU();
  const Eigen::Matrix2cd v = svd.matrixV();
  Eigen::Matrix4cd u;
  u.block<2, 2>(0, 0) = z;
  u.block<2, 2>(0, 2) = w * loss.asDiagonal() * w.adjoint();
  u.block<2, 2>(2, 0) = v * loss.asDiagonal() * v.adjoint();
  u.block<2, 2>(2, 2) = -z.adjoint();
  return u;
}

// Alternative completion mixing the loss inputs by an extra unitary; the
// detected-mode moments must not depend on this choice.
inline Eigen::Matrix4cd dilate_with_completion(const Eigen::Matrix2cd& z,
                                               const Eigen::Matrix2cd& x) {
  Eigen::Matrix4cd mix = Eigen::Matrix4cd::Identity();
  mix.block<2, 2>(2, 2) = x;
  return dilate(z) * mix;
}

// ---------------------------------------------------------------------------
// Number-state basis over 4 modes at fixed total N
// ---------------------------------------------------------------------------

class FockBasis4 {
 public:
  explicit FockBasis4(int n) : n_(n) {
    if (n < 1) throw InvalidArgument("atom number must be >= 1");
    if (n > kAtomCap) throw CapExceeded("reference computation capped");
    lookup_.assign((n + 1) * (n + 1) * (n + 1), -1);
    for (int n1 = 0; n1 <= n; ++n1)
      for (int n2 = 0; n2 + n1 <= n; ++n2)
        for (int n3 = 0; n3 + n2 + n1 <= n; ++n3) {
          lookup_[(n1 * (n + 1) + n2) * (n + 1) + n3] =
              static_cast<int>(occ_.size());
          occ_.push_back({n1, n2, n3, n - n1 - n2 - n3});
        }
  }

  int n_atoms() const { return n_; }
  int dim() const { return static_cast<int>(occ_.size()); }
  const std::array<int, 4>& occ(int i) const { return occ_[i]; }

  int index(int n1, int n2, int n3) const {
    return lookup_[(n1 * (n_ + 1) + n2) * (n_ + 1) + n3];
  }

  int index(const std::array<int, 4>& o) const {
    return index(o[0], o[1], o[2]);
  }

 private:
  int n_;
  std::vector<std::array<int, 4>> occ_;
  std::vector<int> lookup_;
};

struct FockState4 {
  FockBasis4 basis;
  Eigen::VectorXcd c;
};

// ---------------------------------------------------------------------------
// State construction
// ---------------------------------------------------------------------------

// OAT state over the detected modes, loss modes in vacuum.  The rotation is
// applied to the state itself (dense exp of the symmetric-subspace J_1),
// unlike the moment-level rotation used elsewhere.
inline FockState4 build_oat_fock(int n, double mu, double theta) {
  if (n > kAtomCap) throw CapExceeded("reference computation capped");
  Eigen::VectorXcd dicke(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double amp = std::sqrt(std::exp(std::lgamma(n + 1.0) -
                                          std::lgamma(k + 1.0) -
                                          std::lgamma(n - k + 1.0)) /
                                 std::pow(2.0, n));
    const double m = k - 0.5 * n;
    dicke(k) = amp * std::polar(1.0, -0.5 * mu * m * m);
  }
  Eigen::MatrixXd j1 = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int k = 0; k < n; ++k) {
    const double cup = 0.5 * std::sqrt(double(n - k) * (k + 1.0));
    j1(k + 1, k) = cup;
    j1(k, k + 1) = cup;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j1);
  Eigen::VectorXcd phases(n + 1);
  for (int k = 0; k <= n; ++k)
    phases(k) = std::polar(1.0, -theta * es.eigenvalues()(k));
  dicke = es.eigenvectors().cast<cplx>() * phases.asDiagonal() *
          es.eigenvectors().transpose().cast<cplx>() * dicke;

  FockState4 st{FockBasis4(n), Eigen::VectorXcd()};
  st.c = Eigen::VectorXcd::Zero(st.basis.dim());
  for (int k = 0; k <= n; ++k) st.c(st.basis.index(k, n - k, 0)) = dicke(k);
  return st;
}

// ---------------------------------------------------------------------------
// Moments after the channel
// ---------------------------------------------------------------------------

namespace detail {

// (sum_kl M_kl a_k^dag a_l) |psi>.
inline Eigen::VectorXcd apply_one_body(const Eigen::Matrix4cd& m,
                                       const FockState4& st) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(st.c.size());
  for (int i = 0; i < st.basis.dim(); ++i) {
    const cplx ci = st.c(i);
    if (ci == cplx(0.0, 0.0)) continue;
    const auto& o = st.basis.occ(i);
    for (int l = 0; l < 4; ++l) {
      if (o[l] == 0) continue;
      for (int k = 0; k < 4; ++k) {
        if (m(k, l) == cplx(0.0, 0.0)) continue;
        if (k == l) {
          out(i) += m(k, l) * double(o[l]) * ci;
          continue;
        }
        auto on = o;
        --on[l];
        const double f = std::sqrt(double(o[l]) * (on[k] + 1.0));
        ++on[k];
        out(st.basis.index(on)) += m(k, l) * f * ci;
      }
    }
  }
  return out;
}

}  // namespace detail

// Exact detected-port moments of U|psi> via Heisenberg transport of the
// one-body spin operators: S_a -> 1/2 sum (U^dag sigma_a U)_kl a_k^dag a_l.
inline SpinMoments exact_output_moments(const FockState4& st,
                                        const Eigen::Matrix4cd& u) {
  std::array<Eigen::VectorXcd, 4> w;
  for (int a = 0; a < 4; ++a) {
    Eigen::Matrix4cd sig = Eigen::Matrix4cd::Zero();
    sig.block<2, 2>(0, 0) = pauli(a);
    const Eigen::Matrix4cd m = 0.5 * (u.adjoint() * sig * u);
    w[a] = detail::apply_one_body(m, st);
  }
  SpinMoments out;
  for (int a = 0; a < 4; ++a) out.p(a) = st.c.dot(w[a]).real();
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      const double sym = w[a].dot(w[b]).real();
      out.gamma(a, b) = sym - out.p(a) * out.p(b);
      out.gamma(b, a) = out.gamma(a, b);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Random draws for the verification trials
// ---------------------------------------------------------------------------

inline Eigen::Matrix2cd random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Matrix2cd a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = cplx(g(rng), g(rng));
  const Eigen::HouseholderQR<Eigen::Matrix2cd> qr(a);
  Eigen::Matrix2cd q = qr.householderQ();
  const Eigen::Matrix2cd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 2; ++i)
    q.col(i) *= r(i, i) / std::abs(r(i, i));  // fix the phase gauge
  return q;
}

inline Eigen::Matrix2cd random_subunitary(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Eigen::Matrix2cd a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = cplx(g(rng), g(rng));
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(
      a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector2d s = svd.singularValues();
  const double scale = u(rng) / std::max(s(0), 1e-12);
  return svd.matrixU() * (scale * s).asDiagonal() * svd.matrixV().adjoint();
}

}  // namespace braggio::oracle
