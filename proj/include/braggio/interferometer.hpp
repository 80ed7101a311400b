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
#include <complex>
#include <utility>
#include <variant>
#include <vector>

#include "braggio/errors.hpp"

namespace braggio {

using cplx = std::complex<double>;

// Relative phase gained between the arms, split symmetrically:
// G(phi) = diag(e^{-i phi/2}, e^{+i phi/2}).
inline Eigen::Matrix2cd phase_element(double phi) {
  Eigen::Matrix2cd g = Eigen::Matrix2cd::Zero();
  g(0, 0) = std::polar(1.0, -0.5 * phi);
  g(1, 1) = std::polar(1.0, 0.5 * phi);
  return g;
}

inline Eigen::Matrix2cd phase_element_dphi(double phi) {
  Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
  d(0, 0) = cplx(0.0, -0.5) * std::polar(1.0, -0.5 * phi);
  d(1, 1) = cplx(0.0, 0.5) * std::polar(1.0, 0.5 * phi);
  return d;
}

// Marker for the single phase-bearing element of a sequence.
struct PhaseTag {};

// Pulse sequence in chronological order: elements[0] acts first.  The
// composed transfer matrix is therefore the reversed matrix product.
struct PulseSequence {
  using Element = std::variant<Eigen::Matrix2cd, PhaseTag>;
  std::vector<Element> elements;
};

// Five-element Mach-Zehnder: auxiliary mirror, splitter, mirror, phase,
// splitter.  Product form Z = Z_BS G(phi) Z_M Z_BS Z_M.
inline PulseSequence mzi_sequence(const Eigen::Matrix2cd& bs,
                                  const Eigen::Matrix2cd& mirror) {
  PulseSequence s;
  s.elements = {mirror, bs, mirror, PhaseTag{}, bs};
  return s;
}

// Reduced three-pulse variant (no auxiliary mirror) for closed-form checks.
inline PulseSequence mzi_three_pulse(const Eigen::Matrix2cd& bs,
                                     const Eigen::Matrix2cd& mirror) {
  PulseSequence s;
  s.elements = {bs, mirror, PhaseTag{}, bs};
  return s;
}

inline Eigen::Matrix2cd compose(const PulseSequence& seq, double phi) {
  Eigen::Matrix2cd z = Eigen::Matrix2cd::Identity();
  for (const auto& e : seq.elements) {
    if (std::holds_alternative<PhaseTag>(e))
      z = phase_element(phi) * z;
    else
      z = std::get<Eigen::Matrix2cd>(e) * z;
  }
  return z;
}

// Analytic dZ/dphi via the product rule; only G(phi) carries phase, so the
// derivative is (suffix product) * dG * (prefix product).
inline Eigen::Matrix2cd compose_dphi(const PulseSequence& seq, double phi) {
  int n_phase = 0;
  for (const auto& e : seq.elements)
    if (std::holds_alternative<PhaseTag>(e)) ++n_phase;
  if (n_phase > 1)
    throw MultiplePhaseElements(
        "analytic phase derivative requires a single phase element");
  if (n_phase == 0) return Eigen::Matrix2cd::Zero();

  Eigen::Matrix2cd pre = Eigen::Matrix2cd::Identity();
  std::size_t i = 0;
  while (!std::holds_alternative<PhaseTag>(seq.elements[i])) {
    pre = std::get<Eigen::Matrix2cd>(seq.elements[i]) * pre;
    ++i;
  }
  Eigen::Matrix2cd post = Eigen::Matrix2cd::Identity();
  for (std::size_t j = i + 1; j < seq.elements.size(); ++j)
    post = std::get<Eigen::Matrix2cd>(seq.elements[j]) * post;
  return post * phase_element_dphi(phi) * pre;
}

// Lossless reference blocks: quarter- and half-cycle two-level rotations.
inline Eigen::Matrix2cd ideal_beam_splitter() {
  Eigen::Matrix2cd bs;
  const double r = 1.0 / std::sqrt(2.0);
  bs << cplx(r, 0), cplx(0, -r), cplx(0, -r), cplx(r, 0);
  return bs;
}

inline Eigen::Matrix2cd ideal_mirror() {
  Eigen::Matrix2cd m;
  m << cplx(0, 0), cplx(0, -1), cplx(0, -1), cplx(0, 0);
  return m;
}

}  // namespace braggio
