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
// Interferometer models exposed as two-port transfer functions of (q, phi):
// the Bragg Mach-Zehnder built from calibrated pulses, the ideal lossless
// device, and a uniform-transmission stand-in for loss studies.

#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "braggio/bragg.hpp"
#include "braggio/calibrate.hpp"
#include "braggio/interferometer.hpp"
#include "braggio/ladder.hpp"
#include "braggio/ode.hpp"
#include "braggio/spin_io.hpp"

namespace braggio {

// Stripped two-port pulse blocks keyed by everything that determines them.
// Blocks obey Z(-q) = X Z(q) X, so only q >= 0 is ever solved for.
class BlockCache {
 public:
  Eigen::Matrix2cd block(const GaussianPulse& pulse, double q,
                         const MomentumLadder& ladder,
                         const OdeOptions& opts) {
    if (q < 0.0) {
      Eigen::Matrix2cd x;
      x << 0, 1, 1, 0;
      return x * block(pulse, -q, ladder, opts) * x;
    }
    const Key key{pulse.omega0, pulse.tau, pulse.window_factor,
                  q,            opts.rel_tol, ladder.m_max()};
    {
      const std::lock_guard<std::mutex> lock(mu_);
      const auto it = map_.find(key);
      if (it != map_.end()) return it->second;
    }
    const Eigen::Matrix2cd z = extract_two_port(
        strip_free_evolution(propagate_pulse(pulse, q, ladder, opts)));
    const std::lock_guard<std::mutex> lock(mu_);
    return map_.emplace(key, z).first->second;
  }

  std::size_t size() const {
    const std::lock_guard<std::mutex> lock(mu_);
    return map_.size();
  }

 private:
  using Key = std::tuple<double, double, double, double, double, int>;
  mutable std::mutex mu_;
  std::map<Key, Eigen::Matrix2cd> map_;
};

// Five-element Mach-Zehnder from calibrated Bragg pulses.  Copies share the
// block cache, so sweeps over phase, twist, and grid points re-use each
// (pulse, q) solve.
struct BraggMzi {
  GaussianPulse beam_splitter;
  GaussianPulse mirror;
  MomentumLadder ladder{};
  OdeOptions opts{};
  std::shared_ptr<BlockCache> cache = std::make_shared<BlockCache>();

  TwoPortTransfer transfer(double q, double phi) const {
    const Eigen::Matrix2cd zbs = cache->block(beam_splitter, q, ladder, opts);
    const Eigen::Matrix2cd zm = cache->block(mirror, q, ladder, opts);
    const PulseSequence seq = mzi_sequence(zbs, zm);
    return {compose(seq, phi), compose_dphi(seq, phi)};
  }

  TransferFn fn() const {
    return [m = *this](double q, double phi) { return m.transfer(q, phi); };
  }
};

inline BraggMzi make_bragg_mzi(const BeamSplitterCalibration& bs,
                               const MirrorCalibration& mirror,
                               const MomentumLadder& ladder = MomentumLadder(),
                               const OdeOptions& opts = {}) {
  return BraggMzi{bs.pulse, mirror.pulse, ladder, opts};
}

inline TransferFn ideal_mzi_fn() {
  return [](double, double phi) {
    const PulseSequence seq =
        mzi_sequence(ideal_beam_splitter(), ideal_mirror());
    return TwoPortTransfer{compose(seq, phi), compose_dphi(seq, phi)};
  };
}

// Ideal geometry with every atom surviving with probability eta, port- and
// q-independent: Z = sqrt(eta) Z_ideal.
inline TransferFn uniform_loss_mzi_fn(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw InvalidArgument("transmission must lie in [0, 1]");
  const double s = std::sqrt(eta);
  return [s](double, double phi) {
    const PulseSequence seq =
        mzi_sequence(ideal_beam_splitter(), ideal_mirror());
    return TwoPortTransfer{s * compose(seq, phi), s * compose_dphi(seq, phi)};
  };
}

}  // namespace braggio
