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

#include <vector>

#include "braggio/errors.hpp"

namespace braggio {

// Truncated basis of plane-wave momentum states m*hbar*k with m odd,
// coupled in steps of 2 by two-photon transitions.  Units throughout:
// hbar = 1, photon momentum hbar*k = 1, recoil frequency omega_r = 1.
class MomentumLadder {
 public:
  explicit MomentumLadder(int m_max = 11) : m_max_(m_max) {
    if (m_max < 3 || m_max % 2 == 0)
      throw InvalidArgument("ladder bound must be odd and >= 3");
  }

  int m_max() const { return m_max_; }
  int size() const { return m_max_ + 1; }

  // Momentum label of basis state i, ascending: -m_max, -m_max+2, ..., m_max.
  int momentum(int i) const { return -m_max_ + 2 * i; }

  int index_of(int m) const {
    if (m % 2 == 0 || m < -m_max_ || m > m_max_)
      throw InvalidArgument("momentum label outside ladder");
    return (m + m_max_) / 2;
  }

  std::vector<int> momenta() const {
    std::vector<int> out(size());
    for (int i = 0; i < size(); ++i) out[i] = momentum(i);
    return out;
  }

  bool operator==(const MomentumLadder& o) const { return m_max_ == o.m_max_; }

 private:
  int m_max_;
};

}  // namespace braggio
