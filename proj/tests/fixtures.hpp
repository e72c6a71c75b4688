// Copyright 2026 The qas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded random inputs shared by the unit tests and the acceptance run.

#pragma once

#include <algorithm>
#include <numbers>
#include <random>
#include <vector>

#include "qas/ansatz.hpp"
#include "qas/statevector.hpp"

namespace qas::fixture {

/// 1..max_blocks blocks of any kind; TwoLocal blocks get a random non-empty
/// rotation subset and entanglement strategy.
inline AnsatzSpec random_spec(std::mt19937_64& rng, std::size_t max_blocks) {
  static const std::vector<Entanglement> ents = {Entanglement::Full,     Entanglement::Linear,
                                                 Entanglement::ReverseLinear, Entanglement::Pairwise,
                                                 Entanglement::Circular, Entanglement::SCA};
  AnsatzSpec s;
  const std::size_t blocks = 1 + rng() % max_blocks;
  for (std::size_t i = 0; i < blocks; ++i) {
    const int tag = 1 + static_cast<int>(rng() % 5);
    s.blocks.push_back(block_kind_from_tag(tag));
    if (tag == 5) {
      std::vector<GateKind> rot = {GateKind::RX, GateKind::RY, GateKind::RZ};
      std::shuffle(rot.begin(), rot.end(), rng);
      rot.resize(1 + rng() % 3);
      s.twolocal[i] = TwoLocalConfig{rot, ents[rng() % ents.size()]};
    }
  }
  return s;
}

/// Angles uniform in [-pi, pi).
inline std::vector<double> random_theta(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  std::vector<double> t(n);
  for (double& x : t) x = u(rng);
  return t;
}

/// `gates` gates drawn uniformly from H, RX, RY, RZ and (for n > 1) CZ.
inline Circuit random_circuit(std::mt19937_64& rng, int n, int gates) {
  Circuit c(n);
  std::uniform_int_distribution<int> kind(0, n > 1 ? 4 : 3);
  std::uniform_int_distribution<int> qubit(0, n - 1);
  for (int i = 0; i < gates; ++i) {
    switch (kind(rng)) {
      case 0: c.add_h(qubit(rng)); break;
      case 1: c.add_rotation(GateKind::RX, qubit(rng)); break;
      case 2: c.add_rotation(GateKind::RY, qubit(rng)); break;
      case 3: c.add_rotation(GateKind::RZ, qubit(rng)); break;
      default: {
        const int a = qubit(rng);
        int b = qubit(rng);
        while (b == a) b = qubit(rng);
        c.add_cz(a, b);
      }
    }
  }
  return c;
}

}  // namespace qas::fixture
