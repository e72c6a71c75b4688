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

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qas/statevector.hpp"

namespace qas {

/// The five block candidates, tagged 1-5 as in the proposer grammar.
enum class BlockKind : int {
  CzRx = 1,        // (a) RX layer, CZ chain
  CzRxRy = 2,      // (b) RX, RY layers, CZ chain
  CzRxRyRz = 3,    // (c) RX, RY, RZ layers, CZ chain
  CzOnly = 4,      // (d) CZ chain
  TwoLocal = 5,    // (e) configurable rotations and entanglement
};

inline constexpr int kNumBlockKinds = 5;

/// Throws InvalidBlockIndex for tags outside 1..5.
BlockKind block_kind_from_tag(int tag);
inline int tag_of(BlockKind kind) { return static_cast<int>(kind); }

enum class Entanglement { Full, Linear, ReverseLinear, Pairwise, Circular, SCA };

/// Lower-case names used on the wire: full, linear, reverse_linear, pairwise,
/// circular, sca.
std::string_view to_string(Entanglement e);
/// Case-insensitive; throws MalformedTwoLocalConfig on unknown names.
Entanglement entanglement_from_string(std::string_view name);

struct TwoLocalConfig {
  std::vector<GateKind> rotations;  // 1-3 distinct members of {RX, RY, RZ}, ordered
  Entanglement entanglement = Entanglement::Linear;

  friend bool operator==(const TwoLocalConfig&, const TwoLocalConfig&) = default;
};

/// Throws MalformedTwoLocalConfig when the rotation list is empty, too long,
/// repeats a gate or names a non-rotation.
void validate(const TwoLocalConfig& config);

struct AnsatzSpec {
  std::vector<BlockKind> blocks;
  std::map<std::size_t, TwoLocalConfig> twolocal;  // keyed by block position

  friend bool operator==(const AnsatzSpec&, const AnsatzSpec&) = default;
};

/// Every TwoLocal block needs a config and no other block may have one.
void validate(const AnsatzSpec& spec);

/// Rotation layers per qubit for a block: (1, 2, 3, 0, |rotations|).
std::size_t rotations_per_qubit(const AnsatzSpec& spec, std::size_t position);

using QubitPair = std::pair<int, int>;

/// Ordered (control, target) pairs for one entangling layer. `block_index`
/// only matters for SCA, whose pair list is the circular list rotated right
/// by block_index with roles swapped on odd blocks.
std::vector<QubitPair> entanglement_pairs(Entanglement strategy, int n_qubits,
                                          std::size_t block_index);

Circuit build_block(const AnsatzSpec& spec, std::size_t position, int n_qubits);
Circuit build_circuit(const AnsatzSpec& spec, int n_qubits);

/// Extracts the first `improved_ansatz_list = [...]` from free text, plus the
/// `twolocal_config = {...}` lines that follow it.
AnsatzSpec parse_proposal(std::string_view text);

/// Canonical reply text for a spec; parse_proposal(render_proposal(s)) == s.
std::string render_proposal(const AnsatzSpec& spec);

/// "[2,4,2,4]"
std::string format_block_list(const AnsatzSpec& spec);

}  // namespace qas
