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

#include "qas/proposer.hpp"

#include <algorithm>
#include <optional>
#include <regex>

#include "qas/error.hpp"
#include "qas/random.hpp"

namespace qas {

namespace {

struct Attempt {
  AnsatzSpec spec;
  double final_kl = 0.0;
  std::size_t params = 0;
};

std::optional<int> find_int(const std::string& text, const std::regex& re) {
  std::smatch m;
  if (!std::regex_search(text, m, re)) return std::nullopt;
  return std::stoi(m[1].str());
}

std::optional<double> last_entropy_value(const std::string& text) {
  static const std::regex series_re(R"((?:^|\n)entropy_values: \[([^\]]*)\])");
  std::smatch m;
  if (!std::regex_search(text, m, series_re)) return std::nullopt;
  const std::string items = m[1].str();
  const auto comma = items.rfind(',');
  const std::string last = comma == std::string::npos ? items : items.substr(comma + 1);
  try {
    return std::stod(last);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

TwoLocalConfig random_twolocal(Rng& rng) {
  std::vector<GateKind> pool{GateKind::RX, GateKind::RY, GateKind::RZ};
  rng.shuffle(std::span<GateKind>(pool));
  TwoLocalConfig cfg;
  cfg.rotations.assign(pool.begin(), pool.begin() + 1 + static_cast<std::ptrdiff_t>(rng.below(3)));
  constexpr Entanglement kinds[] = {Entanglement::Full,     Entanglement::Linear,
                                    Entanglement::ReverseLinear, Entanglement::Pairwise,
                                    Entanglement::Circular, Entanglement::SCA};
  cfg.entanglement = kinds[rng.below(6)];
  return cfg;
}

AnsatzSpec mutate(AnsatzSpec spec, Rng& rng) {
  const std::size_t pos = rng.below(spec.blocks.size());
  const int current = tag_of(spec.blocks[pos]);
  int tag = 1 + static_cast<int>(rng.below(kNumBlockKinds - 1));
  if (tag >= current) ++tag;
  spec.blocks[pos] = block_kind_from_tag(tag);
  spec.twolocal.erase(pos);
  if (spec.blocks[pos] == BlockKind::TwoLocal) spec.twolocal[pos] = random_twolocal(rng);
  return spec;
}

}  // namespace

std::string HeuristicProposer::propose(const Conversation& conversation) {
  if (conversation.empty()) throw Error(ErrorCode::InvalidArgument, "empty conversation");

  static const std::regex qubits_re(R"(Number of qubits: (\d+))");
  static const std::regex blocks_re(R"(Default number of circuit blocks: (\d+))");
  static const std::regex params_re(R"((?:^|\n)ansatz parameter: (\d+))");
  const std::string& task = conversation.front().content;
  const int n_qubits = find_int(task, qubits_re).value_or(3);
  const int blocks = std::max(1, find_int(task, blocks_re).value_or(4));

  // Pair each parsed reply with the feedback that follows it.
  std::vector<Attempt> history;
  std::optional<AnsatzSpec> pending;
  std::uint64_t h = seed_;
  for (const Message& m : conversation) {
    h = hash_text(m.role, hash_text(m.content, h));
    if (m.role == "assistant") {
      try {
        pending = parse_proposal(m.content);
      } catch (const Error&) {
      }
      continue;
    }
    const auto kl = last_entropy_value(m.content);
    const auto params = find_int(m.content, params_re);
    if (pending && kl && params) {
      history.push_back({*pending, *kl, static_cast<std::size_t>(*params)});
      pending.reset();
    }
  }
  Rng rng(mix_seed(seed_, h));

  AnsatzSpec next;
  if (history.empty()) {
    for (int i = 0; i < blocks; ++i) {
      next.blocks.push_back(i % 2 == 0 ? BlockKind::CzRxRy : BlockKind::CzOnly);
    }
  } else {
    const Attempt& last = history.back();
    const bool improved = history.size() < 2 || last.final_kl < history[history.size() - 2].final_kl;
    const std::size_t budget = param_budget_ > 0
                                   ? param_budget_
                                   : static_cast<std::size_t>(n_qubits) * static_cast<std::size_t>(blocks);
    if (!improved) {
      const auto best = std::min_element(history.begin(), history.end(), [](const Attempt& a, const Attempt& b) {
        return a.final_kl != b.final_kl ? a.final_kl < b.final_kl : a.params < b.params;
      });
      next = mutate(best->spec, rng);
    } else if (last.params > budget) {
      next = last.spec;
      std::size_t heaviest = 0;
      for (std::size_t i = 1; i < next.blocks.size(); ++i) {
        if (rotations_per_qubit(next, i) > rotations_per_qubit(next, heaviest)) heaviest = i;
      }
      next.blocks[heaviest] = BlockKind::CzOnly;
      next.twolocal.erase(heaviest);
    } else {
      next = last.spec;
    }
  }
  return "Based on the tracked values, the next ansatz to train is:\n\n" + render_proposal(next);
}

}  // namespace qas
