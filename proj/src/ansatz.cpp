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

#include "qas/ansatz.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include <fmt/format.h>
#include <json.hpp>

#include "qas/error.hpp"

namespace qas {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string rotation_name(GateKind kind) { return lower(to_string(kind)); }

GateKind rotation_from_string(std::string_view name) {
  const std::string n = lower(name);
  if (n == "rx") return GateKind::RX;
  if (n == "ry") return GateKind::RY;
  if (n == "rz") return GateKind::RZ;
  throw Error(ErrorCode::MalformedTwoLocalConfig, "unknown rotation '" + std::string(name) + "'");
}

std::vector<QubitPair> linear_pairs(int n) {
  std::vector<QubitPair> pairs;
  for (int i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
  return pairs;
}

std::vector<QubitPair> circular_pairs(int n) {
  std::vector<QubitPair> pairs = linear_pairs(n);
  if (n > 2) pairs.insert(pairs.begin(), QubitPair{n - 1, 0});
  return pairs;
}

void add_rotation_layer(Circuit& c, GateKind kind) {
  for (int q = 0; q < c.n_qubits(); ++q) c.add_rotation(kind, q);
}

void add_entangling_layer(Circuit& c, const std::vector<QubitPair>& pairs) {
  for (const auto& [a, b] : pairs) c.add_cz(a, b);
}

TwoLocalConfig parse_config_object(const nlohmann::json& obj, std::size_t& block) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::MalformedTwoLocalConfig, "twolocal_config is not an object");
  }
  const auto b = obj.find("block");
  const auto rot = obj.find("rotations");
  const auto ent = obj.find("entanglement");
  if (b == obj.end() || !b->is_number_integer() || b->get<long long>() < 0) {
    throw Error(ErrorCode::MalformedTwoLocalConfig, "\"block\" must be a non-negative integer");
  }
  if (rot == obj.end() || !rot->is_array()) {
    throw Error(ErrorCode::MalformedTwoLocalConfig, "\"rotations\" must be a list");
  }
  if (ent == obj.end() || !ent->is_string()) {
    throw Error(ErrorCode::MalformedTwoLocalConfig, "\"entanglement\" must be a string");
  }
  block = b->get<std::size_t>();
  TwoLocalConfig config;
  for (const auto& r : *rot) {
    if (!r.is_string()) {
      throw Error(ErrorCode::MalformedTwoLocalConfig, "rotation names must be strings");
    }
    config.rotations.push_back(rotation_from_string(r.get<std::string>()));
  }
  config.entanglement = entanglement_from_string(ent->get<std::string>());
  validate(config);
  return config;
}

}  // namespace

BlockKind block_kind_from_tag(int tag) {
  if (tag < 1 || tag > kNumBlockKinds) {
    throw Error(ErrorCode::InvalidBlockIndex, "block tag " + std::to_string(tag) + " not in 1..5");
  }
  return static_cast<BlockKind>(tag);
}

std::string_view to_string(Entanglement e) {
  switch (e) {
    case Entanglement::Full: return "full";
    case Entanglement::Linear: return "linear";
    case Entanglement::ReverseLinear: return "reverse_linear";
    case Entanglement::Pairwise: return "pairwise";
    case Entanglement::Circular: return "circular";
    case Entanglement::SCA: return "sca";
  }
  return "?";
}

Entanglement entanglement_from_string(std::string_view name) {
  const std::string n = lower(name);
  for (Entanglement e : {Entanglement::Full, Entanglement::Linear, Entanglement::ReverseLinear,
                         Entanglement::Pairwise, Entanglement::Circular, Entanglement::SCA}) {
    if (n == to_string(e)) return e;
  }
  if (n == "reverse-linear" || n == "reverselinear") return Entanglement::ReverseLinear;
  throw Error(ErrorCode::MalformedTwoLocalConfig,
              "unknown entanglement strategy '" + std::string(name) + "'");
}

void validate(const TwoLocalConfig& config) {
  const auto& r = config.rotations;
  if (r.empty() || r.size() > 3) {
    throw Error(ErrorCode::MalformedTwoLocalConfig, "TwoLocal needs 1-3 rotation gates");
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] != GateKind::RX && r[i] != GateKind::RY && r[i] != GateKind::RZ) {
      throw Error(ErrorCode::MalformedTwoLocalConfig, "TwoLocal rotation must be RX, RY or RZ");
    }
    if (std::find(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(i), r[i]) !=
        r.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw Error(ErrorCode::MalformedTwoLocalConfig, "TwoLocal rotations repeat a gate");
    }
  }
}

void validate(const AnsatzSpec& spec) {
  if (spec.blocks.empty()) throw Error(ErrorCode::InvalidArgument, "ansatz has no blocks");
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    block_kind_from_tag(tag_of(spec.blocks[i]));
    const bool has_config = spec.twolocal.contains(i);
    if (spec.blocks[i] == BlockKind::TwoLocal) {
      if (!has_config) {
        throw Error(ErrorCode::MissingTwoLocalConfig,
                    "TwoLocal block " + std::to_string(i) + " has no configuration");
      }
      validate(spec.twolocal.at(i));
    } else if (has_config) {
      throw Error(ErrorCode::MalformedTwoLocalConfig,
                  "block " + std::to_string(i) + " is not TwoLocal but has a configuration");
    }
  }
  for (const auto& [pos, cfg] : spec.twolocal) {
    if (pos >= spec.blocks.size()) {
      throw Error(ErrorCode::MalformedTwoLocalConfig,
                  "configuration for missing block " + std::to_string(pos));
    }
  }
}

std::size_t rotations_per_qubit(const AnsatzSpec& spec, std::size_t position) {
  switch (spec.blocks.at(position)) {
    case BlockKind::CzRx: return 1;
    case BlockKind::CzRxRy: return 2;
    case BlockKind::CzRxRyRz: return 3;
    case BlockKind::CzOnly: return 0;
    case BlockKind::TwoLocal: {
      const auto it = spec.twolocal.find(position);
      if (it == spec.twolocal.end()) {
        throw Error(ErrorCode::MissingTwoLocalConfig,
                    "TwoLocal block " + std::to_string(position) + " has no configuration");
      }
      return it->second.rotations.size();
    }
  }
  throw Error(ErrorCode::InvalidBlockIndex, "unknown block kind");
}

std::vector<QubitPair> entanglement_pairs(Entanglement strategy, int n, std::size_t block_index) {
  if (n < 1) throw Error(ErrorCode::InvalidQubitCount, "n_qubits = " + std::to_string(n));
  std::vector<QubitPair> pairs;
  switch (strategy) {
    case Entanglement::Full:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
      break;
    case Entanglement::Linear:
      pairs = linear_pairs(n);
      break;
    case Entanglement::ReverseLinear:
      pairs = linear_pairs(n);
      std::reverse(pairs.begin(), pairs.end());
      break;
    case Entanglement::Pairwise:
      for (int i = 0; i + 1 < n; i += 2) pairs.emplace_back(i, i + 1);
      for (int i = 1; i + 1 < n; i += 2) pairs.emplace_back(i, i + 1);
      break;
    case Entanglement::Circular:
      pairs = circular_pairs(n);
      break;
    case Entanglement::SCA: {
      pairs = circular_pairs(n);
      if (pairs.empty()) break;
      const std::size_t shift = block_index % pairs.size();
      std::rotate(pairs.begin(), pairs.end() - static_cast<std::ptrdiff_t>(shift), pairs.end());
      if (block_index % 2 == 1) {
        for (auto& [c, t] : pairs) std::swap(c, t);
      }
      break;
    }
  }
  return pairs;
}

Circuit build_block(const AnsatzSpec& spec, std::size_t position, int n_qubits) {
  Circuit c(n_qubits);
  const auto chain = linear_pairs(n_qubits);
  switch (spec.blocks.at(position)) {
    case BlockKind::CzRx:
      add_rotation_layer(c, GateKind::RX);
      add_entangling_layer(c, chain);
      break;
    case BlockKind::CzRxRy:
      add_rotation_layer(c, GateKind::RX);
      add_rotation_layer(c, GateKind::RY);
      add_entangling_layer(c, chain);
      break;
    case BlockKind::CzRxRyRz:
      add_rotation_layer(c, GateKind::RX);
      add_rotation_layer(c, GateKind::RY);
      add_rotation_layer(c, GateKind::RZ);
      add_entangling_layer(c, chain);
      break;
    case BlockKind::CzOnly:
      add_entangling_layer(c, chain);
      break;
    case BlockKind::TwoLocal: {
      const auto it = spec.twolocal.find(position);
      if (it == spec.twolocal.end()) {
        throw Error(ErrorCode::MissingTwoLocalConfig,
                    "TwoLocal block " + std::to_string(position) + " has no configuration");
      }
      validate(it->second);
      for (GateKind r : it->second.rotations) add_rotation_layer(c, r);
      add_entangling_layer(c, entanglement_pairs(it->second.entanglement, n_qubits, position));
      break;
    }
    default:
      throw Error(ErrorCode::InvalidBlockIndex,
                  "block tag " + std::to_string(tag_of(spec.blocks[position])));
  }
  return c;
}

Circuit build_circuit(const AnsatzSpec& spec, int n_qubits) {
  validate(spec);
  Circuit circuit(n_qubits);
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    circuit = concat(circuit, build_block(spec, i, n_qubits));
  }
  return circuit;
}

AnsatzSpec parse_proposal(std::string_view text) {
  static const std::regex list_re(
      R"(improved_ansatz_list\s*=\s*\[\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*,?\s*\])");
  static const std::regex int_re(R"(-?\d+)");
  static const std::regex config_re(R"(twolocal_config\s*=\s*(\{[^\n]*\}))");

  const std::string body(text);
  std::smatch m;
  if (!std::regex_search(body, m, list_re)) {
    throw Error(ErrorCode::NoAnsatzList, "reply has no improved_ansatz_list = [...]");
  }

  AnsatzSpec spec;
  const std::string items = m[1].str();
  for (auto it = std::sregex_iterator(items.begin(), items.end(), int_re);
       it != std::sregex_iterator(); ++it) {
    const std::string token = it->str();
    if (token.size() > 3) {
      throw Error(ErrorCode::InvalidBlockIndex, "block tag " + token + " not in 1..5");
    }
    spec.blocks.push_back(block_kind_from_tag(std::stoi(token)));
  }

  const auto rest_begin = m[0].second;
  for (auto it = std::sregex_iterator(rest_begin, body.cend(), config_re);
       it != std::sregex_iterator(); ++it) {
    nlohmann::json obj = nlohmann::json::parse((*it)[1].str(), nullptr, false);
    if (obj.is_discarded()) {
      throw Error(ErrorCode::MalformedTwoLocalConfig, "twolocal_config is not valid JSON");
    }
    std::size_t block = 0;
    TwoLocalConfig config = parse_config_object(obj, block);
    if (block >= spec.blocks.size() || spec.blocks[block] != BlockKind::TwoLocal) {
      throw Error(ErrorCode::MalformedTwoLocalConfig,
                  "twolocal_config names block " + std::to_string(block) +
                      ", which is not a TwoLocal block");
    }
    spec.twolocal.emplace(block, std::move(config));  // first config per block wins
  }

  validate(spec);
  return spec;
}

std::string format_block_list(const AnsatzSpec& spec) {
  std::vector<int> tags;
  for (BlockKind b : spec.blocks) tags.push_back(tag_of(b));
  return fmt::format("[{}]", fmt::join(tags, ","));
}

std::string render_proposal(const AnsatzSpec& spec) {
  validate(spec);
  std::string out = "```\nimproved_ansatz_list = " + format_block_list(spec) + "\n";
  for (const auto& [pos, cfg] : spec.twolocal) {
    std::vector<std::string> rotations;
    for (GateKind r : cfg.rotations) rotations.push_back("\"" + rotation_name(r) + "\"");
    out += fmt::format(
        "twolocal_config = {{\"block\": {}, \"rotations\": [{}], \"entanglement\": \"{}\"}}\n",
        pos, fmt::join(rotations, ", "), to_string(cfg.entanglement));
  }
  out += "```\n";
  return out;
}

}  // namespace qas
