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

#include "qas/statevector.hpp"

#include <algorithm>
#include <cmath>

#include "qas/error.hpp"

namespace qas {

namespace {

void check_qubit(int q, int n) {
  if (q < 0 || q >= n) {
    throw Error(ErrorCode::InvalidQubit,
                "qubit " + std::to_string(q) + " outside register of " + std::to_string(n));
  }
}

// Applies the 2x2 matrix [[m00, m01], [m10, m11]] to qubit q.
void apply_single(std::span<Complex> amps, int q, Complex m00, Complex m01, Complex m10,
                  Complex m11) {
  const std::size_t stride = std::size_t{1} << q;
  const std::size_t dim = amps.size();
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t k = base; k < base + stride; ++k) {
      const Complex a0 = amps[k];
      const Complex a1 = amps[k + stride];
      amps[k] = m00 * a0 + m01 * a1;
      amps[k + stride] = m10 * a0 + m11 * a1;
    }
  }
}

}  // namespace

StateVector::StateVector(int n_qubits, std::vector<Complex> amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw Error(ErrorCode::InvalidQubitCount, "n_qubits = " + std::to_string(n_qubits));
  }
  if (amplitudes_.size() != (std::size_t{1} << n_qubits)) {
    throw Error(ErrorCode::LengthMismatch, "amplitude count must be 2^n_qubits");
  }
}

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const Complex& a : amplitudes_) s += std::norm(a);
  return s;
}

StateVector zero_state(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw Error(ErrorCode::InvalidQubitCount, "n_qubits = " + std::to_string(n_qubits));
  }
  std::vector<Complex> amps(std::size_t{1} << n_qubits);
  amps[0] = 1.0;
  return StateVector(n_qubits, std::move(amps));
}

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "H";
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CZ: return "CZ";
  }
  return "?";
}

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw Error(ErrorCode::InvalidQubitCount, "n_qubits = " + std::to_string(n_qubits));
  }
}

void Circuit::append(const Gate& gate) {
  check_qubit(gate.qubits[0], n_qubits_);
  if (gate.arity() == 2) {
    check_qubit(gate.qubits[1], n_qubits_);
    if (gate.qubits[0] == gate.qubits[1]) {
      throw Error(ErrorCode::InvalidQubit, "two-qubit gate on a single qubit");
    }
  }
  if (gate.is_rotation() != gate.param_slot.has_value()) {
    throw Error(gate.is_rotation() ? ErrorCode::MissingParameter : ErrorCode::InvalidCircuit,
                to_string(gate.kind) + " parameter slot mismatch");
  }
  if (gate.param_slot) {
    const std::size_t slot = *gate.param_slot;
    if (slot >= slot_used_.size()) slot_used_.resize(slot + 1, false);
    if (slot_used_[slot]) {
      throw Error(ErrorCode::InvalidCircuit, "parameter slot " + std::to_string(slot) + " reused");
    }
    slot_used_[slot] = true;
    ++n_params_;
    max_slot_plus_one_ = std::max(max_slot_plus_one_, slot + 1);
  }
  gates_.push_back(gate);
}

void Circuit::add_rotation(GateKind kind, int qubit) {
  append(Gate::rotation(kind, qubit, max_slot_plus_one_));
}

Circuit concat(const Circuit& a, const Circuit& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw Error(ErrorCode::InvalidCircuit, "concatenating circuits of different widths");
  }
  Circuit out = a;
  const std::size_t offset = a.n_params();
  for (Gate g : b.gates()) {
    if (g.param_slot) *g.param_slot += offset;
    out.append(g);
  }
  return out;
}

void apply_gate_inplace(StateVector& state, const Gate& gate, std::span<const double> params) {
  const int n = state.n_qubits();
  check_qubit(gate.qubits[0], n);
  double theta = 0.0;
  if (gate.is_rotation()) {
    if (!gate.param_slot || *gate.param_slot >= params.size()) {
      throw Error(ErrorCode::MissingParameter, to_string(gate.kind) + " has no parameter value");
    }
    theta = params[*gate.param_slot];
  }
  auto amps = state.amplitudes();
  const int q = gate.qubits[0];
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const Complex i{0.0, 1.0};
  switch (gate.kind) {
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      apply_single(amps, q, r, r, r, -r);
      break;
    }
    case GateKind::RX:
      apply_single(amps, q, c, -i * s, -i * s, c);
      break;
    case GateKind::RY:
      apply_single(amps, q, c, -s, s, c);
      break;
    case GateKind::RZ:
      apply_single(amps, q, Complex{c, -s}, 0.0, 0.0, Complex{c, s});
      break;
    case GateKind::CZ: {
      const int p = gate.qubits[1];
      check_qubit(p, n);
      if (p == q) throw Error(ErrorCode::InvalidQubit, "CZ on a single qubit");
      const std::size_t mask = (std::size_t{1} << q) | (std::size_t{1} << p);
      for (std::size_t k = 0; k < amps.size(); ++k) {
        if ((k & mask) == mask) amps[k] = -amps[k];
      }
      break;
    }
  }
}

void apply_circuit_inplace(StateVector& state, const Circuit& circuit,
                           std::span<const double> params) {
  if (params.size() != circuit.n_params()) {
    throw Error(ErrorCode::ParamLengthMismatch,
                "expected " + std::to_string(circuit.n_params()) + " parameters, got " +
                    std::to_string(params.size()));
  }
  if (!circuit.slots_contiguous()) {
    throw Error(ErrorCode::InvalidCircuit, "parameter slots are not contiguous");
  }
  if (circuit.n_qubits() != state.n_qubits()) {
    throw Error(ErrorCode::InvalidQubitCount, "circuit and state widths differ");
  }
  for (const Gate& g : circuit.gates()) apply_gate_inplace(state, g, params);
}

StateVector apply_gate(StateVector state, const Gate& gate, std::span<const double> params) {
  apply_gate_inplace(state, gate, params);
  return state;
}

StateVector apply_circuit(StateVector state, const Circuit& circuit,
                          std::span<const double> params) {
  apply_circuit_inplace(state, circuit, params);
  return state;
}

std::vector<double> probabilities(const StateVector& state) {
  std::vector<double> p(state.size());
  std::transform(state.amplitudes().begin(), state.amplitudes().end(), p.begin(),
                 [](const Complex& a) { return std::norm(a); });
  return p;
}

std::size_t circuit_depth(const Circuit& circuit) {
  std::vector<std::size_t> level(static_cast<std::size_t>(circuit.n_qubits()), 0);
  std::size_t depth = 0;
  for (const Gate& g : circuit.gates()) {
    std::size_t layer = level[g.qubits[0]];
    if (g.arity() == 2) layer = std::max(layer, level[g.qubits[1]]);
    ++layer;
    level[g.qubits[0]] = layer;
    if (g.arity() == 2) level[g.qubits[1]] = layer;
    depth = std::max(depth, layer);
  }
  return depth;
}

}  // namespace qas
