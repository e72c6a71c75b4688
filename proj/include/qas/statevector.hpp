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

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qas {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 20;

/// Dense amplitudes over 2^n basis states. Bin k reads qubit 0 as its
/// least-significant bit.
class StateVector {
 public:
  StateVector(int n_qubits, std::vector<Complex> amplitudes);

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t size() const noexcept { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  std::span<Complex> amplitudes() noexcept { return amplitudes_; }
  const Complex& operator[](std::size_t k) const { return amplitudes_[k]; }

  double norm_squared() const;

 private:
  int n_qubits_;
  std::vector<Complex> amplitudes_;
};

StateVector zero_state(int n_qubits);

enum class GateKind { H, RX, RY, RZ, CZ };

std::string to_string(GateKind kind);

struct Gate {
  GateKind kind;
  std::array<int, 2> qubits{0, 0};
  std::optional<std::size_t> param_slot;

  static Gate h(int q) { return {GateKind::H, {q, q}, std::nullopt}; }
  static Gate rx(int q, std::size_t slot) { return {GateKind::RX, {q, q}, slot}; }
  static Gate ry(int q, std::size_t slot) { return {GateKind::RY, {q, q}, slot}; }
  static Gate rz(int q, std::size_t slot) { return {GateKind::RZ, {q, q}, slot}; }
  static Gate rotation(GateKind kind, int q, std::size_t slot) { return {kind, {q, q}, slot}; }
  static Gate cz(int a, int b) { return {GateKind::CZ, {a, b}, std::nullopt}; }

  bool is_rotation() const noexcept {
    return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ;
  }
  int arity() const noexcept { return kind == GateKind::CZ ? 2 : 1; }

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Ordered gate list on a fixed register. Every rotation owns exactly one
/// parameter slot and the slots used are {0, ..., n_params - 1}.
class Circuit {
 public:
  explicit Circuit(int n_qubits);

  /// Validates qubit indices and slot uniqueness; throws InvalidQubit,
  /// MissingParameter or InvalidCircuit.
  void append(const Gate& gate);

  /// Appends a rotation on the next free parameter slot.
  void add_rotation(GateKind kind, int qubit);
  void add_h(int qubit) { append(Gate::h(qubit)); }
  void add_cz(int a, int b) { append(Gate::cz(a, b)); }

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t n_params() const noexcept { return n_params_; }
  const std::vector<Gate>& gates() const noexcept { return gates_; }
  bool empty() const noexcept { return gates_.empty(); }

  /// True when the parameter slots form {0, ..., n_params - 1}.
  bool slots_contiguous() const noexcept { return max_slot_plus_one_ == n_params_; }

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  int n_qubits_;
  std::vector<Gate> gates_;
  std::vector<bool> slot_used_;
  std::size_t n_params_ = 0;
  std::size_t max_slot_plus_one_ = 0;
};

/// Gates of `b` follow those of `a`; `b`'s parameter slots are offset by
/// a.n_params().
Circuit concat(const Circuit& a, const Circuit& b);

/// In-place kernels. `params` must cover the gate's parameter slot.
void apply_gate_inplace(StateVector& state, const Gate& gate, std::span<const double> params);
void apply_circuit_inplace(StateVector& state, const Circuit& circuit,
                           std::span<const double> params);

StateVector apply_gate(StateVector state, const Gate& gate, std::span<const double> params);
StateVector apply_circuit(StateVector state, const Circuit& circuit,
                          std::span<const double> params);

/// Born-rule probabilities |alpha_k|^2.
std::vector<double> probabilities(const StateVector& state);

/// Greedy as-soon-as-possible layering: a gate lands one layer after the
/// latest gate touching any of its qubits.
std::size_t circuit_depth(const Circuit& circuit);

inline std::size_t circuit_param_count(const Circuit& circuit) { return circuit.n_params(); }

}  // namespace qas
