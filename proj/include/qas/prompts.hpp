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
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qas {

/// Editable prompt text. Placeholders are the literal `{...}` and `<...>`
/// tokens of the templates; only known names are replaced.
struct PromptTemplates {
  std::string task;
  std::string feedback;
  std::string discriminator_excerpt;
  std::string loss_excerpt;
  std::string training_excerpt;

  static PromptTemplates embedded();
  /// Reads `<dir>/<name>.txt` for each template, keeping the embedded text for
  /// files that are absent.
  static PromptTemplates from_directory(const std::filesystem::path& dir);
};

/// Metrics sent back to the proposer after one training run.
struct FeedbackRecord {
  int iteration = 0;
  std::vector<double> discriminator_loss_values;
  std::vector<double> generator_loss_values;
  std::vector<double> entropy_values;  // KL per epoch
  std::vector<double> ks_values;
  std::size_t ansatz_parameter_count = 0;
  std::size_t ansatz_depth = 0;

  friend bool operator==(const FeedbackRecord&, const FeedbackRecord&) = default;
};

/// Single pass over `text`; substituted values are not rescanned.
std::string substitute(std::string_view text, const std::map<std::string, std::string>& values);

/// "[0.693147, 0.5, 1e-05]" with 6 significant digits.
std::string format_series(std::span<const double> values);

/// Plain-text description of the five block candidates on `n_qubits`.
std::string describe_candidates(int n_qubits);

std::string render_task_prompt(int n_qubits, int default_blocks,
                               const PromptTemplates& templates = PromptTemplates::embedded());

std::string render_feedback_prompt(const FeedbackRecord& record,
                                   const PromptTemplates& templates = PromptTemplates::embedded());

/// Corrective message sent after a reply that failed to parse.
std::string render_retry_prompt(std::string_view parse_error);

namespace detail {
const std::map<std::string, std::string>& embedded_prompts();
}

}  // namespace qas
