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

#include "qas/prompts.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "qas/ansatz.hpp"
#include "qas/error.hpp"

namespace qas {

namespace {

std::string read_or(const std::filesystem::path& path, const std::string& fallback) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return fallback;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string pairs_text(const std::vector<QubitPair>& pairs) {
  std::vector<std::string> parts;
  for (const auto& [a, b] : pairs) parts.push_back(fmt::format("({},{})", a, b));
  return parts.empty() ? std::string("(none)") : fmt::format("{}", fmt::join(parts, ", "));
}

std::string remove_trailing_newline(std::string s) {
  while (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

}  // namespace

PromptTemplates PromptTemplates::embedded() {
  const auto& p = detail::embedded_prompts();
  return {p.at("task_prompt"), p.at("feedback_prompt"), p.at("discriminator_excerpt"),
          p.at("loss_excerpt"), p.at("training_excerpt")};
}

PromptTemplates PromptTemplates::from_directory(const std::filesystem::path& dir) {
  PromptTemplates t = embedded();
  t.task = read_or(dir / "task_prompt.txt", t.task);
  t.feedback = read_or(dir / "feedback_prompt.txt", t.feedback);
  t.discriminator_excerpt = read_or(dir / "discriminator_excerpt.txt", t.discriminator_excerpt);
  t.loss_excerpt = read_or(dir / "loss_excerpt.txt", t.loss_excerpt);
  t.training_excerpt = read_or(dir / "training_excerpt.txt", t.training_excerpt);
  return t;
}

std::string substitute(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const char open = text[i];
    if (open == '{' || open == '<') {
      const char close = open == '{' ? '}' : '>';
      const std::size_t end = text.find(close, i + 1);
      if (end != std::string_view::npos) {
        const auto it = values.find(std::string(text.substr(i, end - i + 1)));
        if (it != values.end()) {
          out += it->second;
          i = end + 1;
          continue;
        }
      }
    }
    out += open;
    ++i;
  }
  return out;
}

std::string format_series(std::span<const double> values) {
  std::vector<std::string> parts;
  parts.reserve(values.size());
  for (double v : values) parts.push_back(fmt::format("{:.6g}", v));
  return fmt::format("[{}]", fmt::join(parts, ", "));
}

std::string describe_candidates(int n_qubits) {
  auto metrics = [&](int tag) {
    AnsatzSpec spec{{block_kind_from_tag(tag)}, {}};
    const Circuit c = build_block(spec, 0, n_qubits);
    return fmt::format("{} parameters, depth {}", c.n_params(), circuit_depth(c));
  };
  const std::string chain = pairs_text(entanglement_pairs(Entanglement::Linear, n_qubits, 0));
  std::string out;
  out += fmt::format(
      "1: CZ and RX. An RX rotation on every qubit, then CZ gates on the neighbouring\n"
      "   pairs {}. ({})\n",
      chain, metrics(1));
  out += fmt::format(
      "2: CZ and (RX, RY). An RX layer and an RY layer on every qubit, then the same\n"
      "   CZ chain. ({})\n",
      metrics(2));
  out += fmt::format(
      "3: CZ and (RX, RY, RZ). RX, RY and RZ layers on every qubit, then the same\n"
      "   CZ chain. ({})\n",
      metrics(3));
  out += fmt::format("4: CZ only. The CZ chain alone. ({})\n", metrics(4));
  out +=
      "5: TwoLocal. One layer for each chosen rotation gate (a non-empty subset of RX, RY\n"
      "   and RZ) on every qubit, then CZ gates on the pairs chosen by the entanglement\n"
      "   strategy: full, linear, reverse_linear, pairwise, circular or sca. In sca the\n"
      "   circular pair list shifts by one position per block and control and target\n"
      "   swap on odd blocks. Each TwoLocal block needs a twolocal_config line.";
  return out;
}

std::string render_task_prompt(int n_qubits, int default_blocks, const PromptTemplates& t) {
  const std::map<std::string, std::string> values = {
      {"<Number of qubits>", std::to_string(n_qubits)},
      {"<Circuit block>", std::to_string(default_blocks)},
      {"<Number of ansatz candidates>", std::to_string(kNumBlockKinds)},
      {"{Discriminator code HERE}", remove_trailing_newline(t.discriminator_excerpt)},
      {"{Definition of the loss function and its code HERE}", remove_trailing_newline(t.loss_excerpt)},
      {"{Model Training code HERE}", remove_trailing_newline(t.training_excerpt)},
      {"{Description of the ansatz candidates and code HERE}", describe_candidates(n_qubits)},
  };
  return substitute(t.task, values);
}

std::string render_feedback_prompt(const FeedbackRecord& r, const PromptTemplates& t) {
  const std::map<std::string, std::string> values = {
      {"{discriminator loss values}", format_series(r.discriminator_loss_values)},
      {"{generator loss values}", format_series(r.generator_loss_values)},
      {"{entropy values}", format_series(r.entropy_values)},
      {"{circuit parameter counts}", std::to_string(r.ansatz_parameter_count)},
      {"{circuit depth}", std::to_string(r.ansatz_depth)},
  };
  return substitute(t.feedback, values);
}

std::string render_retry_prompt(std::string_view parse_error) {
  return fmt::format(
      "Your previous reply could not be used: {}\n\n"
      "Please output the values like this:\n\n"
      "```\nimproved_ansatz_list = [4,1,5,1]\n```\n\n"
      "and add one twolocal_config line for every block that uses operation 5.\n",
      parse_error);
}

}  // namespace qas
