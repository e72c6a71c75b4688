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

// Command-line front end: run a campaign, report on a log directory, or
// resume an interrupted campaign.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qas/campaign.hpp"
#include "qas/campaign_io.hpp"
#include "qas/error.hpp"

namespace {

namespace fs = std::filesystem;

qas::CampaignHooks persisting_hooks(const fs::path& dir) {
  qas::CampaignHooks hooks;
  hooks.on_iteration = [dir](const qas::CampaignLog& log) {
    const auto& rec = log.iterations.back();
    const std::string file = qas::persist_iteration(dir, rec);
    fmt::print(stderr, "iteration {:>3}  {:<24}  kl {:.6g}  params {}  depth {}  [{}]\n", rec.iteration,
               qas::format_block_list(rec.spec), rec.final_kl(), rec.feedback.ansatz_parameter_count,
               rec.feedback.ansatz_depth, file);
  };
  return hooks;
}

int finish(const fs::path& dir, const qas::CampaignLog& log) {
  qas::persist_stop_reason(dir, log.stop_reason);
  fmt::print(stderr, "stopped: {}\n", log.stop_reason);
  fmt::print("{}", qas::render_report(qas::build_report(log), qas::ReportFormat::Table));
  return 0;
}

int run(const std::string& config_path, const std::optional<std::string>& proposer,
        const std::optional<std::uint64_t>& seed, const fs::path& dir) {
  qas::CampaignConfig cfg = qas::load_config(config_path);
  if (proposer) cfg.proposer = *proposer == "llm" ? qas::ProposerKind::Llm : qas::ProposerKind::Heuristic;
  if (seed) cfg.seed = *seed;
  qas::validate(cfg);
  auto prop = qas::make_proposer(cfg);
  qas::init_log_dir(dir, cfg);
  return finish(dir, qas::run_campaign(cfg, *prop, {}, persisting_hooks(dir)));
}

int resume(const fs::path& dir) {
  qas::CampaignLog log = qas::load_log(dir);
  if (!log.stop_reason.empty()) {
    fmt::print(stderr, "campaign already finished ({})\n", log.stop_reason);
    return 0;
  }
  const qas::CampaignConfig cfg = log.config;
  auto prop = qas::make_proposer(cfg);
  return finish(dir, qas::run_campaign(cfg, *prop, std::move(log), persisting_hooks(dir)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LLM-guided ansatz search for quantum GAN generators"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> proposer;
  std::optional<std::uint64_t> seed;
  std::string run_dir = "qas_run";
  auto* run_cmd = app.add_subcommand("run", "Run a new campaign");
  run_cmd->add_option("--config", config_path, "Config file (key = value lines)")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--proposer", proposer, "Ansatz proposer")
      ->check(CLI::IsMember({"heuristic", "llm"}));
  run_cmd->add_option("--seed", seed, "Master seed, overriding the config");
  run_cmd->add_option("--log-dir", run_dir, "Directory for the campaign log")->capture_default_str();

  std::string report_dir;
  std::string format = "table";
  auto* report_cmd = app.add_subcommand("report", "Summarize a campaign log");
  report_cmd->add_option("--log-dir", report_dir, "Campaign log directory")->required();
  report_cmd->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"table", "csv"}))
      ->capture_default_str();

  std::string resume_dir;
  auto* resume_cmd = app.add_subcommand("resume", "Continue an interrupted campaign");
  resume_cmd->add_option("--log-dir", resume_dir, "Campaign log directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(config_path, proposer, seed, run_dir);
    if (*report_cmd) {
      const auto fmt_kind = format == "csv" ? qas::ReportFormat::Csv : qas::ReportFormat::Table;
      fmt::print("{}", qas::emit_report(report_dir, fmt_kind));
      return 0;
    }
    if (*resume_cmd) return resume(resume_dir);
  } catch (const qas::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 1;
}
