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

#include "qas/campaign_io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "qas/error.hpp"

namespace qas {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- config text -----------------------------------------------------------

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void invalid(const std::string& field, const std::string& reason) {
  throw Error(ErrorCode::ConfigInvalid, field + ": " + reason);
}

template <typename T>
T parse_number(const std::string& field, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  if constexpr (std::is_floating_point_v<T>) {
    try {
      std::size_t used = 0;
      out = static_cast<T>(std::stod(value, &used));
      if (used != value.size()) invalid(field, "not a number: '" + value + "'");
    } catch (const std::logic_error&) {
      invalid(field, "not a number: '" + value + "'");
    }
  } else {
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) invalid(field, "not an integer: '" + value + "'");
  }
  return out;
}

std::vector<int> parse_widths(const std::string& field, const std::string& value) {
  std::vector<int> widths;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) widths.push_back(parse_number<int>(field, trim(item)));
  if (widths.empty()) invalid(field, "needs at least one width");
  for (int w : widths) {
    if (w < 1) invalid(field, "widths must be positive");
  }
  return widths;
}

struct ConfigKey {
  const char* name;
  std::function<std::string(const CampaignConfig&)> get;
  std::function<void(CampaignConfig&, const std::string&)> set;
};

std::string num(double v) { return fmt::format("{}", v); }

std::vector<int> hidden_widths(const CampaignConfig& c) {
  const auto& w = c.train.discriminator.widths;
  return {w.begin() + 1, w.end() - 1};
}

const std::vector<ConfigKey>& config_keys() {
  using C = CampaignConfig;
  using S = const std::string&;
#define QAS_INT_KEY(key, member)                                                  \
  ConfigKey{key, [](const C& c) { return std::to_string(c.member); },            \
            [](C& c, S v) { c.member = parse_number<decltype(c.member)>(key, v); }}
#define QAS_REAL_KEY(key, member)                                                 \
  ConfigKey{key, [](const C& c) { return num(c.member); },                       \
            [](C& c, S v) { c.member = parse_number<double>(key, v); }}
#define QAS_TEXT_KEY(key, member) \
  ConfigKey{key, [](const C& c) { return c.member; }, [](C& c, S v) { c.member = v; }}
  static const std::vector<ConfigKey> keys = {
      QAS_INT_KEY("n_qubits", n_qubits),
      QAS_INT_KEY("blocks", blocks),
      QAS_INT_KEY("max_iterations", max_iterations),
      ConfigKey{"target", [](const C& c) { return to_string(c.target); },
                [](C& c, S v) {
                  try {
                    c.target = parse_target_family(v);
                  } catch (const Error& e) {
                    invalid("target", e.what());
                  }
                }},
      QAS_INT_KEY("epochs", train.epochs),
      QAS_INT_KEY("batch_size", train.batch_size),
      QAS_INT_KEY("dataset_size", train.dataset_size),
      QAS_REAL_KEY("gen_lr", train.gen_lr),
      QAS_REAL_KEY("disc_lr", train.disc_lr),
      QAS_REAL_KEY("amsgrad_beta1", train.amsgrad.beta1),
      QAS_REAL_KEY("amsgrad_beta2", train.amsgrad.beta2),
      QAS_REAL_KEY("amsgrad_epsilon", train.amsgrad.epsilon),
      QAS_INT_KEY("repeats", train.repeats),
      QAS_INT_KEY("disc_steps_per_batch", train.disc_steps_per_batch),
      QAS_INT_KEY("gen_steps_per_batch", train.gen_steps_per_batch),
      QAS_REAL_KEY("theta_init_range", train.theta_init_range),
      ConfigKey{"disc_hidden_widths",
                [](const C& c) { return fmt::format("{}", fmt::join(hidden_widths(c), ",")); },
                [](C& c, S v) {
                  auto w = parse_widths("disc_hidden_widths", v);
                  w.insert(w.begin(), 1);
                  w.push_back(1);
                  c.train.discriminator.widths = std::move(w);
                }},
      QAS_REAL_KEY("disc_dropout", train.discriminator.dropout),
      QAS_REAL_KEY("disc_leaky_slope", train.discriminator.leaky_slope),
      QAS_REAL_KEY("disc_bn_momentum", train.discriminator.bn_momentum),
      QAS_REAL_KEY("disc_bn_eps", train.discriminator.bn_eps),
      QAS_INT_KEY("threads", train.threads),
      QAS_INT_KEY("seed", seed),
      ConfigKey{"proposer",
                [](const C& c) { return std::string(c.proposer == ProposerKind::Llm ? "llm" : "heuristic"); },
                [](C& c, S v) {
                  if (v == "heuristic") c.proposer = ProposerKind::Heuristic;
                  else if (v == "llm") c.proposer = ProposerKind::Llm;
                  else invalid("proposer", "expected heuristic or llm");
                }},
      QAS_TEXT_KEY("llm_endpoint", llm.endpoint),
      QAS_TEXT_KEY("llm_model", llm.model),
      QAS_TEXT_KEY("llm_api_key_env", llm_api_key_env),
      QAS_REAL_KEY("llm_timeout_seconds", llm.timeout_seconds),
      QAS_INT_KEY("llm_retries", llm.retries),
      QAS_REAL_KEY("llm_backoff_seconds", llm.backoff_seconds),
      ConfigKey{"conversation",
                [](const C& c) {
                  return std::string(c.conversation == ConversationMode::Full ? "full" : "stateless");
                },
                [](C& c, S v) {
                  if (v == "full") c.conversation = ConversationMode::Full;
                  else if (v == "stateless") c.conversation = ConversationMode::Stateless;
                  else invalid("conversation", "expected full or stateless");
                }},
      QAS_INT_KEY("plateau_window", plateau_window),
      QAS_REAL_KEY("plateau_tolerance", plateau_tolerance),
      QAS_INT_KEY("param_budget", param_budget),
      QAS_TEXT_KEY("prompt_dir", prompt_dir),
  };
#undef QAS_INT_KEY
#undef QAS_REAL_KEY
#undef QAS_TEXT_KEY
  return keys;
}

// ---- files -----------------------------------------------------------------

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::PersistError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::PersistError, path.string() + " is not valid JSON");
  return j;
}

void write_atomic(const fs::path& path, const std::string& text,
                  const std::function<void()>& before_rename = {}) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::PersistError, "cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) {
      throw Error(ErrorCode::PersistError,
                  "short write to " + tmp.string() + "; " + path.filename().string() + " unchanged");
    }
  }
  if (before_rename) before_rename();
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::PersistError, "cannot rename " + tmp.string() + ": " + ec.message() +
                                             "; " + path.filename().string() + " unchanged");
  }
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void check_schema(const json& j, const std::string& what) {
  const auto it = j.find("schema_version");
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::UnknownSchemaVersion, what + " has no schema_version");
  }
  if (it->get<std::string>() != kSchemaVersion) {
    throw Error(ErrorCode::UnknownSchemaVersion,
                what + " uses schema " + it->get<std::string>() + ", this build reads " +
                    std::string(kSchemaVersion));
  }
}

json manifest_to_json(const RunManifest& m) {
  json entries = json::array();
  for (const auto& e : m.iterations) entries.push_back({{"record", e.record}, {"checkpoint", e.checkpoint}});
  return {{"schema_version", m.schema_version}, {"created", m.created},
          {"seeds", {{"master", m.master_seed}}}, {"config", to_json(m.config)},
          {"iterations", entries}, {"stop_reason", m.stop_reason}};
}

void write_manifest(const fs::path& dir, const RunManifest& m, const std::function<void()>& hook) {
  write_atomic(dir / "manifest.json", manifest_to_json(m).dump(2) + "\n", hook);
}

std::string record_name(int iteration) { return fmt::format("iteration_{:04d}.json", iteration); }
std::string checkpoint_name(int iteration) {
  return fmt::format("iteration_{:04d}_discriminator.json", iteration);
}

}  // namespace

// ---- config ----------------------------------------------------------------

CampaignConfig parse_config(std::string_view text) {
  std::map<std::string, const ConfigKey*> by_name;
  for (const auto& k : config_keys()) by_name.emplace(k.name, &k);
  CampaignConfig cfg;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      invalid("line " + std::to_string(line_no), "expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = by_name.find(key);
    if (it == by_name.end()) invalid(key, "unknown key");
    if (!seen.insert(key).second) invalid(key, "given more than once");
    it->second->set(cfg, value);
  }
  validate(cfg);
  return cfg;
}

CampaignConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigNotFound, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string save_config(const CampaignConfig& cfg) {
  std::string out;
  for (const auto& k : config_keys()) out += fmt::format("{} = {}\n", k.name, k.get(cfg));
  return out;
}

json to_json(const CampaignConfig& cfg) {
  json j = json::object();
  for (const auto& k : config_keys()) j[k.name] = k.get(cfg);
  return j;
}

CampaignConfig campaign_config_from_json(const json& j) {
  std::string text;
  for (const auto& [key, value] : j.items()) {
    text += key + " = " + value.get<std::string>() + "\n";
  }
  return parse_config(text);
}

// ---- records ---------------------------------------------------------------

json to_json(const AnsatzSpec& spec) {
  json blocks = json::array();
  for (BlockKind b : spec.blocks) blocks.push_back(tag_of(b));
  json configs = json::array();
  for (const auto& [pos, cfg] : spec.twolocal) {
    json rotations = json::array();
    for (GateKind r : cfg.rotations) rotations.push_back(to_string(r));
    configs.push_back({{"block", pos}, {"rotations", rotations},
                       {"entanglement", std::string(to_string(cfg.entanglement))}});
  }
  return {{"blocks", blocks}, {"twolocal", configs}};
}

AnsatzSpec ansatz_spec_from_json(const json& j) {
  AnsatzSpec spec;
  for (int tag : j.at("blocks").get<std::vector<int>>()) spec.blocks.push_back(block_kind_from_tag(tag));
  for (const auto& c : j.at("twolocal")) {
    TwoLocalConfig cfg;
    for (const auto& r : c.at("rotations")) {
      const auto name = r.get<std::string>();
      if (name == "RX") cfg.rotations.push_back(GateKind::RX);
      else if (name == "RY") cfg.rotations.push_back(GateKind::RY);
      else if (name == "RZ") cfg.rotations.push_back(GateKind::RZ);
      else throw Error(ErrorCode::MalformedTwoLocalConfig, "unknown rotation " + name);
    }
    cfg.entanglement = entanglement_from_string(c.at("entanglement").get<std::string>());
    spec.twolocal.emplace(c.at("block").get<std::size_t>(), std::move(cfg));
  }
  validate(spec);
  return spec;
}

json to_json(const FeedbackRecord& r) {
  return {{"iteration", r.iteration},
          {"discriminator_loss_values", r.discriminator_loss_values},
          {"generator_loss_values", r.generator_loss_values},
          {"entropy_values", r.entropy_values},
          {"ks_values", r.ks_values},
          {"ansatz_parameter_count", r.ansatz_parameter_count},
          {"ansatz_depth", r.ansatz_depth}};
}

FeedbackRecord feedback_record_from_json(const json& j) {
  FeedbackRecord r;
  r.iteration = j.at("iteration").get<int>();
  r.discriminator_loss_values = j.at("discriminator_loss_values").get<std::vector<double>>();
  r.generator_loss_values = j.at("generator_loss_values").get<std::vector<double>>();
  r.entropy_values = j.at("entropy_values").get<std::vector<double>>();
  r.ks_values = j.at("ks_values").get<std::vector<double>>();
  r.ansatz_parameter_count = j.at("ansatz_parameter_count").get<std::size_t>();
  r.ansatz_depth = j.at("ansatz_depth").get<std::size_t>();
  return r;
}

namespace {

json record_body(const IterationRecord& r, bool include_timing) {
  json messages = json::array();
  for (const auto& m : r.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  json j = {{"schema_version", kSchemaVersion},
            {"iteration", r.iteration},
            {"spec", to_json(r.spec)},
            {"parse_outcome", std::string(to_string(r.parse_outcome))},
            {"parse_errors", r.parse_errors},
            {"messages", messages},
            {"feedback", to_json(r.feedback)},
            {"repeat_final_kl", r.repeat_final_kl},
            {"summary",
             {{"kl_mean", r.summary.kl_mean},
              {"kl_min", r.summary.kl_min},
              {"kl_max", r.summary.kl_max},
              {"median_index", r.summary.median_index}}},
            {"train_seed", r.train_seed},
            {"final_theta", r.final_theta},
            {"final_distribution", r.final_distribution}};
  if (include_timing) j["seconds"] = r.seconds;
  return j;
}

IterationRecord record_from_body(const json& j) {
  check_schema(j, "iteration record");
  IterationRecord r;
  r.iteration = j.at("iteration").get<int>();
  r.spec = ansatz_spec_from_json(j.at("spec"));
  r.parse_outcome = parse_outcome_from_string(j.at("parse_outcome").get<std::string>());
  r.parse_errors = j.at("parse_errors").get<std::vector<std::string>>();
  for (const auto& m : j.at("messages")) {
    r.messages.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
  }
  r.feedback = feedback_record_from_json(j.at("feedback"));
  r.repeat_final_kl = j.at("repeat_final_kl").get<std::vector<double>>();
  const auto& s = j.at("summary");
  r.summary.kl_mean = s.at("kl_mean").get<double>();
  r.summary.kl_min = s.at("kl_min").get<double>();
  r.summary.kl_max = s.at("kl_max").get<double>();
  r.summary.median_index = s.at("median_index").get<std::size_t>();
  r.train_seed = j.at("train_seed").get<std::uint64_t>();
  r.final_theta = j.at("final_theta").get<std::vector<double>>();
  r.final_distribution = j.at("final_distribution").get<std::vector<double>>();
  r.seconds = j.value("seconds", 0.0);
  return r;
}

}  // namespace

json to_json(const IterationRecord& r, bool include_timing) {
  json j = record_body(r, include_timing);
  j["discriminator"] = r.discriminator.to_json();
  return j;
}

IterationRecord iteration_record_from_json(const json& j) {
  IterationRecord r = record_from_body(j);
  r.discriminator = Discriminator::from_json(j.at("discriminator"));
  return r;
}

json to_json(const CampaignLog& log, bool include_timing) {
  json iterations = json::array();
  for (const auto& it : log.iterations) iterations.push_back(to_json(it, include_timing));
  return {{"schema_version", kSchemaVersion}, {"config", to_json(log.config)},
          {"iterations", iterations},         {"best_after", log.best_after},
          {"stop_reason", log.stop_reason}};
}

// ---- log directory ---------------------------------------------------------

void init_log_dir(const fs::path& dir, const CampaignConfig& cfg) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::PersistError, "cannot create " + dir.string() + ": " + ec.message());
  if (fs::exists(dir / "manifest.json")) {
    throw Error(ErrorCode::PersistError, dir.string() + " already holds a campaign; use resume");
  }
  RunManifest m;
  m.config = cfg;
  m.created = utc_now();
  m.master_seed = cfg.seed;
  write_manifest(dir, m, {});
}

std::string persist_iteration(const fs::path& dir, const IterationRecord& rec,
                              const PersistHooks& hooks) {
  RunManifest m = read_manifest(dir);
  const std::string record = record_name(rec.iteration);
  const std::string checkpoint = checkpoint_name(rec.iteration);
  if (rec.iteration != static_cast<int>(m.iterations.size()) + 1) {
    throw Error(ErrorCode::PersistError,
                fmt::format("iteration {} does not follow the {} already recorded", rec.iteration,
                            m.iterations.size()));
  }
  json body = record_body(rec, true);
  body["discriminator_checkpoint"] = checkpoint;
  write_atomic(dir / checkpoint, rec.discriminator.to_json().dump() + "\n");
  write_atomic(dir / record, body.dump(2) + "\n");
  m.iterations.push_back({record, checkpoint});
  try {
    write_manifest(dir, m, hooks.before_manifest_rename);
  } catch (const Error& e) {
    throw Error(ErrorCode::PersistError,
                std::string(e.what()) + "; " + record + " written but not yet listed in the manifest");
  }
  return record;
}

void persist_stop_reason(const fs::path& dir, const std::string& reason, const PersistHooks& hooks) {
  RunManifest m = read_manifest(dir);
  m.stop_reason = reason;
  write_manifest(dir, m, hooks.before_manifest_rename);
}

RunManifest read_manifest(const fs::path& dir) {
  const json j = read_json(dir / "manifest.json");
  check_schema(j, "manifest");
  RunManifest m;
  m.schema_version = j.at("schema_version").get<std::string>();
  m.created = j.at("created").get<std::string>();
  m.master_seed = j.at("seeds").at("master").get<std::uint64_t>();
  m.config = campaign_config_from_json(j.at("config"));
  for (const auto& e : j.at("iterations")) {
    m.iterations.push_back({e.at("record").get<std::string>(), e.at("checkpoint").get<std::string>()});
  }
  m.stop_reason = j.value("stop_reason", std::string{});
  return m;
}

CampaignLog load_log(const fs::path& dir) {
  const RunManifest m = read_manifest(dir);
  CampaignLog log;
  log.config = m.config;
  log.stop_reason = m.stop_reason;
  for (const auto& e : m.iterations) {
    for (const auto& name : {e.record, e.checkpoint}) {
      if (!fs::exists(dir / name)) {
        throw Error(ErrorCode::PersistError, "manifest lists missing file " + name);
      }
    }
    IterationRecord r = record_from_body(read_json(dir / e.record));
    r.discriminator = Discriminator::from_json(read_json(dir / e.checkpoint));
    log.iterations.push_back(std::move(r));
  }
  log.best_after = best_history(log.iterations);
  return log;
}

// ---- reports ---------------------------------------------------------------

ReportTable build_report(const CampaignLog& log) {
  if (log.iterations.empty()) throw Error(ErrorCode::EmptyCampaign, "no completed iterations");
  ReportTable t;
  for (const auto& it : log.iterations) {
    t.rows.push_back({it.iteration, format_block_list(it.spec), it.summary.kl_mean, it.summary.kl_min,
                      it.summary.kl_max, it.feedback.ansatz_parameter_count, it.feedback.ansatz_depth,
                      it.seconds});
  }
  t.best_iteration = log.best()->iteration;
  return t;
}

std::string render_report(const ReportTable& t, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::Csv) {
    out += std::string(kReportCsvHeader) + "\n";
    for (const auto& r : t.rows) {
      out += fmt::format("{},\"{}\",{:.6g},{:.6g},{:.6g},{},{},{:.3f}\n", r.iteration, r.ansatz,
                         r.kl_mean, r.kl_min, r.kl_max, r.params, r.depth, r.seconds);
    }
    return out;
  }
  std::size_t ansatz_width = 6;
  for (const auto& r : t.rows) ansatz_width = std::max(ansatz_width, r.ansatz.size());
  out += fmt::format("{:>9}  {:<{}}  {:>12}  {:>12}  {:>12}  {:>6}  {:>5}  {:>9}\n", "iteration",
                     "ansatz", ansatz_width, "kl_mean", "kl_min", "kl_max", "params", "depth",
                     "seconds");
  for (const auto& r : t.rows) {
    out += fmt::format("{:>9}  {:<{}}  {:>12.6g}  {:>12.6g}  {:>12.6g}  {:>6}  {:>5}  {:>9.3f}{}\n",
                       r.iteration, r.ansatz, ansatz_width, r.kl_mean, r.kl_min, r.kl_max, r.params,
                       r.depth, r.seconds, r.iteration == t.best_iteration ? "  *" : "");
  }
  out += fmt::format("best: iteration {}\n", t.best_iteration);
  return out;
}

std::string emit_report(const fs::path& dir, ReportFormat format) {
  return render_report(build_report(load_log(dir)), format);
}

}  // namespace qas
