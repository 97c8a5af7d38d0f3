#include "mabkit/service/service.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <thread>
#include <unordered_map>

#include "mabkit/analytics.hpp"
#include "mabkit/errors.hpp"
#include "mabkit/log_io.hpp"
#include "mabkit/policy.hpp"
#include "mabkit/service/events.hpp"

namespace mabkit::service {

namespace {

constexpr int kSnapshotFormat = 1;
constexpr std::uint64_t kSummaryStreamSalt = 0x73756d6d61727953ULL;

std::int64_t now_ts() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

/// Opaque-id guard: the reward/context store must never hold direct
/// identifiers, so ids that look like emails or phone numbers are refused
/// at the door.
void validate_opaque_id(const std::string& id, const char* what) {
  if (id.empty()) {
    throw ValidationError(std::string(what) + " must be non-empty");
  }
  if (id.find('@') != std::string::npos) {
    throw ValidationError(std::string(what) +
                          " looks like an email address; use an opaque id");
  }
  // Phone-number shape: nothing but digits and dialling punctuation, with
  // at least 7 digits. Hashes and UUIDs pass (they carry letters).
  int digits = 0;
  bool phone_shaped = true;
  for (char c : id) {
    if (c >= '0' && c <= '9') {
      ++digits;
    } else if (c != '+' && c != '-' && c != ' ' && c != '(' && c != ')' &&
               c != '.') {
      phone_shaped = false;
      break;
    }
  }
  if (phone_shaped && digits >= 7) {
    throw ValidationError(std::string(what) +
                          " looks like a phone number; use an opaque id");
  }
}

nlohmann::json context_to_json(const ContextVector& ctx) {
  nlohmann::json obj = nlohmann::json::object();
  for (const auto& [name, value] : ctx.entries()) obj[name] = value;
  return obj;
}

ContextVector context_from_json(const nlohmann::json& obj) {
  ContextVector ctx;
  for (const auto& [name, value] : obj.items()) {
    ctx.set(name, value.get<double>());
  }
  return ctx;
}

std::string hex_id(const char* prefix, Rng& rng) {
  static const char* digits = "0123456789abcdef";
  std::string id = prefix;
  std::uint64_t bits = rng.next_u64();
  for (int i = 0; i < 12; ++i) {
    id += digits[bits & 0xf];
    bits >>= 4;
  }
  return id;
}

}  // namespace

// ---------------------------------------------------------------------------
// ExperimentConfig

void ExperimentConfig::validate() const {
  if (arms.factors.empty()) {
    throw ValidationError("experiment needs at least one factor");
  }
  for (const auto& factor : arms.factors) {
    if (factor.name.empty()) throw ValidationError("factor name must be set");
    if (factor.levels < 1) {
      throw ValidationError("factor '" + factor.name +
                            "' must have at least one level");
    }
    const auto dup = std::count_if(
        arms.factors.begin(), arms.factors.end(),
        [&](const Factor& f) { return f.name == factor.name; });
    if (dup > 1) {
      throw ValidationError("duplicate factor name '" + factor.name + "'");
    }
  }
  for (const auto& var : context.variables()) {
    if (var.name.empty()) {
      throw ValidationError("context variable name must be set");
    }
    if (var.values.empty()) {
      throw ValidationError("context variable '" + var.name +
                            "' declares no values");
    }
  }
  if (!(mixture_p >= 0.0 && mixture_p <= 1.0)) {
    throw ValidationError("mixture_p must lie in [0, 1]");
  }
  if (reward_grid.empty() ||
      !std::is_sorted(reward_grid.begin(), reward_grid.end()) ||
      std::adjacent_find(reward_grid.begin(), reward_grid.end()) !=
          reward_grid.end()) {
    throw ValidationError("reward_grid must be non-empty and strictly "
                          "increasing");
  }
  if (context_terms) {
    for (const auto& name : *context_terms) {
      if (!context.has(name)) {
        throw ValidationError("encoding references undeclared context "
                              "variable '" + name + "'");
      }
    }
  }
  // Builds every encoding, surfacing undeclared-context references.
  for (const auto& factor : arms.factors) {
    const auto enc = encoding_for(factor);
    (void)noise.scale_for(enc.dimension());
  }
}

FeatureEncoding ExperimentConfig::encoding_for(const Factor& factor) const {
  std::vector<std::string> vars;
  if (context_terms) {
    vars = *context_terms;
  } else {
    for (const auto& v : context.variables()) vars.push_back(v.name);
  }
  return FeatureEncoding::standard(factor, vars, interactions);
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json factors = nlohmann::json::array();
  for (const auto& f : arms.factors) {
    factors.push_back({{"name", f.name},
                       {"levels", f.levels},
                       {"level_names", f.level_names}});
  }
  nlohmann::json ctx = nlohmann::json::array();
  for (const auto& v : context.variables()) {
    ctx.push_back({{"name", v.name},
                   {"values", v.values},
                   {"default", v.default_value}});
  }
  nlohmann::json noise_doc;
  if (noise.is_direct()) {
    noise_doc = {{"v", noise.v()}};
  } else {
    noise_doc = {{"R", noise.R()},
                 {"epsilon", noise.epsilon()},
                 {"delta", noise.delta()}};
  }
  nlohmann::json doc{{"name", name},
                     {"factors", factors},
                     {"context", ctx},
                     {"interactions", interactions},
                     {"mixture_p", mixture_p},
                     {"noise", noise_doc},
                     {"reward_grid", reward_grid}};
  if (context_terms) doc["context_terms"] = *context_terms;
  return doc;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc) {
  ExperimentConfig cfg;
  cfg.name = doc.value("name", std::string{});
  if (!doc.contains("factors") || !doc.at("factors").is_array() ||
      doc.at("factors").empty()) {
    throw ValidationError("experiment config needs a non-empty factors array");
  }
  for (const auto& f : doc.at("factors")) {
    Factor factor;
    factor.name = f.at("name").get<std::string>();
    factor.levels = f.value("levels", 2);
    if (f.contains("level_names")) {
      factor.level_names = f.at("level_names").get<std::vector<std::string>>();
    }
    cfg.arms.factors.push_back(std::move(factor));
  }
  std::vector<ContextVariable> vars;
  if (doc.contains("context")) {
    for (const auto& v : doc.at("context")) {
      ContextVariable var;
      var.name = v.at("name").get<std::string>();
      if (v.contains("values")) {
        var.values = v.at("values").get<std::vector<double>>();
      }
      var.default_value = v.value("default", var.values.empty()
                                                  ? 0.0
                                                  : var.values.front());
      vars.push_back(std::move(var));
    }
  }
  cfg.context = ContextSchema(std::move(vars));
  cfg.interactions = doc.value("interactions", true);
  cfg.mixture_p = doc.value("mixture_p", 0.5);
  if (doc.contains("noise")) {
    const auto& n = doc.at("noise");
    if (n.contains("v")) {
      cfg.noise = NoiseParams::direct(n.at("v").get<double>());
    } else {
      cfg.noise = NoiseParams::formula(n.at("R").get<double>(),
                                       n.at("epsilon").get<double>(),
                                       n.at("delta").get<double>());
    }
  }
  if (doc.contains("reward_grid")) {
    cfg.reward_grid = doc.at("reward_grid").get<std::vector<double>>();
  }
  if (doc.contains("context_terms")) {
    cfg.context_terms = doc.at("context_terms").get<std::vector<std::string>>();
  }
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// AssignmentReceipt

nlohmann::json AssignmentReceipt::to_json() const {
  return nlohmann::json{{"assignment_id", assignment_id},
                        {"experiment_id", experiment_id},
                        {"user", user},
                        {"decision_point", decision_point},
                        {"arm", arm},
                        {"policy", to_string(policy)},
                        {"context", context_to_json(context)},
                        {"ts", timestamp}};
}

AssignmentReceipt AssignmentReceipt::from_json(const nlohmann::json& doc) {
  AssignmentReceipt r;
  r.assignment_id = doc.at("assignment_id").get<std::string>();
  r.experiment_id = doc.at("experiment_id").get<std::string>();
  r.user = doc.at("user").get<std::string>();
  r.decision_point = doc.at("decision_point").get<std::string>();
  r.arm = doc.at("arm").get<int>();
  r.policy = policy_tag_from_string(doc.at("policy").get<std::string>());
  r.context = context_from_json(doc.at("context"));
  r.timestamp = doc.at("ts").get<std::int64_t>();
  return r;
}

// ---------------------------------------------------------------------------
// ExperimentService internals

struct PendingReward {
  std::size_t record_index = 0;
  double value = 0.0;
};

struct DecisionPointState {
  Factor factor;
  FeatureEncoding encoding;
  std::shared_ptr<const PosteriorState> posterior;
  std::vector<PendingReward> pending;
  long applied = 0;  // rewards folded into the posterior so far
};

struct RecordEntry {
  AssignmentReceipt receipt;
  std::size_t point_index = 0;
  std::optional<double> reward;
};

struct ExperimentService::Experiment {
  std::string id;
  ExperimentConfig config;
  std::vector<DecisionPointState> points;
  std::vector<RecordEntry> records;
  std::unordered_map<std::string, std::size_t> record_index;
  std::unordered_map<std::string, ContextVector> overlays;
  long rated = 0;
  std::int64_t created_ts = 0;
  std::int64_t refreshed_ts = 0;
  std::unique_ptr<EventLog> events;
  Rng rng{0};
  mutable std::mutex mutex;

  DecisionPointState& point_for(const std::optional<std::string>& name) {
    if (!name) {
      if (points.size() == 1) return points.front();
      throw ValidationError(
          "experiment has multiple decision points; pass decision_point");
    }
    for (auto& p : points) {
      if (p.factor.name == *name) return p;
    }
    throw NotFoundError("unknown decision point '" + *name + "'");
  }

  std::size_t point_index_of(const DecisionPointState& p) const {
    return static_cast<std::size_t>(&p - points.data());
  }
};

struct ExperimentService::Scheduler {
  std::thread thread;
  std::mutex mutex;
  std::condition_variable cv;
  bool stop = false;
};

ExperimentService::ExperimentService(std::filesystem::path data_dir,
                                     std::optional<std::uint64_t> seed)
    : data_dir_(std::move(data_dir)),
      seed_(seed.value_or(std::random_device{}())) {
  std::filesystem::create_directories(data_dir_ / "experiments");
  load_existing();
}

ExperimentService::~ExperimentService() {
  stop_scheduler();
  try {
    snapshot_all();
  } catch (...) {
    // Destructor must not throw; the event log alone still replays fully.
  }
}

ExperimentService::Experiment& ExperimentService::find(
    const std::string& experiment_id) {
  std::shared_lock lock(registry_mutex_);
  for (auto& exp : experiments_) {
    if (exp->id == experiment_id) return *exp;
  }
  throw NotFoundError("unknown experiment '" + experiment_id + "'");
}

const ExperimentService::Experiment& ExperimentService::find(
    const std::string& experiment_id) const {
  return const_cast<ExperimentService*>(this)->find(experiment_id);
}

std::unique_ptr<ExperimentService::Experiment> ExperimentService::make_state(
    const std::string& id, const ExperimentConfig& config,
    std::uint64_t rng_seed) {
  auto exp = std::make_unique<Experiment>();
  exp->id = id;
  exp->config = config;
  exp->rng = Rng(rng_seed);
  for (const auto& factor : config.arms.factors) {
    DecisionPointState point;
    point.factor = factor;
    point.encoding = config.encoding_for(factor);
    const double v = config.noise.scale_for(point.encoding.dimension());
    point.posterior =
        std::make_shared<PosteriorState>(point.encoding.dimension(), v);
    exp->points.push_back(std::move(point));
  }
  return exp;
}

std::string ExperimentService::create_experiment(
    const ExperimentConfig& config) {
  config.validate();
  std::unique_lock lock(registry_mutex_);
  Rng id_rng = Rng::derive(seed_, ++experiment_counter_);
  std::string id;
  do {
    id = hex_id("exp-", id_rng);
  } while (std::any_of(experiments_.begin(), experiments_.end(),
                       [&](const auto& e) { return e->id == id; }));

  const auto dir = data_dir_ / "experiments" / id;
  std::filesystem::create_directories(dir);
  auto exp = make_state(id, config,
                        derive_stream_seed(seed_, experiment_counter_));
  exp->created_ts = now_ts();
  exp->events = std::make_unique<EventLog>(dir / "events.jsonl");
  exp->events->append({{"type", "created"},
                       {"id", id},
                       {"ts", exp->created_ts},
                       {"config", config.to_json()}});
  experiments_.push_back(std::move(exp));
  return id;
}

AssignmentReceipt ExperimentService::get_assignment(
    const std::string& experiment_id, const std::string& user,
    const ContextVector& request_context,
    const std::optional<std::string>& decision_point) {
  validate_opaque_id(user, "user id");
  Experiment& exp = find(experiment_id);
  std::lock_guard lock(exp.mutex);
  DecisionPointState& point = exp.point_for(decision_point);

  // Request values win over the stored overlay; schema defaults fill gaps.
  ContextVector merged;
  if (auto it = exp.overlays.find(user); it != exp.overlays.end()) {
    merged = it->second;
  }
  for (const auto& [name, value] : request_context.entries()) {
    if (!exp.config.context.has(name)) {
      throw ValidationError("unknown context variable '" + name + "'");
    }
    merged.set(name, value);
  }
  const ContextVector effective = with_defaults(exp.config.context, merged);

  AssignmentReceipt receipt;
  receipt.assignment_id = "asn-" + std::to_string(exp.records.size() + 1);
  receipt.experiment_id = exp.id;
  receipt.user = user;
  receipt.decision_point = point.factor.name;
  receipt.policy = select_policy(exp.config.mixture_p, exp.rng);
  receipt.arm =
      receipt.policy == PolicyTag::ContextualTS
          ? select_arm_ts(*point.posterior, effective, point.factor,
                          point.encoding, exp.rng)
          : select_arm_uniform(point.factor, exp.rng);
  receipt.context = effective;
  receipt.timestamp = now_ts();

  // The receipt is durable before the caller ever sees it.
  exp.events->append(
      {{"type", "assigned"}, {"ts", receipt.timestamp},
       {"receipt", receipt.to_json()}});
  exp.record_index[receipt.assignment_id] = exp.records.size();
  exp.records.push_back(
      {receipt, exp.point_index_of(point), std::nullopt});
  return receipt;
}

void ExperimentService::record_reward(const std::string& experiment_id,
                                      const std::string& assignment_id,
                                      double value) {
  Experiment& exp = find(experiment_id);
  std::lock_guard lock(exp.mutex);
  auto it = exp.record_index.find(assignment_id);
  if (it == exp.record_index.end()) {
    throw NotFoundError("unknown assignment '" + assignment_id + "'");
  }
  RecordEntry& entry = exp.records[it->second];
  if (entry.reward) {
    throw ConflictError("assignment '" + assignment_id +
                        "' already has a reward");
  }
  const auto& grid = exp.config.reward_grid;
  if (std::find(grid.begin(), grid.end(), value) == grid.end()) {
    throw ValidationError("reward " + format_double(value) +
                          " is not a grid value");
  }
  exp.events->append({{"type", "rewarded"},
                      {"ts", now_ts()},
                      {"assignment_id", assignment_id},
                      {"value", value}});
  entry.reward = value;
  exp.points[entry.point_index].pending.push_back({it->second, value});
  ++exp.rated;
}

void ExperimentService::record_rating(const std::string& experiment_id,
                                      const std::string& assignment_id,
                                      int rating) {
  record_reward(experiment_id, assignment_id, scale_rating(rating));
}

void ExperimentService::update_context(
    const std::string& experiment_id, const std::string& user,
    const std::vector<std::pair<std::string, double>>& variables) {
  validate_opaque_id(user, "user id");
  Experiment& exp = find(experiment_id);
  std::lock_guard lock(exp.mutex);
  nlohmann::json vars = nlohmann::json::object();
  for (const auto& [name, value] : variables) {
    if (!exp.config.context.has(name)) {
      throw ValidationError("unknown context variable '" + name + "'");
    }
    vars[name] = value;
  }
  exp.events->append({{"type", "context"},
                      {"ts", now_ts()},
                      {"user", user},
                      {"variables", vars}});
  ContextVector& overlay = exp.overlays[user];
  for (const auto& [name, value] : variables) overlay.set(name, value);
}

RefreshReport ExperimentService::refresh_locked(Experiment& exp) {
  RefreshReport report;
  for (auto& point : exp.points) {
    if (!point.pending.empty()) {
      auto next = std::make_shared<PosteriorState>(*point.posterior);
      for (const auto& pending : point.pending) {
        const RecordEntry& entry = exp.records[pending.record_index];
        next->update(point.encoding.encode(entry.receipt.arm,
                                           entry.receipt.context),
                     pending.value);
      }
      report.records_applied += static_cast<long>(point.pending.size());
      point.applied += static_cast<long>(point.pending.size());
      point.pending.clear();
      point.posterior = std::move(next);  // atomic swap under the lock
    }
    report.n_obs.emplace_back(point.factor.name, point.posterior->n_obs());
  }
  exp.refreshed_ts = now_ts();
  nlohmann::json n_obs = nlohmann::json::object();
  for (const auto& [name, n] : report.n_obs) n_obs[name] = n;
  exp.events->append({{"type", "refreshed"},
                      {"ts", exp.refreshed_ts},
                      {"applied", report.records_applied},
                      {"n_obs", n_obs}});
  write_snapshot(exp);
  return report;
}

RefreshReport ExperimentService::refresh_posteriors(
    const std::string& experiment_id) {
  Experiment& exp = find(experiment_id);
  std::lock_guard lock(exp.mutex);
  return refresh_locked(exp);
}

void ExperimentService::refresh_all() {
  std::shared_lock lock(registry_mutex_);
  for (auto& exp : experiments_) {
    std::lock_guard guard(exp->mutex);
    refresh_locked(*exp);
  }
}

nlohmann::json ExperimentService::experiment_summary(
    const std::string& experiment_id) const {
  const Experiment& exp = find(experiment_id);
  std::lock_guard lock(exp.mutex);

  nlohmann::json points = nlohmann::json::array();
  for (std::size_t pi = 0; pi < exp.points.size(); ++pi) {
    const auto& point = exp.points[pi];
    std::vector<long> by_arm_ts(point.factor.levels, 0);
    std::vector<long> by_arm_ur(point.factor.levels, 0);
    for (const auto& entry : exp.records) {
      if (entry.point_index != pi) continue;
      auto& bucket = entry.receipt.policy == PolicyTag::ContextualTS
                         ? by_arm_ts
                         : by_arm_ur;
      ++bucket[entry.receipt.arm];
    }
    std::vector<double> mu(point.posterior->mean().begin(),
                           point.posterior->mean().end());

    // Deterministic probe: arm probabilities for every context cell (small
    // schemas) or the default context.
    nlohmann::json probes = nlohmann::json::array();
    std::vector<ContextVector> cells{
        with_defaults(exp.config.context, ContextVector{})};
    std::size_t combos = 1;
    for (const auto& var : exp.config.context.variables()) {
      combos *= std::max<std::size_t>(var.values.size(), 1);
    }
    if (combos > 1 && combos <= 8) {
      cells.clear();
      cells.emplace_back();
      for (const auto& var : exp.config.context.variables()) {
        std::vector<ContextVector> grown;
        for (const auto& cell : cells) {
          for (double value : var.values) {
            ContextVector next = cell;
            next.set(var.name, value);
            grown.push_back(std::move(next));
          }
        }
        cells = std::move(grown);
      }
    }
    Rng probe_rng = Rng::derive(kSummaryStreamSalt,
                                static_cast<std::uint64_t>(
                                    point.posterior->n_obs()));
    for (const auto& cell : cells) {
      auto probs = arm_selection_probability(*point.posterior, cell,
                                             point.factor, point.encoding,
                                             2000, probe_rng);
      probes.push_back({{"context", context_to_json(cell)},
                        {"probabilities", probs}});
    }

    points.push_back({{"name", point.factor.name},
                      {"n_obs", point.posterior->n_obs()},
                      {"pending", point.pending.size()},
                      {"applied", point.applied},
                      {"assignments", {{"ContextualTS", by_arm_ts},
                                       {"UniformRandom", by_arm_ur}}},
                      {"mu_hat", mu},
                      {"arm_probabilities", probes}});
  }

  long ts_count = 0;
  for (const auto& entry : exp.records) {
    if (entry.receipt.policy == PolicyTag::ContextualTS) ++ts_count;
  }
  const long total = static_cast<long>(exp.records.size());
  nlohmann::json summary{
      {"experiment_id", exp.id},
      {"name", exp.config.name},
      {"created_ts", exp.created_ts},
      {"refreshed_ts", exp.refreshed_ts},
      {"assignments", total},
      {"rated", exp.rated},
      {"by_policy",
       {{"ContextualTS", ts_count}, {"UniformRandom", total - ts_count}}},
      {"decision_points", points}};
  if (total > 0) {
    summary["engagement_rate"] = static_cast<double>(exp.rated) / total;
  } else {
    summary["engagement_rate"] = nullptr;
  }
  return summary;
}

AssignmentLog ExperimentService::export_log(
    const std::string& experiment_id) const {
  const Experiment& exp = find(experiment_id);
  std::lock_guard lock(exp.mutex);
  AssignmentLog log;
  log.reserve(exp.records.size());
  long t = 0;
  for (const auto& entry : exp.records) {
    AssignmentRecord rec;
    rec.t = ++t;
    rec.user = entry.receipt.user;
    rec.decision_point = entry.receipt.decision_point;
    rec.policy = entry.receipt.policy;
    rec.context = entry.receipt.context;
    rec.arm = entry.receipt.arm;
    rec.reward = entry.reward;
    rec.timestamp = entry.receipt.timestamp;
    log.push_back(std::move(rec));
  }
  return log;
}

std::vector<std::string> ExperimentService::experiment_ids() const {
  std::shared_lock lock(registry_mutex_);
  std::vector<std::string> ids;
  ids.reserve(experiments_.size());
  for (const auto& exp : experiments_) ids.push_back(exp->id);
  return ids;
}

// ---------------------------------------------------------------------------
// Persistence

void ExperimentService::write_snapshot(const Experiment& exp) const {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& point : exp.points) {
    points.push_back({{"name", point.factor.name},
                      {"posterior", point.posterior->to_json()},
                      {"applied", point.applied}});
  }
  nlohmann::json doc{{"format", kSnapshotFormat},
                     {"event_count", exp.events->count()},
                     {"refreshed_ts", exp.refreshed_ts},
                     {"decision_points", points}};
  const auto dir = data_dir_ / "experiments" / exp.id;
  const auto tmp = dir / "snapshot.json.tmp";
  const auto final_path = dir / "snapshot.json";
  {
    std::ofstream out(tmp);
    out << doc.dump(2) << '\n';
    if (!out) throw Error("cannot write snapshot for '" + exp.id + "'");
  }
  std::filesystem::rename(tmp, final_path);
}

void ExperimentService::snapshot_all() {
  std::shared_lock lock(registry_mutex_);
  for (const auto& exp : experiments_) {
    std::lock_guard guard(exp->mutex);
    write_snapshot(*exp);
  }
}

void ExperimentService::replay(Experiment& exp,
                               const std::vector<nlohmann::json>& events,
                               long skip_posterior_before) {
  long index = 0;
  for (const auto& event : events) {
    const auto type = event.at("type").get<std::string>();
    if (type == "created") {
      exp.created_ts = event.at("ts").get<std::int64_t>();
    } else if (type == "assigned") {
      auto receipt = AssignmentReceipt::from_json(event.at("receipt"));
      // Canonicalise entry order (JSON objects iterate alphabetically).
      receipt.context = with_defaults(exp.config.context, receipt.context);
      DecisionPointState& point =
          exp.point_for(std::optional<std::string>(receipt.decision_point));
      exp.record_index[receipt.assignment_id] = exp.records.size();
      exp.records.push_back(
          {std::move(receipt), exp.point_index_of(point), std::nullopt});
    } else if (type == "rewarded") {
      const auto id = event.at("assignment_id").get<std::string>();
      const double value = event.at("value").get<double>();
      auto it = exp.record_index.find(id);
      if (it == exp.record_index.end()) {
        throw ParseError("event log references unknown assignment '" + id +
                         "'");
      }
      RecordEntry& entry = exp.records[it->second];
      entry.reward = value;
      exp.points[entry.point_index].pending.push_back({it->second, value});
      ++exp.rated;
    } else if (type == "context") {
      ContextVector& overlay =
          exp.overlays[event.at("user").get<std::string>()];
      for (const auto& [name, value] : event.at("variables").items()) {
        overlay.set(name, value.get<double>());
      }
    } else if (type == "refreshed") {
      exp.refreshed_ts = event.at("ts").get<std::int64_t>();
      for (auto& point : exp.points) {
        if (index < skip_posterior_before) {
          // The snapshot posterior already contains these updates.
          point.applied += static_cast<long>(point.pending.size());
          point.pending.clear();
          continue;
        }
        if (point.pending.empty()) continue;
        auto next = std::make_shared<PosteriorState>(*point.posterior);
        for (const auto& pending : point.pending) {
          const RecordEntry& entry = exp.records[pending.record_index];
          next->update(point.encoding.encode(entry.receipt.arm,
                                             entry.receipt.context),
                       pending.value);
        }
        point.applied += static_cast<long>(point.pending.size());
        point.pending.clear();
        point.posterior = std::move(next);
      }
    } else {
      throw ParseError("unknown event type '" + type + "' in log of '" +
                       exp.id + "'");
    }
    ++index;
  }
}

void ExperimentService::load_existing() {
  const auto root = data_dir_ / "experiments";
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (entry.is_directory() &&
        std::filesystem::exists(entry.path() / "events.jsonl")) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());

  std::unique_lock lock(registry_mutex_);
  for (const auto& dir : dirs) {
    auto events = EventLog::read_all(dir / "events.jsonl");
    if (events.empty() ||
        events.front().value("type", std::string{}) != "created") {
      throw ParseError("event log in '" + dir.string() +
                       "' does not start with a created event");
    }
    const auto id = events.front().at("id").get<std::string>();
    const auto config =
        ExperimentConfig::from_json(events.front().at("config"));
    auto exp = make_state(id, config,
                          derive_stream_seed(seed_, ++experiment_counter_));

    long skip_before = 0;
    const auto snapshot_path = dir / "snapshot.json";
    if (std::filesystem::exists(snapshot_path)) {
      std::ifstream in(snapshot_path);
      nlohmann::json snap;
      try {
        in >> snap;
      } catch (const nlohmann::json::exception& e) {
        throw ParseError("snapshot in '" + dir.string() + "': " + e.what());
      }
      const long count = snap.value("event_count", 0L);
      if (count > 0 && count <= static_cast<long>(events.size())) {
        for (const auto& p : snap.at("decision_points")) {
          const auto name = p.at("name").get<std::string>();
          for (auto& point : exp->points) {
            if (point.factor.name == name) {
              point.posterior = std::make_shared<PosteriorState>(
                  PosteriorState::from_json(p.at("posterior")));
            }
          }
        }
        skip_before = count;
      }
    }
    replay(*exp, events, skip_before);
    exp->events = std::make_unique<EventLog>(dir / "events.jsonl");
    experiments_.push_back(std::move(exp));
  }
}

// ---------------------------------------------------------------------------
// Scheduler

void ExperimentService::start_scheduler(int interval_seconds) {
  if (interval_seconds < 1) {
    throw ValidationError("refresh interval must be >= 1 second");
  }
  stop_scheduler();
  scheduler_ = std::make_unique<Scheduler>();
  Scheduler* sched = scheduler_.get();
  sched->thread = std::thread([this, sched, interval_seconds] {
    std::unique_lock lock(sched->mutex);
    while (!sched->stop) {
      if (sched->cv.wait_for(lock, std::chrono::seconds(interval_seconds),
                             [sched] { return sched->stop; })) {
        break;
      }
      lock.unlock();
      try {
        refresh_all();
      } catch (...) {
        // A failed scheduled refresh must not kill the service thread;
        // the next tick retries.
      }
      lock.lock();
    }
  });
}

void ExperimentService::stop_scheduler() {
  if (!scheduler_) return;
  {
    std::lock_guard lock(scheduler_->mutex);
    scheduler_->stop = true;
  }
  scheduler_->cv.notify_all();
  if (scheduler_->thread.joinable()) scheduler_->thread.join();
  scheduler_.reset();
}

}  // namespace mabkit::service
