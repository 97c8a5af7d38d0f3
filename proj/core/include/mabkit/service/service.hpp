#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "mabkit/analysis.hpp"
#include "mabkit/trial.hpp"

namespace mabkit::service {

/// Immutable definition of one registered experiment. Every factor is its
/// own decision point with its own posterior; the encoding per decision
/// point is intercept + arm indicators + context main effects (+ arm x
/// context interactions when enabled).
struct ExperimentConfig {
  std::string name;
  ArmSet arms;
  ContextSchema context;
  bool interactions = true;
  double mixture_p = 0.5;  // P(ContextualTS) per observation
  NoiseParams noise = NoiseParams::direct(1.0);
  std::vector<double> reward_grid = kRatingGrid;
  // Context variables entering the encodings; default: all declared.
  std::optional<std::vector<std::string>> context_terms;

  void validate() const;
  FeatureEncoding encoding_for(const Factor& factor) const;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& doc);
};

/// Durable proof of one assignment; rewards must reference a receipt.
struct AssignmentReceipt {
  std::string assignment_id;
  std::string experiment_id;
  std::string user;
  std::string decision_point;
  int arm = 0;
  PolicyTag policy = PolicyTag::UniformRandom;
  ContextVector context;  // the effective (fully resolved) context
  std::int64_t timestamp = 0;

  nlohmann::json to_json() const;
  static AssignmentReceipt from_json(const nlohmann::json& doc);
};

struct RefreshReport {
  long records_applied = 0;
  std::vector<std::pair<std::string, std::int64_t>> n_obs;  // per decision point
};

/// The assignment service: experiment registry, policy execution, reward
/// intake with batched posterior refresh, and append-only persistence under
/// data_dir/experiments/<id>/. State replays exactly from the event log
/// (optionally fast-forwarded by the posterior snapshot).
class ExperimentService {
 public:
  explicit ExperimentService(std::filesystem::path data_dir,
                             std::optional<std::uint64_t> seed = std::nullopt);
  ~ExperimentService();

  ExperimentService(const ExperimentService&) = delete;
  ExperimentService& operator=(const ExperimentService&) = delete;

  std::string create_experiment(const ExperimentConfig& config);

  /// Assign an arm. The effective context is request values over the user's
  /// stored overlay over schema defaults. decision_point may be omitted for
  /// single-factor experiments.
  AssignmentReceipt get_assignment(
      const std::string& experiment_id, const std::string& user,
      const ContextVector& request_context = {},
      const std::optional<std::string>& decision_point = std::nullopt);

  /// Post a reward for a receipt, as a grid value. Buffered until the next
  /// refresh; a second posting for the same receipt is a conflict.
  void record_reward(const std::string& experiment_id,
                     const std::string& assignment_id, double value);

  /// Same, as a raw 1..5 rating.
  void record_rating(const std::string& experiment_id,
                     const std::string& assignment_id, int rating);

  /// Merge variables into the user's stored context overlay.
  void update_context(
      const std::string& experiment_id, const std::string& user,
      const std::vector<std::pair<std::string, double>>& variables);

  /// Drain the pending reward buffer into the posteriors atomically.
  RefreshReport refresh_posteriors(const std::string& experiment_id);
  void refresh_all();

  nlohmann::json experiment_summary(const std::string& experiment_id) const;
  AssignmentLog export_log(const std::string& experiment_id) const;
  std::vector<std::string> experiment_ids() const;

  /// Write posterior snapshots (also called on destruction).
  void snapshot_all();

  /// Run refresh_all every interval seconds until stop_scheduler or
  /// destruction.
  void start_scheduler(int interval_seconds);
  void stop_scheduler();

  const std::filesystem::path& data_dir() const { return data_dir_; }

 private:
  struct Experiment;

  static std::unique_ptr<Experiment> make_state(const std::string& id,
                                                const ExperimentConfig& config,
                                                std::uint64_t rng_seed);
  Experiment& find(const std::string& experiment_id);
  const Experiment& find(const std::string& experiment_id) const;
  void load_existing();
  void replay(Experiment& exp, const std::vector<nlohmann::json>& events,
              long skip_posterior_before);
  RefreshReport refresh_locked(Experiment& exp);
  void write_snapshot(const Experiment& exp) const;

  std::filesystem::path data_dir_;
  std::uint64_t seed_;
  std::uint64_t experiment_counter_ = 0;

  mutable std::shared_mutex registry_mutex_;
  std::vector<std::unique_ptr<Experiment>> experiments_;

  struct Scheduler;
  std::unique_ptr<Scheduler> scheduler_;
};

}  // namespace mabkit::service
