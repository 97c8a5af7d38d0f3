#pragma once

#include <filesystem>
#include <string>

#include "mabkit/trial.hpp"

// Synthetic deployment logs whose tables land exactly on the reference
// values the analytics suite is checked against. Each fixture encodes one
// table independently.
namespace fixtures {

/// Response-rate fixture for the 2-level Link factor:
/// present 781 records / 171 responded, absent 788 / 160.
mabkit::AssignmentLog link_response_log();

/// Reward-summary fixture covering both factors (Link, Rationale) split by
/// policy and arm; every cell reproduces its published mean (SEM) at
/// 3-decimal rounding, e.g. Link/ContextualTS/present: N=232, 0.790 (0.018).
mabkit::AssignmentLog reward_summary_log();

/// Engagement fixture: 8,521 assignments, 813 rated (9.54%), contributed by
/// 230 of 1,100 unique users (20.9%).
mabkit::AssignmentLog engagement_log();

/// Subgroup fixture, Mood low/high: rated-record cells
/// [CTS/low, UR/low, CTS/high, UR/high] = [322, 316, 83, 87].
mabkit::AssignmentLog mood_subgroup_log();

/// Subgroup fixture, RecentActivity yes/no: cells
/// [CTS/yes, UR/yes, CTS/no, UR/no] = [67, 75, 338, 329].
mabkit::AssignmentLog activity_subgroup_log();

/// Unique scratch directory under the system temp dir; removed on
/// destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
