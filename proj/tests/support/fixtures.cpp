#include "fixtures.hpp"

#include <array>
#include <atomic>
#include <random>

using mabkit::AssignmentLog;
using mabkit::AssignmentRecord;
using mabkit::PolicyTag;

namespace fixtures {

namespace {

AssignmentRecord make_record(long t, const std::string& user,
                             const std::string& decision_point,
                             PolicyTag policy, int arm,
                             std::optional<double> reward) {
  AssignmentRecord rec;
  rec.t = t;
  rec.user = user;
  rec.decision_point = decision_point;
  rec.policy = policy;
  rec.arm = arm;
  rec.reward = reward;
  rec.timestamp = t;
  return rec;
}

/// Append `counts[k]` rewarded records with reward k/4 for k = 0..4.
void append_reward_cell(AssignmentLog& log, const std::string& factor,
                        PolicyTag policy, int arm,
                        const std::array<int, 5>& counts) {
  for (int k = 0; k < 5; ++k) {
    for (int i = 0; i < counts[k]; ++i) {
      const long t = static_cast<long>(log.size()) + 1;
      log.push_back(make_record(t, "u" + std::to_string(t), factor, policy,
                                arm, k / 4.0));
    }
  }
}

}  // namespace

AssignmentLog link_response_log() {
  AssignmentLog log;
  const auto fill = [&](int arm, int responded, int total) {
    for (int i = 0; i < total; ++i) {
      const long t = static_cast<long>(log.size()) + 1;
      std::optional<double> reward;
      if (i < responded) reward = 0.75;
      log.push_back(make_record(t, "u" + std::to_string(t), "Link",
                                i % 2 == 0 ? PolicyTag::ContextualTS
                                           : PolicyTag::UniformRandom,
                                arm, reward));
    }
  };
  fill(1, 171, 781);  // present
  fill(0, 160, 788);  // absent
  return log;
}

AssignmentLog reward_summary_log() {
  AssignmentLog log;
  // Per-cell counts over the grid {0, .25, .5, .75, 1}, solved so that each
  // cell's mean and SEM round to the published three-decimal values.
  append_reward_cell(log, "Link", PolicyTag::ContextualTS, 1,
                     {19, 0, 2, 115, 96});  // N=232 -> 0.790 (0.018)
  append_reward_cell(log, "Link", PolicyTag::ContextualTS, 0,
                     {24, 1, 2, 96, 52});  // N=175 -> 0.716 (0.024)
  append_reward_cell(log, "Link", PolicyTag::UniformRandom, 1,
                     {25, 0, 1, 125, 51});  // N=202 -> 0.719 (0.021)
  append_reward_cell(log, "Link", PolicyTag::UniformRandom, 0,
                     {41, 0, 2, 126, 35});  // N=204 -> 0.640 (0.024)
  append_reward_cell(log, "Rationale", PolicyTag::ContextualTS, 1,
                     {33, 1, 2, 159, 87});  // N=282 -> 0.736 (0.018)
  append_reward_cell(log, "Rationale", PolicyTag::ContextualTS, 0,
                     {23, 1, 1, 85, 57});  // N=167 -> 0.728 (0.025)
  append_reward_cell(log, "Rationale", PolicyTag::UniformRandom, 1,
                     {25, 1, 1, 118, 47});  // N=192 -> 0.710 (0.022)
  append_reward_cell(log, "Rationale", PolicyTag::UniformRandom, 0,
                     {24, 1, 1, 102, 43});  // N=171 -> 0.703 (0.024)
  return log;
}

AssignmentLog engagement_log() {
  constexpr int kUsers = 1100;
  constexpr int kAssignments = 8521;
  // 813 ratings from exactly 230 users: 123 users give 4, 107 give 3.
  std::array<int, kUsers> quota{};
  for (int u = 0; u < 230; ++u) quota[u] = u < 123 ? 4 : 3;

  AssignmentLog log;
  log.reserve(kAssignments);
  for (int t = 1; t <= kAssignments; ++t) {
    const int user = (t - 1) % kUsers;
    std::optional<double> reward;
    if (quota[user] > 0) {
      --quota[user];
      reward = 0.75;
    }
    log.push_back(make_record(t, "user" + std::to_string(user),
                              "Rationale",
                              t % 2 == 0 ? PolicyTag::ContextualTS
                                         : PolicyTag::UniformRandom,
                              t % 2, reward));
  }
  return log;
}

namespace {

AssignmentLog subgroup_log(const std::string& variable,
                           const std::array<std::pair<PolicyTag, double>, 4>& cells,
                           const std::array<int, 4>& counts,
                           const std::array<double, 4>& means) {
  AssignmentLog log;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int i = 0; i < counts[c]; ++i) {
      const long t = static_cast<long>(log.size()) + 1;
      auto rec = make_record(t, "u" + std::to_string(t), "Link",
                             cells[c].first, i % 2, means[c]);
      rec.context.set(variable, cells[c].second);
      log.push_back(std::move(rec));
    }
  }
  return log;
}

}  // namespace

AssignmentLog mood_subgroup_log() {
  return subgroup_log("Mood",
                      {{{PolicyTag::ContextualTS, 0.0},
                        {PolicyTag::UniformRandom, 0.0},
                        {PolicyTag::ContextualTS, 1.0},
                        {PolicyTag::UniformRandom, 1.0}}},
                      {322, 316, 83, 87}, {0.75, 0.7, 0.75, 0.7});
}

AssignmentLog activity_subgroup_log() {
  return subgroup_log("RecentActivity",
                      {{{PolicyTag::ContextualTS, 1.0},
                        {PolicyTag::UniformRandom, 1.0},
                        {PolicyTag::ContextualTS, 0.0},
                        {PolicyTag::UniformRandom, 0.0}}},
                      {67, 75, 338, 329}, {0.8, 0.7, 0.7, 0.65});
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("mabkit_test_" + tag + "_" + std::to_string(rd()) + "_" +
           std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace fixtures
