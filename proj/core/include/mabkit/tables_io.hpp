#pragma once

#include <iosfwd>
#include <nlohmann/json_fwd.hpp>
#include <vector>

#include "mabkit/analysis.hpp"
#include "mabkit/analytics.hpp"

namespace mabkit {

/// Rejection-rate table, reference layout:
/// scenario,policy,N,effect,rate,mc_stderr,reps,seed
void write_evaluation_csv(std::ostream& out,
                          const std::vector<EvaluationRow>& rows);
nlohmann::json evaluation_to_json(const std::vector<EvaluationRow>& rows);

/// Reward report: policy,subgroup,mean_reward,mc_stderr,reps
void write_reward_report_csv(std::ostream& out,
                             const std::vector<RewardReportRow>& rows);
nlohmann::json reward_report_to_json(const std::vector<RewardReportRow>& rows);

/// Summary tables, long format:
/// <row_dim>,<col_dim>,count,share,mean,sem   (share against the row total)
void write_summary_table_csv(std::ostream& out, const SummaryTable& table);
nlohmann::json summary_table_to_json(const SummaryTable& table);

/// Allocation dynamics, long format: period,arm,reward_category,count
void write_allocation_csv(std::ostream& out,
                          const std::vector<AllocationCell>& cells);
nlohmann::json allocation_to_json(const std::vector<AllocationCell>& cells);

nlohmann::json engagement_to_json(const EngagementSummary& summary);

}  // namespace mabkit
