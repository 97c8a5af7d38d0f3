#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mabkit/trial.hpp"

namespace mabkit {

/// Map a 1-to-5 helpfulness rating onto the reward grid: (rating - 1) / 4.
double scale_rating(int rating);

/// Assignment and response counts over one log.
struct EngagementSummary {
  long assignments = 0;
  long rated = 0;
  std::optional<double> rate;  // rated / assignments; empty for an empty log
  long unique_raters = 0;
  long unique_users = 0;
};

EngagementSummary engagement_summary(const AssignmentLog& log);

/// One cell of a summary table. Percentages and shares are always derived
/// from counts, never stored.
struct SummaryCell {
  long count = 0;
  std::optional<double> mean;
  std::optional<double> sem;  // absent when count < 2
};

struct SummaryTable {
  std::string title;
  std::string row_dimension;
  std::string col_dimension;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::vector<SummaryCell>> cells;  // [row][col]

  const SummaryCell& cell(std::string_view row, std::string_view col) const;
  long row_total(std::size_t row) const;
};

/// Share of a count against a total; 0 when the total is 0.
double percent(long count, long total);

/// Response rate by arm for one factor: rows per level plus a total row,
/// columns {no_response, responded, total}.
SummaryTable response_rate_table(const AssignmentLog& log,
                                 const Factor& factor);

/// Mean and SEM of observed rewards split by policy (rows) and arm level
/// (columns). SEM uses the n-1 sample standard deviation.
SummaryTable reward_summary_table(const AssignmentLog& log,
                                  const Factor& factor);

/// Mean/SEM/N of observed rewards by policy (rows) and level of one context
/// variable (columns). Records not carrying the variable are skipped;
/// throws if no record carries it.
SummaryTable subgroup_reward(const AssignmentLog& log,
                             const std::string& context_var);

/// One cell of the allocation-dynamics grid, long format for plotting.
struct AllocationCell {
  int period = 0;
  int arm = 0;
  std::string category;  // a grid value ("0.75") or "unrated"
  long count = 0;
};

/// Split the log's timeline into n_periods bins (equal time span by
/// default, equal record counts on request) and count reward categories
/// per period and arm.
std::vector<AllocationCell> allocation_dynamics(
    const AssignmentLog& log, int n_periods, const Factor& factor,
    bool equal_count_bins = false,
    const std::vector<double>& grid = kRatingGrid);

}  // namespace mabkit
