#include "mabkit/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "mabkit/errors.hpp"
#include "mabkit/log_io.hpp"

namespace mabkit {

double scale_rating(int rating) {
  if (rating < 1 || rating > 5) {
    throw ValidationError("rating " + std::to_string(rating) +
                          " outside the 1..5 scale");
  }
  return (rating - 1) / 4.0;
}

EngagementSummary engagement_summary(const AssignmentLog& log) {
  EngagementSummary s;
  s.assignments = static_cast<long>(log.size());
  std::set<std::string> users, raters;
  for (const auto& rec : log) {
    users.insert(rec.user);
    if (rec.reward) {
      ++s.rated;
      raters.insert(rec.user);
    }
  }
  s.unique_users = static_cast<long>(users.size());
  s.unique_raters = static_cast<long>(raters.size());
  if (s.assignments > 0) {
    s.rate = static_cast<double>(s.rated) / s.assignments;
  }
  return s;
}

const SummaryCell& SummaryTable::cell(std::string_view row,
                                      std::string_view col) const {
  auto r = std::find(row_labels.begin(), row_labels.end(), row);
  auto c = std::find(col_labels.begin(), col_labels.end(), col);
  if (r == row_labels.end() || c == col_labels.end()) {
    throw NotFoundError("no cell (" + std::string(row) + ", " +
                        std::string(col) + ") in table '" + title + "'");
  }
  return cells[r - row_labels.begin()][c - col_labels.begin()];
}

long SummaryTable::row_total(std::size_t row) const {
  long total = 0;
  for (const auto& cell : cells.at(row)) total += cell.count;
  return total;
}

double percent(long count, long total) {
  if (total == 0) return 0.0;
  return 100.0 * static_cast<double>(count) / static_cast<double>(total);
}

namespace {

struct Accumulator {
  long n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) {
    ++n;
    sum += x;
    sum_sq += x * x;
  }

  SummaryCell cell() const {
    SummaryCell c;
    c.count = n;
    if (n > 0) c.mean = sum / n;
    if (n > 1) {
      const double var = (sum_sq - sum * sum / n) / static_cast<double>(n - 1);
      c.sem = std::sqrt(std::max(var, 0.0) / n);
    }
    return c;
  }
};

const std::vector<std::string> kPolicyRows{"ContextualTS", "UniformRandom"};

}  // namespace

SummaryTable response_rate_table(const AssignmentLog& log,
                                 const Factor& factor) {
  SummaryTable table;
  table.title = "response rate by arm: " + factor.name;
  table.row_dimension = factor.name;
  table.col_dimension = "response";
  table.col_labels = {"no_response", "responded", "total"};
  std::vector<long> responded(factor.levels, 0), total(factor.levels, 0);
  for (const auto& rec : log) {
    if (rec.decision_point != factor.name) continue;
    if (rec.arm < 0 || rec.arm >= factor.levels) {
      throw ValidationError("record arm " + std::to_string(rec.arm) +
                            " outside factor '" + factor.name + "'");
    }
    ++total[rec.arm];
    if (rec.reward) ++responded[rec.arm];
  }
  long grand_responded = 0, grand_total = 0;
  for (int level = 0; level < factor.levels; ++level) {
    table.row_labels.push_back(factor.level_label(level));
    table.cells.push_back({SummaryCell{total[level] - responded[level]},
                           SummaryCell{responded[level]},
                           SummaryCell{total[level]}});
    grand_responded += responded[level];
    grand_total += total[level];
  }
  table.row_labels.push_back("total");
  table.cells.push_back({SummaryCell{grand_total - grand_responded},
                         SummaryCell{grand_responded},
                         SummaryCell{grand_total}});
  return table;
}

SummaryTable reward_summary_table(const AssignmentLog& log,
                                  const Factor& factor) {
  SummaryTable table;
  table.title = "reward summary: " + factor.name;
  table.row_dimension = "policy";
  table.col_dimension = factor.name;
  table.row_labels = kPolicyRows;
  for (int level = 0; level < factor.levels; ++level) {
    table.col_labels.push_back(factor.level_label(level));
  }
  std::vector<std::vector<Accumulator>> acc(
      2, std::vector<Accumulator>(factor.levels));
  for (const auto& rec : log) {
    if (rec.decision_point != factor.name || !rec.reward) continue;
    if (rec.arm < 0 || rec.arm >= factor.levels) {
      throw ValidationError("record arm " + std::to_string(rec.arm) +
                            " outside factor '" + factor.name + "'");
    }
    const int row = rec.policy == PolicyTag::ContextualTS ? 0 : 1;
    acc[row][rec.arm].add(*rec.reward);
  }
  for (const auto& row : acc) {
    std::vector<SummaryCell> cells;
    for (const auto& a : row) cells.push_back(a.cell());
    table.cells.push_back(std::move(cells));
  }
  return table;
}

SummaryTable subgroup_reward(const AssignmentLog& log,
                             const std::string& context_var) {
  std::set<double> levels;
  for (const auto& rec : log) {
    if (auto v = rec.context.find(context_var)) levels.insert(*v);
  }
  if (levels.empty()) {
    throw ValidationError("context variable '" + context_var +
                          "' appears on no record");
  }
  SummaryTable table;
  table.title = "reward by subgroup: " + context_var;
  table.row_dimension = "policy";
  table.col_dimension = context_var;
  table.row_labels = kPolicyRows;
  std::vector<double> ordered(levels.begin(), levels.end());
  for (double level : ordered) table.col_labels.push_back(format_double(level));
  std::vector<std::vector<Accumulator>> acc(
      2, std::vector<Accumulator>(ordered.size()));
  for (const auto& rec : log) {
    if (!rec.reward) continue;
    auto v = rec.context.find(context_var);
    if (!v) continue;
    const int row = rec.policy == PolicyTag::ContextualTS ? 0 : 1;
    const auto col = std::find(ordered.begin(), ordered.end(), *v);
    acc[row][col - ordered.begin()].add(*rec.reward);
  }
  for (const auto& row : acc) {
    std::vector<SummaryCell> cells;
    for (const auto& a : row) cells.push_back(a.cell());
    table.cells.push_back(std::move(cells));
  }
  return table;
}

std::vector<AllocationCell> allocation_dynamics(const AssignmentLog& log,
                                                int n_periods,
                                                const Factor& factor,
                                                bool equal_count_bins,
                                                const std::vector<double>& grid) {
  if (n_periods < 1) throw ValidationError("n_periods must be >= 1");
  if (log.empty()) return {};

  std::vector<std::string> categories;
  for (double g : grid) categories.push_back(format_double(g));
  categories.push_back("unrated");
  const auto category_of = [&](const AssignmentRecord& rec) -> std::size_t {
    if (!rec.reward) return categories.size() - 1;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] == *rec.reward) return i;
    }
    throw ValidationError("reward " + format_double(*rec.reward) +
                          " is not a grid value");
  };

  std::vector<int> period_of(log.size(), 0);
  if (equal_count_bins) {
    std::vector<std::size_t> order(log.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return log[a].timestamp < log[b].timestamp;
    });
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      period_of[order[pos]] =
          static_cast<int>(pos * static_cast<std::size_t>(n_periods) /
                           order.size());
    }
  } else {
    std::int64_t lo = log.front().timestamp, hi = log.front().timestamp;
    for (const auto& rec : log) {
      lo = std::min(lo, rec.timestamp);
      hi = std::max(hi, rec.timestamp);
    }
    const double span = static_cast<double>(hi - lo);
    for (std::size_t i = 0; i < log.size(); ++i) {
      int p = span <= 0.0 ? 0
                          : static_cast<int>(static_cast<double>(
                                                 log[i].timestamp - lo) /
                                             span * n_periods);
      period_of[i] = std::min(p, n_periods - 1);
    }
  }

  std::vector<long> counts(static_cast<std::size_t>(n_periods) *
                               factor.levels * categories.size(),
                           0);
  const auto slot = [&](int period, int arm, std::size_t cat) {
    return (static_cast<std::size_t>(period) * factor.levels + arm) *
               categories.size() +
           cat;
  };
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& rec = log[i];
    if (rec.arm < 0 || rec.arm >= factor.levels) {
      throw ValidationError("record arm " + std::to_string(rec.arm) +
                            " outside factor '" + factor.name + "'");
    }
    ++counts[slot(period_of[i], rec.arm, category_of(rec))];
  }

  std::vector<AllocationCell> out;
  out.reserve(counts.size());
  for (int p = 0; p < n_periods; ++p) {
    for (int arm = 0; arm < factor.levels; ++arm) {
      for (std::size_t c = 0; c < categories.size(); ++c) {
        out.push_back({p, arm, categories[c],
                       counts[slot(p, arm, c)]});
      }
    }
  }
  return out;
}

}  // namespace mabkit
