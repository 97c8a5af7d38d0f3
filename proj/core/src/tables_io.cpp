#include "mabkit/tables_io.hpp"

#include <nlohmann/json.hpp>
#include <ostream>

#include "mabkit/log_io.hpp"

namespace mabkit {

void write_evaluation_csv(std::ostream& out,
                          const std::vector<EvaluationRow>& rows) {
  out << "scenario,policy,N,effect,rate,mc_stderr,reps,seed\n";
  for (const auto& row : rows) {
    out << row.scenario_id << ',' << row.policy << ',' << row.horizon << ','
        << row.effect << ',' << format_double(row.rate) << ','
        << format_double(row.mc_stderr) << ',' << row.reps << ',' << row.seed
        << '\n';
  }
}

nlohmann::json evaluation_to_json(const std::vector<EvaluationRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows) {
    arr.push_back({{"scenario", row.scenario_id},
                   {"scenario_name", row.scenario},
                   {"policy", row.policy},
                   {"N", row.horizon},
                   {"effect", row.effect},
                   {"rate", row.rate},
                   {"mc_stderr", row.mc_stderr},
                   {"reps", row.reps},
                   {"seed", row.seed}});
  }
  return arr;
}

void write_reward_report_csv(std::ostream& out,
                             const std::vector<RewardReportRow>& rows) {
  out << "policy,subgroup,mean_reward,mc_stderr,reps\n";
  for (const auto& row : rows) {
    out << row.policy << ',' << row.subgroup << ','
        << format_double(row.mean_reward) << ','
        << format_double(row.mc_stderr) << ',' << row.reps_used << '\n';
  }
}

nlohmann::json reward_report_to_json(const std::vector<RewardReportRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows) {
    arr.push_back({{"policy", row.policy},
                   {"subgroup", row.subgroup},
                   {"mean_reward", row.mean_reward},
                   {"mc_stderr", row.mc_stderr},
                   {"reps", row.reps_used}});
  }
  return arr;
}

void write_summary_table_csv(std::ostream& out, const SummaryTable& table) {
  out << table.row_dimension << ',' << table.col_dimension
      << ",count,share,mean,sem\n";
  for (std::size_t r = 0; r < table.row_labels.size(); ++r) {
    const long total = table.row_total(r);
    for (std::size_t c = 0; c < table.col_labels.size(); ++c) {
      const auto& cell = table.cells[r][c];
      out << table.row_labels[r] << ',' << table.col_labels[c] << ','
          << cell.count << ',';
      if (total > 0) {
        out << format_double(static_cast<double>(cell.count) / total);
      }
      out << ',';
      if (cell.mean) out << format_double(*cell.mean);
      out << ',';
      if (cell.sem) out << format_double(*cell.sem);
      out << '\n';
    }
  }
}

nlohmann::json summary_table_to_json(const SummaryTable& table) {
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t r = 0; r < table.row_labels.size(); ++r) {
    const long total = table.row_total(r);
    for (std::size_t c = 0; c < table.col_labels.size(); ++c) {
      const auto& cell = table.cells[r][c];
      nlohmann::json doc{{table.row_dimension, table.row_labels[r]},
                         {table.col_dimension, table.col_labels[c]},
                         {"count", cell.count}};
      if (total > 0) {
        doc["share"] = static_cast<double>(cell.count) / total;
      }
      if (cell.mean) doc["mean"] = *cell.mean;
      if (cell.sem) doc["sem"] = *cell.sem;
      cells.push_back(std::move(doc));
    }
  }
  return nlohmann::json{{"title", table.title}, {"cells", cells}};
}

void write_allocation_csv(std::ostream& out,
                          const std::vector<AllocationCell>& cells) {
  out << "period,arm,reward_category,count\n";
  for (const auto& cell : cells) {
    out << cell.period << ',' << cell.arm << ',' << cell.category << ','
        << cell.count << '\n';
  }
}

nlohmann::json allocation_to_json(const std::vector<AllocationCell>& cells) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& cell : cells) {
    arr.push_back({{"period", cell.period},
                   {"arm", cell.arm},
                   {"reward_category", cell.category},
                   {"count", cell.count}});
  }
  return arr;
}

nlohmann::json engagement_to_json(const EngagementSummary& summary) {
  nlohmann::json doc{{"assignments", summary.assignments},
                     {"rated", summary.rated},
                     {"unique_raters", summary.unique_raters},
                     {"unique_users", summary.unique_users}};
  if (summary.rate) {
    doc["rate"] = *summary.rate;
  } else {
    doc["rate"] = nullptr;
  }
  return doc;
}

}  // namespace mabkit
