#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>

#include "commands.hpp"
#include "manifest.hpp"
#include "mabkit/analytics.hpp"
#include "mabkit/errors.hpp"
#include "mabkit/log_io.hpp"
#include "mabkit/tables_io.hpp"

namespace mabkit::cli {

namespace {

std::string file_safe(const std::string& name) {
  std::string out;
  for (char c : name) {
    out += (std::isalnum(static_cast<unsigned char>(c)) != 0) ? c : '_';
  }
  return out;
}

/// Factors present in the log: level count inferred from the largest arm
/// index per decision point.
std::vector<Factor> infer_factors(const AssignmentLog& log) {
  std::map<std::string, int> max_arm;
  for (const auto& rec : log) {
    auto [it, inserted] = max_arm.emplace(rec.decision_point, rec.arm);
    if (!inserted) it->second = std::max(it->second, rec.arm);
  }
  std::vector<Factor> factors;
  for (const auto& [name, arm] : max_arm) {
    factors.push_back({name, std::max(arm + 1, 2), {}});
  }
  return factors;
}

}  // namespace

int run_analyze(const AnalyzeOptions& options,
                const std::vector<std::string>& argv) {
  const auto start = std::chrono::steady_clock::now();
  if (options.log_path.empty()) throw ValidationError("--log is required");
  if (options.out_dir.empty()) throw ValidationError("--out is required");
  if (options.periods < 1) throw ValidationError("--periods must be >= 1");

  const AssignmentLog log = load_log(options.log_path);
  if (log.empty()) {
    throw ParseError("log '" + options.log_path + "' has no records");
  }

  std::vector<Factor> factors = infer_factors(log);
  if (!options.factors.empty()) {
    std::vector<Factor> selected;
    for (const auto& name : options.factors) {
      auto it = std::find_if(factors.begin(), factors.end(),
                             [&](const Factor& f) { return f.name == name; });
      if (it == factors.end()) {
        throw ValidationError("factor '" + name + "' not present in the log");
      }
      selected.push_back(*it);
    }
    factors = std::move(selected);
  }

  std::vector<std::string> context_vars = options.context_vars;
  if (context_vars.empty()) context_vars = context_names_of(log);

  const std::filesystem::path out_dir(options.out_dir);
  std::filesystem::create_directories(out_dir);

  RunManifest manifest;
  manifest.command = "analyze";
  manifest.argv = argv;

  const auto emit_table = [&](const std::string& file,
                              const SummaryTable& table) {
    std::ofstream out(out_dir / (file + ".csv"));
    write_summary_table_csv(out, table);
    std::ofstream json_out(out_dir / (file + ".json"));
    json_out << summary_table_to_json(table).dump(2) << '\n';
    manifest.outputs.push_back(file + ".csv");
    manifest.outputs.push_back(file + ".json");
  };

  const auto engagement = engagement_summary(log);
  {
    std::ofstream out(out_dir / "engagement.json");
    out << engagement_to_json(engagement).dump(2) << '\n';
    std::ofstream csv(out_dir / "engagement.csv");
    csv << "assignments,rated,rate,unique_raters,unique_users\n"
        << engagement.assignments << ',' << engagement.rated << ',';
    if (engagement.rate) csv << format_double(*engagement.rate);
    csv << ',' << engagement.unique_raters << ',' << engagement.unique_users
        << '\n';
    manifest.outputs.push_back("engagement.json");
    manifest.outputs.push_back("engagement.csv");
  }

  for (const auto& factor : factors) {
    const std::string safe = file_safe(factor.name);
    emit_table("response_rate_" + safe, response_rate_table(log, factor));
    emit_table("reward_summary_" + safe, reward_summary_table(log, factor));
    const auto cells = allocation_dynamics(log, options.periods, factor,
                                           options.equal_count_bins);
    std::ofstream out(out_dir / ("allocation_" + safe + ".csv"));
    write_allocation_csv(out, cells);
    std::ofstream json_out(out_dir / ("allocation_" + safe + ".json"));
    json_out << allocation_to_json(cells).dump(2) << '\n';
    manifest.outputs.push_back("allocation_" + safe + ".csv");
    manifest.outputs.push_back("allocation_" + safe + ".json");
  }

  for (const auto& var : context_vars) {
    emit_table("subgroup_" + file_safe(var), subgroup_reward(log, var));
  }

  nlohmann::json factor_list = nlohmann::json::array();
  for (const auto& f : factors) factor_list.push_back(f.name);
  manifest.config = {{"log", options.log_path},
                     {"factors", factor_list},
                     {"context_vars", context_vars},
                     {"periods", options.periods},
                     {"equal_count_bins", options.equal_count_bins}};
  manifest.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  manifest.write(out_dir);

  std::cout << "analyze: wrote " << manifest.outputs.size() << " files to "
            << out_dir.string() << '\n';
  return 0;
}

}  // namespace mabkit::cli
