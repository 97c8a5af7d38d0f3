#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mabkit::cli {

struct SimulateOptions {
  int scenario = 0;             // 1..3, or 0 when a config file is given
  std::string config_file;
  long horizon = -1;            // -1 = keep config default
  int reps = 1;
  std::string policy;           // ts | uniform | mixture | both
  double mixture_p = 0.5;
  double algo_v = -1.0;         // algorithm noise scale; -1 = keep default
  double missing_prob = -1.0;
  int update_every = 0;         // 0 = keep default
  std::uint64_t seed = 42;
  std::string out_dir;
  int save_logs = 1;
  std::string format = "csv";   // csv | jsonl
  int threads = 0;                // 0 = available cores
};

struct EvaluateOptions {
  int scenario = 0;
  std::vector<long> horizons;
  int reps = 1000;
  std::string policies = "both";
  std::vector<std::string> effects;
  double algo_v = -1.0;             // -1 = calibrated default
  std::vector<double> sweep_v;      // optional sensitivity sweep
  double analysis_v = -1.0;         // -1 = scenario default
  int draws = 10000;
  int update_every = 1;
  std::uint64_t seed = 42;
  std::string out_dir;
  int threads = 0;  // 0 = available cores
};

struct AnalyzeOptions {
  std::string log_path;
  std::vector<std::string> factors;       // default: infer from the log
  std::vector<std::string> context_vars;  // default: all context columns
  int periods = 4;
  bool equal_count_bins = false;
  std::string out_dir;
};

struct ServeOptions {
  std::string config_file;
  std::string listen;          // empty = keep config
  int port = -1;               // -1 = keep config
  std::string data_dir;        // empty = keep config
  int refresh_interval = -1;   // -1 = keep config
  long long seed = -1;         // -1 = keep config
};

int run_simulate(const SimulateOptions& options,
                 const std::vector<std::string>& argv);
int run_evaluate(const EvaluateOptions& options,
                 const std::vector<std::string>& argv);
int run_analyze(const AnalyzeOptions& options,
                const std::vector<std::string>& argv);
int run_serve(const ServeOptions& options);
int run_scenarios();

}  // namespace mabkit::cli
