#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "mabkit/errors.hpp"

namespace {

// Exit codes: 0 ok, 64 usage, 65 input parse, 70 runtime.
constexpr int kExitUsage = 64;
constexpr int kExitParse = 65;
constexpr int kExitRuntime = 70;

}  // namespace

int main(int argc, char** argv) {
  using namespace mabkit::cli;

  CLI::App app{"mabkit - contextual Thompson Sampling experiment testbed"};
  app.require_subcommand(1);

  std::vector<std::string> raw_argv(argv, argv + argc);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand(
      "simulate", "Run replicated trials and report rewards");
  simulate->add_option("--scenario", sim.scenario, "Built-in scenario (1-3)");
  simulate->add_option("--config", sim.config_file,
                       "Trial config JSON (flags override file values)");
  simulate->add_option("--n", sim.horizon, "Horizon (participants)");
  simulate->add_option("--reps", sim.reps, "Replications")->capture_default_str();
  simulate->add_option("--policy", sim.policy,
                       "ts | uniform | mixture | both (default both)");
  simulate->add_option("--mixture-p", sim.mixture_p,
                       "P(ContextualTS) for --policy mixture")
      ->capture_default_str();
  simulate->add_option("--v", sim.algo_v, "Algorithm noise scale v");
  simulate->add_option("--missing-prob", sim.missing_prob,
                       "Probability a reward goes unobserved");
  simulate->add_option("--update-every", sim.update_every,
                       "Posterior update cadence (rewarded observations)");
  simulate->add_option("--seed", sim.seed, "Master seed")
      ->envname("MABKIT_SEED")
      ->capture_default_str();
  simulate->add_option("--out", sim.out_dir, "Output directory")->required();
  simulate->add_option("--save-logs", sim.save_logs,
                       "Replication logs to write per policy")
      ->capture_default_str();
  simulate->add_option("--format", sim.format, "Log format: csv | jsonl")
      ->capture_default_str();
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = cores)")
      ->capture_default_str();

  EvaluateOptions eval;
  auto* evaluate = app.add_subcommand(
      "evaluate", "False-positive-rate and power tables over replications");
  evaluate->add_option("--scenario", eval.scenario, "Built-in scenario (1-3)")
      ->required();
  evaluate->add_option("--n", eval.horizons,
                       "Horizons (repeatable; default 100 1000)");
  evaluate->add_option("--reps", eval.reps, "Replications per cell")
      ->capture_default_str();
  evaluate->add_option("--policies", eval.policies, "ts | uniform | both")
      ->capture_default_str();
  evaluate->add_option("--effects", eval.effects,
                       "Effects to test (default: scenario set)");
  evaluate->add_option("--algo-v", eval.algo_v,
                       "Algorithm scale for ContextualTS data collection");
  evaluate->add_option("--sweep-v", eval.sweep_v,
                       "Extra algorithm scales for a sensitivity sweep");
  evaluate->add_option("--analysis-v", eval.analysis_v,
                       "Credible-interval scale (default: scenario value)");
  evaluate->add_option("--draws", eval.draws, "Posterior draws per interval")
      ->capture_default_str();
  evaluate->add_option("--update-every", eval.update_every,
                       "Posterior update cadence")
      ->capture_default_str();
  evaluate->add_option("--seed", eval.seed, "Master seed")
      ->envname("MABKIT_SEED")
      ->capture_default_str();
  evaluate->add_option("--out", eval.out_dir, "Output directory")->required();
  evaluate->add_option("--threads", eval.threads, "Worker threads (0 = cores)")
      ->capture_default_str();

  AnalyzeOptions ana;
  auto* analyze = app.add_subcommand(
      "analyze", "Deployment-style tables from an assignment log");
  analyze->add_option("--log", ana.log_path, "Log file (.csv or .jsonl)")
      ->required();
  analyze->add_option("--factor", ana.factors,
                      "Factor(s) to tabulate (default: all in the log)");
  analyze->add_option("--context-var", ana.context_vars,
                      "Context variable(s) for subgroup tables");
  analyze->add_option("--periods", ana.periods,
                      "Allocation-dynamics period count")
      ->capture_default_str();
  analyze->add_flag("--equal-count-bins", ana.equal_count_bins,
                    "Bin periods by record count instead of time span");
  analyze->add_option("--out", ana.out_dir, "Output directory")->required();

  ServeOptions srv;
  auto* serve = app.add_subcommand("serve", "Run the assignment service");
  serve->add_option("--config", srv.config_file, "Service config JSON");
  serve->add_option("--listen", srv.listen, "Listen address");
  serve->add_option("--port", srv.port, "Port (0 picks a free one)");
  serve->add_option("--data-dir", srv.data_dir, "Persistence directory");
  serve->add_option("--refresh-interval", srv.refresh_interval,
                    "Posterior refresh interval, seconds");
  serve->add_option("--seed", srv.seed, "Assignment randomness seed");

  auto* scenarios = app.add_subcommand(
      "scenarios", "Print built-in scenario definitions as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim, raw_argv);
    if (evaluate->parsed()) return run_evaluate(eval, raw_argv);
    if (analyze->parsed()) return run_analyze(ana, raw_argv);
    if (serve->parsed()) return run_serve(srv);
    if (scenarios->parsed()) return run_scenarios();
  } catch (const mabkit::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const mabkit::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
