#include <CLI11.hpp>

#include <iostream>

#include "mmhar/compare.hpp"
#include "mmhar/config.hpp"
#include "mmhar/plots.hpp"
#include "mmhar/runner.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
  std::int64_t seed = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
  cmd->add_option("--config", opts.config_path, "experiment config JSON")
      ->required(config_required);
  cmd->add_option("--override", opts.overrides, "config override key.path=value (repeatable)");
  cmd->add_option("--output", opts.output_dir, "output directory (overrides config)");
  cmd->add_option("--seed", opts.seed, "seed (overrides config)");
}

mmhar::ExperimentConfig resolve_config(const CommonOpts& opts) {
  nlohmann::json j = nlohmann::json::parse(mmhar::read_text_file(opts.config_path));
  for (const auto& assignment : opts.overrides) {
    j = mmhar::apply_override(std::move(j), assignment);
  }
  if (!opts.output_dir.empty()) j["output_dir"] = opts.output_dir;
  if (opts.seed >= 0) j["seed"] = static_cast<std::uint64_t>(opts.seed);
  return mmhar::config_from_json(j);
}

void print_rows(const mmhar::RunResult& result) {
  std::cout << mmhar::kSummaryCsvHeader << "\n";
  for (const auto& row : result.rows) std::cout << mmhar::format_summary_row(row) << "\n";
  std::cout << "artifacts: " << result.output_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage multimodal HAR pipeline (IMU 1D-CNN + video 3D-CNN, late fusion)"};
  app.require_subcommand(1);

  CommonOpts train_opts, eval_opts, sweep_opts, zs_opts;
  std::string plot_results, plot_out = "plots";
  std::vector<std::string> compare_dirs;
  std::string compare_out = "comparison";

  CLI::App* train = app.add_subcommand("train", "run the configured experiment (BASELINE)");
  add_common(train, train_opts);

  CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate checkpoints of a finished run");
  add_common(evaluate, eval_opts);

  CLI::App* sweep = app.add_subcommand("sweep-ratio", "training-data ratio sweep");
  add_common(sweep, sweep_opts);

  CLI::App* zero_shot = app.add_subcommand("zero-shot", "modality-masked zero-shot experiment");
  add_common(zero_shot, zs_opts);

  CLI::App* plot = app.add_subcommand("plot", "render plots from summary CSVs");
  plot->add_option("--results", plot_results, "directory holding run outputs")->required();
  plot->add_option("--output", plot_out, "plot output directory");

  CLI::App* compare = app.add_subcommand("compare", "tabulate two or more runs side by side");
  compare->add_option("--runs", compare_dirs, "run directories (>= 2)")->required();
  compare->add_option("--output", compare_out, "comparison output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed() || sweep->parsed() || zero_shot->parsed()) {
      const CommonOpts& opts =
          train->parsed() ? train_opts : (sweep->parsed() ? sweep_opts : zs_opts);
      mmhar::ExperimentConfig config = resolve_config(opts);
      if (sweep->parsed()) config.experiment = mmhar::ExperimentKind::kRatioSweep;
      if (zero_shot->parsed()) config.experiment = mmhar::ExperimentKind::kZeroShot;
      config.validate();
      print_rows(mmhar::run_experiment(config));
      return kOk;
    }
    if (evaluate->parsed()) {
      print_rows(mmhar::evaluate_existing_run(resolve_config(eval_opts)));
      return kOk;
    }
    if (plot->parsed()) {
      for (const auto& path : mmhar::emit_plots(plot_results, plot_out)) {
        std::cout << "wrote " << path << "\n";
      }
      return kOk;
    }
    if (compare->parsed()) {
      const mmhar::CompareResult result = mmhar::compare_runs(compare_dirs, compare_out);
      std::cout << mmhar::read_text_file(result.text_path);
      std::cout << "wrote " << result.csv_path << "\n";
      return kOk;
    }
  } catch (const mmhar::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kConfigError;
}
