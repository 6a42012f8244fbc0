#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mmhar/config.hpp"
#include "mmhar/report_io.hpp"
#include "mmhar/sample_provider.hpp"

namespace mmhar {

struct ExperimentData {
  DatasetIndex train;
  DatasetIndex test;
  std::shared_ptr<SampleProvider> provider;
  std::string dataset_name;
};

/// Resolves the configured dataset: generates the synthetic benchmark or
/// loads a real archive from data_root / $MMHAR_DATA_ROOT.
ExperimentData load_experiment_data(const ExperimentConfig& config);

struct RunResult {
  std::vector<SummaryRow> rows;
  std::string output_dir;
};

/// Runs the configured experiment end to end and writes checkpoints, metrics
/// JSON, the summary CSV, audit logs, and a run manifest under output_dir. A
/// manifest from a different config hash is never silently overwritten.
RunResult run_experiment(const ExperimentConfig& config);

/// Evaluates previously trained checkpoints in config.output_dir on the test
/// split and appends fresh summary rows.
RunResult evaluate_existing_run(const ExperimentConfig& config);

/// Writes or checks the manifest; throws when an existing manifest carries a
/// different config hash.
void write_manifest(const ExperimentConfig& config);

}  // namespace mmhar
