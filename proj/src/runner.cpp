#include "mmhar/runner.hpp"

#include <cstdlib>
#include <filesystem>

#include "mmhar/checkpoint.hpp"
#include "mmhar/datasets.hpp"

namespace fs = std::filesystem;

namespace mmhar {

namespace {

std::string resolve_data_root(const ExperimentConfig& config) {
  if (!config.data_root.empty()) return config.data_root;
  if (const char* env = std::getenv("MMHAR_DATA_ROOT")) return env;
  throw ConfigError("config: data_root is empty and MMHAR_DATA_ROOT is not set");
}

nlohmann::json environment_fingerprint() {
  nlohmann::json j;
  j["compiler"] = __VERSION__;
#if defined(__linux__)
  j["platform"] = "linux";
#elif defined(__APPLE__)
  j["platform"] = "darwin";
#else
  j["platform"] = "other";
#endif
  j["float_width_bits"] = sizeof(double) * 8;
  return j;
}

std::string out_path(const ExperimentConfig& config, const std::string& rel) {
  return (fs::path(config.output_dir) / rel).string();
}

}  // namespace

ExperimentData load_experiment_data(const ExperimentConfig& config) {
  ExperimentData data;
  data.dataset_name = to_string(config.dataset);
  switch (config.dataset) {
    case DatasetKind::kSynthetic: {
      auto [train, test] =
          generate_synthetic_dataset(config.synthetic, derive_seed(config.seed, "dataset"));
      data.train = std::move(train);
      data.test = std::move(test);
      data.provider = std::make_shared<InlineProvider>();
      break;
    }
    case DatasetKind::kUtdMhad: {
      LoadedDataset loaded = load_utd_mhad(resolve_data_root(config));
      data.train = std::move(loaded.train);
      data.test = std::move(loaded.test);
      data.provider = std::make_shared<FileProvider>("utd_mhad", config.preprocess,
                                                     config.cache_dir);
      break;
    }
    case DatasetKind::kMmact: {
      LoadedDataset loaded = load_mmact(resolve_data_root(config));
      data.train = std::move(loaded.train);
      data.test = std::move(loaded.test);
      data.provider = std::make_shared<FileProvider>("mmact", config.preprocess,
                                                     config.cache_dir);
      break;
    }
  }
  return data;
}

void write_manifest(const ExperimentConfig& config) {
  const std::string hash = config_hash(config);
  const std::string path = out_path(config, "manifest.json");
  if (fs::exists(path)) {
    const auto existing = nlohmann::json::parse(read_text_file(path));
    const std::string old_hash = existing.value("config_hash", "");
    if (old_hash != hash) {
      throw Error("output dir '" + config.output_dir + "' already holds a run with config hash " +
                  old_hash + "; refusing to overwrite with " + hash +
                  " (pick a fresh --output)");
    }
  }
  nlohmann::json manifest;
  manifest["config"] = config_to_json(config);
  manifest["config_hash"] = hash;
  manifest["environment"] = environment_fingerprint();
  write_text_file(path, manifest.dump(2) + "\n");
}

namespace {

SummaryRow make_row(const ExperimentConfig& config, const std::string& condition,
                    const MetricsReport& report, double ratio, int hidden_count,
                    std::uint64_t seed) {
  SummaryRow row;
  row.dataset = to_string(config.dataset);
  row.condition = condition;
  row.ratio = ratio;
  row.hidden_count = hidden_count;
  row.seed = seed;
  row.top1 = report.top1;
  row.top5 = report.top5;
  row.macro_f1 = report.macro_f1;
  return row;
}

MetricsReport stamp(MetricsReport report, const ExperimentConfig& config) {
  report.config_hash = config_hash(config);
  report.seed = config.seed;
  return report;
}

RunResult run_baseline(const ExperimentConfig& config, const ExperimentData& data) {
  const PipelineSpec spec = config.pipeline_spec();
  RunResult result;
  result.output_dir = config.output_dir;

  if (config.modality_condition == ModalityCondition::kFused) {
    const TwoStageArtifacts arts = run_two_stage(spec, data.train, *data.provider);
    save_stage1_checkpoint(out_path(config, "checkpoints/stage1_imu.npz"), Modality::kImu,
                           spec.imu, spec.video, arts.imu_stage1);
    save_stage1_checkpoint(out_path(config, "checkpoints/stage1_video.npz"), Modality::kVideo,
                           spec.imu, spec.video, arts.video_stage1);
    save_fused_checkpoint(out_path(config, "checkpoints/stage2_fused.npz"), arts.fused.model);

    write_training_log_jsonl(out_path(config, "logs/train_stage1_imu.jsonl"),
                             arts.imu_stage1.run, "stage1_imu");
    write_training_log_jsonl(out_path(config, "logs/train_stage1_video.jsonl"),
                             arts.video_stage1.run, "stage1_video");
    write_training_log_jsonl(out_path(config, "logs/train_stage2.jsonl"), arts.fused.run,
                             "stage2");
    write_audit_log_jsonl(out_path(config, "logs/audit_stage1_imu.jsonl"),
                          arts.imu_stage1.run.audit);
    write_audit_log_jsonl(out_path(config, "logs/audit_stage1_video.jsonl"),
                          arts.video_stage1.run.audit);
    write_audit_log_jsonl(out_path(config, "logs/audit_stage2.jsonl"), arts.fused.run.audit);

    const MetricsReport report = stamp(
        evaluate_fused(arts.fused.model, data.test, *data.provider, EvalCondition::kFused),
        config);
    write_metrics_report_json(out_path(config, "metrics/report_fused.json"), report,
                              data.dataset_name, "FUSED");
    result.rows.push_back(make_row(config, "FUSED", report, 1.0, 0, config.seed));
  } else {
    const Modality modality =
        config.modality_condition == ModalityCondition::kImu ? Modality::kImu : Modality::kVideo;
    const std::string tag = modality == Modality::kImu ? "imu" : "video";
    const std::string condition = modality == Modality::kImu ? "IMU-only" : "RGB-only";

    const Stage1Result stage1 = run_stage1_only(spec, modality, data.train, *data.provider);
    save_stage1_checkpoint(out_path(config, "checkpoints/stage1_" + tag + ".npz"), modality,
                           spec.imu, spec.video, stage1);
    write_training_log_jsonl(out_path(config, "logs/train_stage1_" + tag + ".jsonl"), stage1.run,
                             "stage1_" + tag);
    write_audit_log_jsonl(out_path(config, "logs/audit_stage1_" + tag + ".jsonl"),
                          stage1.run.audit);

    const MetricsReport report = stamp(
        evaluate_unimodal(unimodal_from_stage1(spec, modality, stage1), data.test,
                          *data.provider),
        config);
    write_metrics_report_json(out_path(config, "metrics/report_" + tag + ".json"), report,
                              data.dataset_name, condition);
    result.rows.push_back(make_row(config, condition, report, 1.0, 0, config.seed));
  }
  return result;
}

RunResult run_ratio_sweep(const ExperimentConfig& config, const ExperimentData& data) {
  RunResult result;
  result.output_dir = config.output_dir;
  const std::vector<SweepCell> cells =
      run_data_ratio_sweep(config.pipeline_spec(), data.train, data.test, *data.provider,
                           config.sweep_ratios, config.sweep_seeds);
  std::string errors;
  for (const auto& cell : cells) {
    if (!cell.error.empty()) {
      errors += "ratio=" + std::to_string(cell.ratio) + " seed=" + std::to_string(cell.seed) +
                ": " + cell.error + "\n";
      continue;
    }
    MetricsReport report = cell.report;
    report.config_hash = config_hash(config);
    result.rows.push_back(
        make_row(config, to_string(cell.condition), report, cell.ratio, 0, cell.seed));
  }
  if (!errors.empty()) write_text_file(out_path(config, "logs/sweep_errors.log"), errors);
  return result;
}

RunResult run_zero_shot(const ExperimentConfig& config, const ExperimentData& data) {
  RunResult result;
  result.output_dir = config.output_dir;
  const ZeroShotReport report = run_zero_shot_experiment(
      config.pipeline_spec(), data.train, data.test, *data.provider,
      config.zero_shot_hidden_counts,
      masked_modality_from_string(config.zero_shot_masked_modality));

  nlohmann::json detail = nlohmann::json::array();
  for (const auto& cell : report.cells) {
    MetricsReport stamped = cell.report;
    stamped.config_hash = config_hash(config);
    result.rows.push_back(make_row(config, cell.condition_label, stamped, 1.0,
                                   cell.hidden_count, config.seed));

    nlohmann::json cj;
    cj["hidden_count"] = cell.hidden_count;
    cj["condition"] = cell.condition_label;
    cj["hidden_classes"] = cell.hidden_classes;
    cj["top1"] = cell.report.top1;
    cj["top5"] = cell.report.top5;
    cj["macro_f1"] = cell.report.macro_f1;
    cj["hidden_class_recall"] = cell.hidden_class_recall;
    cj["masked_sample_ids"] = cell.masked_sample_ids;
    detail.push_back(std::move(cj));

    std::string tag = cell.condition_label + "_h" + std::to_string(cell.hidden_count);
    for (char& ch : tag) {
      if (ch == '*' || ch == '+') ch = '_';
    }
    write_audit_log_jsonl(out_path(config, "logs/audit_" + tag + ".jsonl"), cell.audit);
  }
  write_text_file(out_path(config, "metrics/zero_shot_report.json"), detail.dump(2) + "\n");
  return result;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const ExperimentData data = load_experiment_data(config);
  fs::create_directories(config.output_dir);
  write_manifest(config);

  RunResult result;
  switch (config.experiment) {
    case ExperimentKind::kBaseline: result = run_baseline(config, data); break;
    case ExperimentKind::kRatioSweep: result = run_ratio_sweep(config, data); break;
    case ExperimentKind::kZeroShot: result = run_zero_shot(config, data); break;
  }
  append_summary_csv(out_path(config, "summary.csv"), result.rows);
  return result;
}

RunResult evaluate_existing_run(const ExperimentConfig& config) {
  config.validate();
  const ExperimentData data = load_experiment_data(config);

  RunResult result;
  result.output_dir = config.output_dir;
  if (config.modality_condition == ModalityCondition::kFused) {
    const FusedModel model =
        load_fused_checkpoint(out_path(config, "checkpoints/stage2_fused.npz"));
    const MetricsReport report = stamp(
        evaluate_fused(model, data.test, *data.provider, EvalCondition::kFused), config);
    write_metrics_report_json(out_path(config, "metrics/report_fused_eval.json"), report,
                              data.dataset_name, "FUSED");
    result.rows.push_back(make_row(config, "FUSED", report, 1.0, 0, config.seed));
  } else {
    const std::string tag =
        config.modality_condition == ModalityCondition::kImu ? "imu" : "video";
    const std::string condition =
        config.modality_condition == ModalityCondition::kImu ? "IMU-only" : "RGB-only";
    const UnimodalModel model =
        load_stage1_checkpoint(out_path(config, "checkpoints/stage1_" + tag + ".npz"));
    const MetricsReport report = stamp(evaluate_unimodal(model, data.test, *data.provider),
                                       config);
    write_metrics_report_json(out_path(config, "metrics/report_" + tag + "_eval.json"), report,
                              data.dataset_name, condition);
    result.rows.push_back(make_row(config, condition, report, 1.0, 0, config.seed));
  }
  append_summary_csv(out_path(config, "summary.csv"), result.rows);
  return result;
}

}  // namespace mmhar
