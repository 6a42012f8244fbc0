#include "mmhar/experiments.hpp"

#include <algorithm>

namespace mmhar {

namespace {

Stage1Config stage1_config(const PipelineSpec& spec, Modality modality) {
  Stage1Config cfg;
  cfg.modality = modality;
  cfg.imu = spec.imu;
  cfg.video = spec.video;
  cfg.head_hidden_dim = spec.stage1_head_hidden;
  cfg.hyper = modality == Modality::kImu ? spec.stage1_imu_hyper : spec.stage1_video_hyper;
  const std::string tag = modality == Modality::kImu ? "stage1_imu" : "stage1_video";
  cfg.init_seed = derive_seed(spec.seed, tag + "/init");
  cfg.hyper.seed = derive_seed(spec.seed, tag + "/train");
  return cfg;
}

}  // namespace

Stage1Result run_stage1_only(const PipelineSpec& spec, Modality modality,
                             const DatasetIndex& train, const SampleProvider& provider) {
  return train_stage1(stage1_config(spec, modality), train, provider);
}

TwoStageArtifacts run_two_stage(const PipelineSpec& spec, const DatasetIndex& train,
                                const SampleProvider& provider) {
  TwoStageArtifacts out;
  out.imu_stage1 = train_stage1(stage1_config(spec, Modality::kImu), train, provider);
  out.video_stage1 = train_stage1(stage1_config(spec, Modality::kVideo), train, provider);

  Stage2Config cfg;
  cfg.imu = spec.imu;
  cfg.video = spec.video;
  cfg.head_hidden_dim = spec.fusion_head_hidden;
  cfg.hyper = spec.stage2_hyper;
  cfg.hyper.seed = derive_seed(spec.seed, "stage2/train");
  cfg.head_seed = derive_seed(spec.seed, "stage2/head_init");
  out.fused = train_stage2(cfg, out.imu_stage1.encoder, out.video_stage1.encoder, train, provider);
  return out;
}

UnimodalModel unimodal_from_stage1(const PipelineSpec& spec, Modality modality,
                                   const Stage1Result& stage1) {
  UnimodalModel model;
  model.modality = modality;
  model.imu_config = spec.imu;
  model.video_config = spec.video;
  model.head_config = stage1.head_config;
  model.encoder = stage1.encoder;
  model.head = stage1.head;
  return model;
}

std::vector<SweepCell> run_data_ratio_sweep(const PipelineSpec& base, const DatasetIndex& train,
                                            const DatasetIndex& test,
                                            const SampleProvider& provider,
                                            const std::vector<double>& ratios,
                                            const std::vector<std::uint64_t>& seeds) {
  for (double r : ratios) {
    if (!(r > 0.0 && r <= 1.0)) throw Error("ratio sweep: ratios must lie in (0, 1]");
  }

  std::vector<SweepCell> cells;
  for (std::uint64_t seed : seeds) {
    for (double ratio : ratios) {
      PipelineSpec spec = base;
      spec.seed = seed;
      SweepCell base_cell;
      base_cell.ratio = ratio;
      base_cell.seed = seed;
      try {
        const DatasetIndex subset =
            subset_by_ratio(train, ratio, derive_seed(seed, "ratio_subset"));
        const TwoStageArtifacts arts = run_two_stage(spec, subset, provider);

        auto push = [&](EvalCondition condition, MetricsReport report) {
          SweepCell cell = base_cell;
          cell.condition = condition;
          report.seed = seed;
          cell.report = report;
          cells.push_back(std::move(cell));
        };
        push(EvalCondition::kImuOnly,
             evaluate_unimodal(unimodal_from_stage1(spec, Modality::kImu, arts.imu_stage1), test,
                               provider));
        push(EvalCondition::kVideoOnly,
             evaluate_unimodal(unimodal_from_stage1(spec, Modality::kVideo, arts.video_stage1),
                               test, provider));
        push(EvalCondition::kFused,
             evaluate_fused(arts.fused.model, test, provider, EvalCondition::kFused));
      } catch (const std::exception& e) {
        SweepCell failed = base_cell;
        failed.error = e.what();
        cells.push_back(std::move(failed));
      }
    }
  }
  return cells;
}

MaskedModalityChoice masked_modality_from_string(const std::string& name) {
  if (name == "IMU" || name == "imu") return MaskedModalityChoice::kImu;
  if (name == "VIDEO" || name == "video" || name == "RGB") return MaskedModalityChoice::kVideo;
  if (name == "BOTH" || name == "both") return MaskedModalityChoice::kBoth;
  throw ConfigError("zero-shot masked modality must be IMU, VIDEO, or BOTH (got '" + name + "')");
}

namespace {

std::set<int> pick_hidden_classes(std::uint64_t base_seed, int hidden_count, int num_classes) {
  Rng rng(derive_seed(base_seed, "zero_shot/hidden/" + std::to_string(hidden_count)));
  const std::vector<int> picks = rng.sample_without_replacement(num_classes, hidden_count);
  return {picks.begin(), picks.end()};
}

std::vector<double> recall_of_hidden(const Tensor& logits, const DatasetIndex& test,
                                     const std::set<int>& hidden) {
  std::vector<int> labels;
  labels.reserve(test.samples.size());
  for (const auto& s : test.samples) labels.push_back(s.class_id);
  const std::vector<double> recall =
      per_class_recall(argmax_rows(logits), labels, test.num_classes);
  std::vector<double> out;
  for (int c : hidden) out.push_back(recall[static_cast<std::size_t>(c)]);
  return out;
}

}  // namespace

ZeroShotReport run_zero_shot_experiment(const PipelineSpec& base, const DatasetIndex& train,
                                        const DatasetIndex& test, const SampleProvider& provider,
                                        const std::vector<int>& hidden_counts,
                                        MaskedModalityChoice choice) {
  for (int count : hidden_counts) {
    if (count < 0 || count >= train.num_classes) {
      throw Error("zero-shot: hidden count " + std::to_string(count) + " must lie in [0, " +
                  std::to_string(train.num_classes) + ")");
    }
  }

  const bool run_imu = choice != MaskedModalityChoice::kVideo;
  const bool run_video = choice != MaskedModalityChoice::kImu;

  ZeroShotReport report;
  for (int count : hidden_counts) {
    const std::set<int> hidden = pick_hidden_classes(base.seed, count, train.num_classes);

    auto make_cell = [&](const std::string& label, const std::set<int>& classes) {
      ZeroShotCell cell;
      cell.hidden_count = count;
      cell.condition_label = label;
      cell.hidden_classes = classes;
      return cell;
    };

    if (run_imu) {
      MaskAudit mask_audit;
      const DatasetIndex masked = mask_classes(train, Modality::kImu, hidden, &mask_audit);

      {  // zero-shot IMU, unimodal
        ZeroShotCell cell = make_cell("IMU-only", hidden);
        cell.masked_sample_ids = mask_audit.affected_sample_ids;
        const Stage1Result stage1 = run_stage1_only(base, Modality::kImu, masked, provider);
        const UnimodalModel model = unimodal_from_stage1(base, Modality::kImu, stage1);
        const Tensor logits = unimodal_model_logits(model, test, provider);
        std::vector<int> labels;
        for (const auto& s : test.samples) labels.push_back(s.class_id);
        cell.report = compute_metrics(logits, labels, test.num_classes);
        cell.report.seed = base.seed;
        cell.hidden_class_recall = recall_of_hidden(logits, test, hidden);
        cell.audit = stage1.run.audit;
        report.cells.push_back(std::move(cell));
      }
      {  // classes hidden from IMU, fused training sees them through video
        ZeroShotCell cell = make_cell("IMU*+RGB", hidden);
        cell.masked_sample_ids = mask_audit.affected_sample_ids;
        const TwoStageArtifacts arts = run_two_stage(base, masked, provider);
        const Tensor logits =
            fused_model_logits(arts.fused.model, test, provider, EvalCondition::kFused);
        std::vector<int> labels;
        for (const auto& s : test.samples) labels.push_back(s.class_id);
        cell.report = compute_metrics(logits, labels, test.num_classes);
        cell.report.seed = base.seed;
        cell.hidden_class_recall = recall_of_hidden(logits, test, hidden);
        cell.audit = arts.imu_stage1.run.audit;
        cell.audit.insert(cell.audit.end(), arts.video_stage1.run.audit.begin(),
                          arts.video_stage1.run.audit.end());
        cell.audit.insert(cell.audit.end(), arts.fused.run.audit.begin(),
                          arts.fused.run.audit.end());
        report.cells.push_back(std::move(cell));
      }
    }

    if (run_video) {
      MaskAudit mask_audit;
      const DatasetIndex masked = mask_classes(train, Modality::kVideo, hidden, &mask_audit);

      {
        ZeroShotCell cell = make_cell("RGB-only", hidden);
        cell.masked_sample_ids = mask_audit.affected_sample_ids;
        const Stage1Result stage1 = run_stage1_only(base, Modality::kVideo, masked, provider);
        const UnimodalModel model = unimodal_from_stage1(base, Modality::kVideo, stage1);
        const Tensor logits = unimodal_model_logits(model, test, provider);
        std::vector<int> labels;
        for (const auto& s : test.samples) labels.push_back(s.class_id);
        cell.report = compute_metrics(logits, labels, test.num_classes);
        cell.report.seed = base.seed;
        cell.hidden_class_recall = recall_of_hidden(logits, test, hidden);
        cell.audit = stage1.run.audit;
        report.cells.push_back(std::move(cell));
      }
      {
        ZeroShotCell cell = make_cell("RGB*+IMU", hidden);
        cell.masked_sample_ids = mask_audit.affected_sample_ids;
        const TwoStageArtifacts arts = run_two_stage(base, masked, provider);
        const Tensor logits =
            fused_model_logits(arts.fused.model, test, provider, EvalCondition::kFused);
        std::vector<int> labels;
        for (const auto& s : test.samples) labels.push_back(s.class_id);
        cell.report = compute_metrics(logits, labels, test.num_classes);
        cell.report.seed = base.seed;
        cell.hidden_class_recall = recall_of_hidden(logits, test, hidden);
        cell.audit = arts.imu_stage1.run.audit;
        cell.audit.insert(cell.audit.end(), arts.video_stage1.run.audit.begin(),
                          arts.video_stage1.run.audit.end());
        cell.audit.insert(cell.audit.end(), arts.fused.run.audit.begin(),
                          arts.fused.run.audit.end());
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

}  // namespace mmhar
