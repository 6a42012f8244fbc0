#include <doctest.h>

#include <map>

#include "mmhar/experiments.hpp"
#include "mmhar/synthetic.hpp"

using namespace mmhar;

namespace {

SyntheticSpec tiny_spec() {
  SyntheticSpec spec;
  spec.num_imu_factors = 2;
  spec.num_video_factors = 2;
  spec.samples_per_class = 8;
  spec.noise_std = 0.15;
  spec.seq_len = 48;
  spec.clip_shape = {4, 8, 8};
  spec.sensor_channels = 2;
  return spec;
}

PipelineSpec tiny_pipeline(std::uint64_t seed) {
  PipelineSpec p;
  p.imu.in_channels = 2;
  p.imu.block_channels = {8, 8, 8};
  p.imu.dropout_rate = 0.1;
  p.video.backbone = VideoBackbone::kMini3d;
  p.video.mini_channels = {4, 6, 8};
  p.video.input_shape = {4, 8, 8};
  p.video.trainable_groups = {"Block_2", "Block_3"};
  p.stage1_head_hidden = 12;
  p.fusion_head_hidden = 16;
  for (TrainHyperparams* h : {&p.stage1_imu_hyper, &p.stage1_video_hyper, &p.stage2_hyper}) {
    h->learning_rate = 5e-3;
    h->weight_decay = 1e-6;
    h->batch_size = 16;
    h->max_epochs = 8;
    h->patience = 8;
    h->val_fraction = 0.1;
  }
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("two-stage runs are deterministic per seed") {
  const SyntheticSpec spec = tiny_spec();
  auto [train, test] = generate_synthetic_dataset(spec, 50);
  const InlineProvider provider;
  const PipelineSpec pipeline = tiny_pipeline(99);

  const TwoStageArtifacts a = run_two_stage(pipeline, train, provider);
  const TwoStageArtifacts b = run_two_stage(pipeline, train, provider);
  CHECK(params_equal(a.fused.model.imu, b.fused.model.imu));
  CHECK(params_equal(a.fused.model.video, b.fused.model.video));
  CHECK(params_equal(a.fused.model.head, b.fused.model.head));

  const MetricsReport ra = evaluate_fused(a.fused.model, test, provider, EvalCondition::kFused);
  const MetricsReport rb = evaluate_fused(b.fused.model, test, provider, EvalCondition::kFused);
  CHECK(ra.top1 == rb.top1);
  CHECK(ra.macro_f1 == rb.macro_f1);
}

TEST_CASE("ratio sweep: cell inventory, test split untouched, identity at 1.0") {
  const SyntheticSpec spec = tiny_spec();
  auto [train, test] = generate_synthetic_dataset(spec, 51);
  const InlineProvider provider;
  const PipelineSpec pipeline = tiny_pipeline(7);

  const auto cells = run_data_ratio_sweep(pipeline, train, test, provider, {0.5, 1.0}, {7});
  // 2 ratios x 3 conditions
  REQUIRE(cells.size() == 6);
  int fused_cells = 0;
  for (const auto& cell : cells) {
    CHECK(cell.error.empty());
    CHECK(cell.report.num_samples == static_cast<std::int64_t>(test.samples.size()));
    if (cell.condition == EvalCondition::kFused) ++fused_cells;
  }
  CHECK(fused_cells == 2);

  // ratio 1.0 equals a plain run with the same seed
  const TwoStageArtifacts plain = run_two_stage(pipeline, train, provider);
  const MetricsReport plain_report =
      evaluate_fused(plain.fused.model, test, provider, EvalCondition::kFused);
  for (const auto& cell : cells) {
    if (cell.ratio == 1.0 && cell.condition == EvalCondition::kFused) {
      CHECK(cell.report.top1 == plain_report.top1);
      CHECK(cell.report.macro_f1 == plain_report.macro_f1);
    }
  }

  CHECK_THROWS_AS(
      run_data_ratio_sweep(pipeline, train, test, provider, {0.0}, {1}), Error);
}

TEST_CASE("ratio sweep: a failing cell does not sink the others") {
  SyntheticSpec spec = tiny_spec();
  spec.samples_per_class = 2;  // ratio 0.5 -> 1 eligible sample/class; val split leaves it intact
  auto [train, test] = generate_synthetic_dataset(spec, 52);
  const InlineProvider provider;
  PipelineSpec pipeline = tiny_pipeline(3);
  pipeline.stage1_imu_hyper.max_epochs = 1;
  pipeline.stage1_video_hyper.max_epochs = 1;
  pipeline.stage2_hyper.max_epochs = 1;
  // poison one cell by making the learning rate explode at ratio 0.5 only is
  // not possible per-cell; instead check the error channel with an invalid
  // batch size via a crafted spec: empty train after masking all classes
  DatasetIndex empty_train = train;
  for (auto& s : empty_train.samples) {
    s.modality_mask.imu = false;
    s.modality_mask.video = false;
  }
  const auto cells =
      run_data_ratio_sweep(pipeline, empty_train, test, provider, {0.5, 1.0}, {3});
  REQUIRE(cells.size() == 2);  // one failed cell per ratio, no metric rows
  for (const auto& cell : cells) CHECK(!cell.error.empty());
}

TEST_CASE("zero-shot: hidden sets shared across conditions, audit leak-free") {
  const SyntheticSpec spec = tiny_spec();
  auto [train, test] = generate_synthetic_dataset(spec, 53);
  const InlineProvider provider;
  const PipelineSpec pipeline = tiny_pipeline(5);

  const ZeroShotReport report = run_zero_shot_experiment(pipeline, train, test, provider, {1},
                                                         MaskedModalityChoice::kBoth);
  REQUIRE(report.cells.size() == 4);

  std::map<std::string, const ZeroShotCell*> by_label;
  for (const auto& cell : report.cells) by_label[cell.condition_label] = &cell;
  REQUIRE(by_label.count("IMU-only"));
  REQUIRE(by_label.count("RGB-only"));
  REQUIRE(by_label.count("IMU*+RGB"));
  REQUIRE(by_label.count("RGB*+IMU"));

  // the same hidden set for every condition at a given count
  const auto& hidden = by_label["IMU-only"]->hidden_classes;
  CHECK(hidden.size() == 1);
  for (const auto& [label, cell] : by_label) {
    CHECK(cell->hidden_classes == hidden);
    CHECK(cell->hidden_class_recall.size() == 1);
  }

  // leak check: no (hidden-class sample, masked modality) consumption
  std::map<std::string, int> class_of;
  for (const auto& s : train.samples) class_of[s.sample_id] = s.class_id;
  const int hidden_class = *hidden.begin();
  for (const auto* cell : {by_label["IMU-only"], by_label["IMU*+RGB"]}) {
    for (const auto& rec : cell->audit) {
      if (rec.modality == Modality::kImu) CHECK(class_of.at(rec.sample_id) != hidden_class);
    }
  }
  for (const auto* cell : {by_label["RGB-only"], by_label["RGB*+IMU"]}) {
    for (const auto& rec : cell->audit) {
      if (rec.modality == Modality::kVideo) CHECK(class_of.at(rec.sample_id) != hidden_class);
    }
  }

  // masked_sample_ids lists exactly the hidden-class samples
  CHECK(by_label["IMU-only"]->masked_sample_ids.size() ==
        static_cast<std::size_t>(spec.samples_per_class));
}

TEST_CASE("zero-shot: hidden count 0 reproduces the baseline bit-exactly") {
  const SyntheticSpec spec = tiny_spec();
  auto [train, test] = generate_synthetic_dataset(spec, 54);
  const InlineProvider provider;
  const PipelineSpec pipeline = tiny_pipeline(11);

  const ZeroShotReport report = run_zero_shot_experiment(pipeline, train, test, provider, {0},
                                                         MaskedModalityChoice::kImu);
  REQUIRE(report.cells.size() == 2);

  const TwoStageArtifacts baseline = run_two_stage(pipeline, train, provider);
  const MetricsReport base_fused =
      evaluate_fused(baseline.fused.model, test, provider, EvalCondition::kFused);
  const MetricsReport base_imu = evaluate_unimodal(
      unimodal_from_stage1(pipeline, Modality::kImu, baseline.imu_stage1), test, provider);

  for (const auto& cell : report.cells) {
    if (cell.condition_label == "IMU*+RGB") {
      CHECK(cell.report.top1 == base_fused.top1);
      CHECK(cell.report.top5 == base_fused.top5);
      CHECK(cell.report.macro_f1 == base_fused.macro_f1);
    } else {
      CHECK(cell.condition_label == "IMU-only");
      CHECK(cell.report.top1 == base_imu.top1);
      CHECK(cell.report.macro_f1 == base_imu.macro_f1);
    }
  }
}

TEST_CASE("zero-shot rejects out-of-range hidden counts") {
  const SyntheticSpec spec = tiny_spec();
  auto [train, test] = generate_synthetic_dataset(spec, 55);
  const PipelineSpec pipeline = tiny_pipeline(1);
  CHECK_THROWS_AS(run_zero_shot_experiment(pipeline, train, test, InlineProvider{},
                                           {spec.num_classes()}, MaskedModalityChoice::kImu),
                  Error);
}

TEST_CASE("masked modality parsing") {
  CHECK(masked_modality_from_string("IMU") == MaskedModalityChoice::kImu);
  CHECK(masked_modality_from_string("VIDEO") == MaskedModalityChoice::kVideo);
  CHECK(masked_modality_from_string("BOTH") == MaskedModalityChoice::kBoth);
  CHECK_THROWS_AS(masked_modality_from_string("NEITHER"), ConfigError);
}
