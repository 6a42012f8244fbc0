#include <doctest.h>

#include <cmath>

#include "mmhar/experiments.hpp"
#include "mmhar/synthetic.hpp"
#include "mmhar/training.hpp"
#include "mmhar/transforms.hpp"

using namespace mmhar;

namespace {

SyntheticSpec tiny_spec(double noise) {
  SyntheticSpec spec;
  spec.num_imu_factors = 2;
  spec.num_video_factors = 2;
  spec.samples_per_class = 6;
  spec.noise_std = noise;
  spec.seq_len = 48;
  spec.clip_shape = {4, 8, 8};
  spec.sensor_channels = 2;
  return spec;
}

ImuEncoderConfig tiny_imu() {
  ImuEncoderConfig cfg;
  cfg.in_channels = 2;
  cfg.block_channels = {8, 8, 8};
  cfg.dropout_rate = 0.1;
  return cfg;
}

VideoEncoderConfig tiny_video() {
  VideoEncoderConfig cfg;
  cfg.backbone = VideoBackbone::kMini3d;
  cfg.mini_channels = {4, 6, 8};
  cfg.input_shape = {4, 8, 8};
  cfg.trainable_groups = {"Block_2", "Block_3"};
  return cfg;
}

TrainHyperparams quick_hyper(int epochs) {
  TrainHyperparams h;
  h.learning_rate = 5e-3;
  h.weight_decay = 1e-6;
  h.batch_size = 16;
  h.max_epochs = epochs;
  h.patience = 50;
  h.val_fraction = 0.1;
  h.seed = 17;
  return h;
}

}  // namespace

TEST_CASE("optimizer: zero gradient leaves params unchanged; decay scales") {
  ModelParams params;
  auto& g = params.add_group("layer");
  g.add("weight", Tensor({3}, {1.0, -2.0, 0.5}));

  ModelParams grads = make_grad_store(params);
  AdamWState state;

  OptimizerHyper no_decay{0.1, 0.0};
  optimizer_step(params, grads, state, no_decay);
  CHECK(params.param("layer", "weight").values() == std::vector<double>{1.0, -2.0, 0.5});

  OptimizerHyper decay{0.1, 0.01};
  optimizer_step(params, grads, state, decay);
  CHECK(params.param("layer", "weight").values()[0] == doctest::Approx(1.0 * (1 - 0.1 * 0.01)));
  CHECK(params.param("layer", "weight").values()[1] == doctest::Approx(-2.0 * (1 - 0.1 * 0.01)));
}

TEST_CASE("optimizer: frozen group in grads is a contract violation") {
  ModelParams params;
  auto& g = params.add_group("frozen_layer");
  g.add("weight", Tensor({2}));
  g.trainable = false;

  ModelParams grads;
  grads.add_group("frozen_layer").add("weight", Tensor({2}));
  AdamWState state;
  CHECK_THROWS_AS(optimizer_step(params, grads, state, {}), ContractError);
}

TEST_CASE("optimizer: non-finite gradient raises") {
  ModelParams params;
  params.add_group("layer").add("weight", Tensor({2}));
  ModelParams grads = make_grad_store(params);
  grads.param("layer", "weight")[0] = std::nan("");
  AdamWState state;
  CHECK_THROWS_AS(optimizer_step(params, grads, state, {}), TrainError);
}

TEST_CASE("optimizer: adam moves against the gradient") {
  ModelParams params;
  params.add_group("layer").add("weight", Tensor({2}, {0.0, 0.0}));
  ModelParams grads = make_grad_store(params);
  grads.param("layer", "weight") = Tensor({2}, {1.0, -1.0});
  AdamWState state;
  optimizer_step(params, grads, state, {0.1, 0.0});
  CHECK(params.param("layer", "weight")[0] < 0.0);
  CHECK(params.param("layer", "weight")[1] > 0.0);
}

TEST_CASE("stage-1 IMU training learns the noiseless synthetic set") {
  const SyntheticSpec spec = tiny_spec(0.0);
  auto [train, test] = generate_synthetic_dataset(spec, 5);
  const InlineProvider provider;

  Stage1Config cfg;
  cfg.modality = Modality::kImu;
  cfg.imu = tiny_imu();
  cfg.video = tiny_video();
  cfg.head_hidden_dim = 16;
  cfg.hyper = quick_hyper(30);
  cfg.init_seed = 3;

  const Stage1Result result = train_stage1(cfg, train, provider);
  CHECK(result.run.epochs_run >= 1);
  CHECK(result.run.history.front().train_loss > result.run.history.back().train_loss);
  // the sensor stream pins down only factor a, so cross-entropy cannot fall
  // below ln(B) = ln 2; training should get close to that floor
  CHECK(result.run.history.back().train_loss < std::log(2.0) + 0.15);

  const UnimodalModel model{Modality::kImu, cfg.imu, cfg.video, result.head_config,
                            result.encoder, result.head};
  const MetricsReport report = evaluate_unimodal(model, test, provider);
  CHECK(report.top1 <= 0.75);
  CHECK(report.top1 >= 0.25);
}

TEST_CASE("stage-1 loss collapses when the modality fully determines the class") {
  // B = 1: the sensor alone separates all classes, so the optimization
  // sanity bound (final loss < 10% of initial) is attainable
  SyntheticSpec spec = tiny_spec(0.0);
  spec.num_imu_factors = 4;
  spec.num_video_factors = 1;
  auto [train, test] = generate_synthetic_dataset(spec, 31);

  Stage1Config cfg;
  cfg.modality = Modality::kImu;
  cfg.imu = tiny_imu();
  cfg.video = tiny_video();
  cfg.head_hidden_dim = 16;
  cfg.hyper = quick_hyper(40);
  cfg.init_seed = 3;

  const Stage1Result result = train_stage1(cfg, train, InlineProvider{});
  CHECK(result.run.history.back().train_loss <
        0.1 * result.run.history.front().train_loss);

  // and the trained model actually classifies: >= 0.99 training top-1
  const UnimodalModel model{Modality::kImu, cfg.imu, cfg.video, result.head_config,
                            result.encoder, result.head};
  const MetricsReport on_train = evaluate_unimodal(model, train, InlineProvider{});
  CHECK(on_train.top1 >= 0.99);
}

TEST_CASE("stage-1 errors: empty eligible set, no step taken") {
  const SyntheticSpec spec = tiny_spec(0.0);
  auto [train, test] = generate_synthetic_dataset(spec, 6);

  std::set<int> all_classes;
  for (int c = 0; c < spec.num_classes(); ++c) all_classes.insert(c);
  const DatasetIndex masked = mask_classes(train, Modality::kImu, all_classes);

  Stage1Config cfg;
  cfg.modality = Modality::kImu;
  cfg.imu = tiny_imu();
  cfg.video = tiny_video();
  cfg.hyper = quick_hyper(3);
  CHECK_THROWS_AS(train_stage1(cfg, masked, InlineProvider{}), TrainError);
}

TEST_CASE("stage-1 consumption audit respects the modality mask") {
  const SyntheticSpec spec = tiny_spec(0.1);
  auto [train, test] = generate_synthetic_dataset(spec, 7);
  const DatasetIndex masked = mask_classes(train, Modality::kImu, {0, 2});

  Stage1Config cfg;
  cfg.modality = Modality::kImu;
  cfg.imu = tiny_imu();
  cfg.video = tiny_video();
  cfg.head_hidden_dim = 8;
  cfg.hyper = quick_hyper(4);

  const Stage1Result result = train_stage1(cfg, masked, InlineProvider{});
  std::map<std::string, int> class_of;
  for (const auto& s : masked.samples) class_of[s.sample_id] = s.class_id;
  CHECK(!result.run.audit.empty());
  for (const auto& rec : result.run.audit) {
    CHECK(rec.modality == Modality::kImu);
    const int cls = class_of.at(rec.sample_id);
    CHECK(cls != 0);
    CHECK(cls != 2);
  }
}

TEST_CASE("stage-1 determinism: same config and seed, identical history and params") {
  const SyntheticSpec spec = tiny_spec(0.2);
  auto [train, test] = generate_synthetic_dataset(spec, 8);

  Stage1Config cfg;
  cfg.modality = Modality::kImu;
  cfg.imu = tiny_imu();
  cfg.video = tiny_video();
  cfg.head_hidden_dim = 8;
  cfg.hyper = quick_hyper(5);

  const Stage1Result a = train_stage1(cfg, train, InlineProvider{});
  const Stage1Result b = train_stage1(cfg, train, InlineProvider{});
  REQUIRE(a.run.history.size() == b.run.history.size());
  for (std::size_t i = 0; i < a.run.history.size(); ++i) {
    CHECK(a.run.history[i].train_loss == b.run.history[i].train_loss);
    CHECK(a.run.history[i].val_top1 == b.run.history[i].val_top1);
  }
  CHECK(params_equal(a.encoder, b.encoder));
  CHECK(params_equal(a.head, b.head));
}

TEST_CASE("stage-2: freeze contract and fine-tuning movement") {
  const SyntheticSpec spec = tiny_spec(0.15);
  auto [train, test] = generate_synthetic_dataset(spec, 9);
  const InlineProvider provider;

  PipelineSpec pipeline;
  pipeline.imu = tiny_imu();
  pipeline.video = tiny_video();
  pipeline.stage1_head_hidden = 8;
  pipeline.fusion_head_hidden = 16;
  pipeline.stage1_imu_hyper = quick_hyper(5);
  pipeline.stage1_video_hyper = quick_hyper(5);
  pipeline.stage2_hyper = quick_hyper(5);
  pipeline.seed = 21;

  const Stage1Result imu_stage1 = train_stage1(
      Stage1Config{Modality::kImu, pipeline.imu, pipeline.video, 8, pipeline.stage1_imu_hyper, 1},
      train, provider);
  const Stage1Result video_stage1 =
      train_stage1(Stage1Config{Modality::kVideo, pipeline.imu, pipeline.video, 8,
                                pipeline.stage1_video_hyper, 2},
                   train, provider);

  const std::uint64_t frozen_before = hash_group(video_stage1.encoder.group("Block_1"));
  const std::uint64_t b2_before = hash_group(video_stage1.encoder.group("Block_2"));
  const std::uint64_t imu_b1_before = hash_group(imu_stage1.encoder.group("block_1"));

  Stage2Config cfg;
  cfg.imu = pipeline.imu;
  cfg.video = pipeline.video;  // trainable: Block_2, Block_3
  cfg.head_hidden_dim = 16;
  cfg.hyper = quick_hyper(5);
  cfg.head_seed = 77;

  const Stage2Result result =
      train_stage2(cfg, imu_stage1.encoder, video_stage1.encoder, train, provider);

  // frozen group bitwise unchanged; trainable groups and IMU moved
  CHECK(hash_group(result.model.video.group("Block_1")) == frozen_before);
  CHECK(hash_group(result.model.video.group("Block_2")) != b2_before);
  CHECK(hash_group(result.model.imu.group("block_1")) != imu_b1_before);
  CHECK(!result.model.video.group("Block_1").trainable);
  CHECK(result.model.video.group("Block_2").trainable);

  // the audit covers both modalities
  bool saw_imu = false, saw_video = false;
  for (const auto& rec : result.run.audit) {
    saw_imu |= rec.modality == Modality::kImu;
    saw_video |= rec.modality == Modality::kVideo;
    CHECK(rec.stage == 2);
  }
  CHECK(saw_imu);
  CHECK(saw_video);
}

TEST_CASE("stage-2 with zero epochs returns inputs bitwise, head at fresh init") {
  const SyntheticSpec spec = tiny_spec(0.1);
  auto [train, test] = generate_synthetic_dataset(spec, 10);
  const InlineProvider provider;

  const ImuEncoder imu_enc(tiny_imu());
  const VideoEncoder video_enc(tiny_video());
  const ModelParams imu_params = imu_enc.init(4);
  const ModelParams video_params = video_enc.init(5);

  Stage2Config cfg;
  cfg.imu = tiny_imu();
  cfg.video = tiny_video();
  cfg.head_hidden_dim = 16;
  cfg.hyper = quick_hyper(0);
  cfg.head_seed = 99;

  const Stage2Result result = train_stage2(cfg, imu_params, video_params, train, provider);
  CHECK(params_equal(result.model.imu, imu_params));
  // trainability flags change on the video params, content must not
  for (const auto& gname : result.model.video.group_order) {
    CHECK(hash_group(result.model.video.group(gname)) ==
          hash_group(video_params.group(gname)));
  }
  const MlpHead head(result.model.head_config);
  CHECK(params_equal(result.model.head, head.init(99)));
  CHECK(result.run.history.empty());
}

TEST_CASE("stage-2: masked-modality samples feed zeros and skip the audit") {
  const SyntheticSpec spec = tiny_spec(0.1);
  auto [train, test] = generate_synthetic_dataset(spec, 11);
  const DatasetIndex masked = mask_classes(train, Modality::kImu, {1});
  const InlineProvider provider;

  const ImuEncoder imu_enc(tiny_imu());
  const VideoEncoder video_enc(tiny_video());

  Stage2Config cfg;
  cfg.imu = tiny_imu();
  cfg.video = tiny_video();
  cfg.head_hidden_dim = 16;
  cfg.hyper = quick_hyper(3);
  cfg.head_seed = 1;

  const Stage2Result result =
      train_stage2(cfg, imu_enc.init(6), video_enc.init(7), masked, provider);

  std::map<std::string, int> class_of;
  for (const auto& s : masked.samples) class_of[s.sample_id] = s.class_id;
  bool saw_video_for_class1 = false;
  for (const auto& rec : result.run.audit) {
    if (rec.modality == Modality::kImu) {
      CHECK(class_of.at(rec.sample_id) != 1);
    } else if (class_of.at(rec.sample_id) == 1) {
      saw_video_for_class1 = true;
    }
  }
  CHECK(saw_video_for_class1);
}

TEST_CASE("sensor batch assembly checks shapes") {
  const SyntheticSpec spec = tiny_spec(0.0);
  auto [train, test] = generate_synthetic_dataset(spec, 12);
  const InlineProvider provider;

  std::vector<const LabeledSample*> samples{&train.samples[0], &train.samples[1]};
  const Tensor batch = make_sensor_batch(samples, provider);
  CHECK(batch.shape() == std::vector<std::int64_t>{2, 2, 48});

  const Tensor clips = make_video_batch(samples, provider);
  CHECK(clips.shape() == std::vector<std::int64_t>{2, 3, 4, 8, 8});
  // channel-first transpose preserves values
  CHECK(clips.at(0, 0, 1, 2, 3) == train.samples[0].video->frames.at(1, 2, 3, 0));
  CHECK(clips.at(1, 2, 0, 5, 6) == train.samples[1].video->frames.at(0, 5, 6, 2));
}
