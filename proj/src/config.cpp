#include "mmhar/config.hpp"

#include <cstdlib>

#include "mmhar/hashing.hpp"
#include "mmhar/report_io.hpp"

namespace mmhar {

std::string to_string(DatasetKind d) {
  switch (d) {
    case DatasetKind::kUtdMhad: return "UTD_MHAD";
    case DatasetKind::kMmact: return "MMACT";
    case DatasetKind::kSynthetic: return "SYNTHETIC";
  }
  return "?";
}

std::string to_string(ModalityCondition m) {
  switch (m) {
    case ModalityCondition::kImu: return "IMU";
    case ModalityCondition::kVideo: return "VIDEO";
    case ModalityCondition::kFused: return "FUSED";
  }
  return "?";
}

std::string to_string(ExperimentKind e) {
  switch (e) {
    case ExperimentKind::kBaseline: return "BASELINE";
    case ExperimentKind::kRatioSweep: return "RATIO_SWEEP";
    case ExperimentKind::kZeroShot: return "ZERO_SHOT";
  }
  return "?";
}

namespace {

DatasetKind dataset_from_string(const std::string& s) {
  if (s == "UTD_MHAD") return DatasetKind::kUtdMhad;
  if (s == "MMACT") return DatasetKind::kMmact;
  if (s == "SYNTHETIC") return DatasetKind::kSynthetic;
  throw ConfigError("config: dataset must be UTD_MHAD, MMACT, or SYNTHETIC (got '" + s + "')");
}

ModalityCondition condition_from_string(const std::string& s) {
  if (s == "IMU") return ModalityCondition::kImu;
  if (s == "VIDEO") return ModalityCondition::kVideo;
  if (s == "FUSED") return ModalityCondition::kFused;
  throw ConfigError("config: modality_condition must be IMU, VIDEO, or FUSED (got '" + s + "')");
}

ExperimentKind experiment_from_string(const std::string& s) {
  if (s == "BASELINE") return ExperimentKind::kBaseline;
  if (s == "RATIO_SWEEP") return ExperimentKind::kRatioSweep;
  if (s == "ZERO_SHOT") return ExperimentKind::kZeroShot;
  throw ConfigError("config: experiment must be BASELINE, RATIO_SWEEP, or ZERO_SHOT (got '" + s +
                    "')");
}

void set_table(TrainHyperparams& h, double lr, double wd, int batch) {
  h.learning_rate = lr;
  h.weight_decay = wd;
  h.batch_size = batch;
}

}  // namespace

ExperimentConfig default_config(DatasetKind dataset) {
  ExperimentConfig cfg;
  cfg.dataset = dataset;
  switch (dataset) {
    case DatasetKind::kUtdMhad:
      set_table(cfg.stage1_imu, 1e-4, 1e-6, 128);
      set_table(cfg.stage1_video, 1e-3, 1e-5, 16);
      set_table(cfg.stage2, 5e-4, 5e-6, 16);
      cfg.preprocess = PreprocessConfig{50.0, 160, 15.0, 32, 224, 224};
      cfg.imu_encoder.in_channels = 6;
      cfg.imu_encoder.block_channels = {64, 128, 256};
      cfg.video_encoder.backbone = VideoBackbone::kS3d;
      cfg.video_encoder.input_shape = {32, 224, 224};
      cfg.video_encoder.trainable_groups = {"Mixed_4c", "Mixed_5c"};
      cfg.stage1_head_hidden = 512;
      cfg.fusion_head_hidden = 512;
      break;
    case DatasetKind::kMmact:
      set_table(cfg.stage1_imu, 5e-3, 5e-5, 256);
      set_table(cfg.stage1_video, 1e-3, 1e-5, 20);
      set_table(cfg.stage2, 1e-4, 1e-6, 18);
      cfg.preprocess = PreprocessConfig{50.0, 250, 30.0, 64, 224, 224};
      cfg.imu_encoder.in_channels = 12;
      cfg.imu_encoder.block_channels = {64, 128, 256};
      cfg.video_encoder.backbone = VideoBackbone::kS3d;
      cfg.video_encoder.input_shape = {64, 224, 224};
      cfg.video_encoder.trainable_groups = {"Mixed_4c", "Mixed_5c"};
      cfg.stage1_head_hidden = 512;
      cfg.fusion_head_hidden = 512;
      break;
    case DatasetKind::kSynthetic:
      // desk-scale defaults; no published values exist for this benchmark
      set_table(cfg.stage1_imu, 2e-3, 1e-6, 32);
      set_table(cfg.stage1_video, 2e-3, 1e-6, 32);
      set_table(cfg.stage2, 1e-3, 1e-6, 32);
      cfg.stage1_imu.max_epochs = 40;
      cfg.stage1_video.max_epochs = 40;
      cfg.stage2.max_epochs = 30;
      cfg.stage1_imu.patience = 8;
      cfg.stage1_video.patience = 8;
      cfg.stage2.patience = 10;
      cfg.imu_encoder.in_channels = cfg.synthetic.sensor_channels;
      cfg.imu_encoder.block_channels = {16, 32, 32};
      cfg.video_encoder.backbone = VideoBackbone::kMini3d;
      cfg.video_encoder.input_shape = cfg.synthetic.clip_shape;
      cfg.video_encoder.trainable_groups = {"Block_2", "Block_3"};
      cfg.stage1_head_hidden = 48;
      cfg.fusion_head_hidden = 64;
      break;
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  imu_encoder.validate();
  video_encoder.validate();
  stage1_imu.validate();
  stage1_video.validate();
  stage2.validate();
  if (dataset == DatasetKind::kSynthetic) {
    synthetic.validate();
    if (imu_encoder.in_channels != synthetic.sensor_channels) {
      throw ConfigError("config: imu_encoder.in_channels (" +
                        std::to_string(imu_encoder.in_channels) +
                        ") must equal synthetic.sensor_channels (" +
                        std::to_string(synthetic.sensor_channels) + ")");
    }
    if (video_encoder.input_shape != synthetic.clip_shape) {
      throw ConfigError("config: video_encoder.input_shape must equal synthetic.clip_shape");
    }
    if (static_cast<int>(synthetic.seq_len) < imu_encoder.min_input_length()) {
      throw ConfigError("config: synthetic.seq_len must be >= " +
                        std::to_string(imu_encoder.min_input_length()) +
                        " for the IMU kernel cascade");
    }
  }
  if (experiment == ExperimentKind::kRatioSweep) {
    if (sweep_ratios.empty() || sweep_seeds.empty()) {
      throw ConfigError("config: ratio sweep needs sweep_ratios and sweep_seeds");
    }
    for (double r : sweep_ratios) {
      if (!(r > 0.0 && r <= 1.0)) throw ConfigError("config: sweep ratios must lie in (0, 1]");
    }
  }
  if (experiment == ExperimentKind::kZeroShot) {
    if (zero_shot_hidden_counts.empty()) {
      throw ConfigError("config: zero-shot needs zero_shot_hidden_counts");
    }
    masked_modality_from_string(zero_shot_masked_modality);
  }
  if (output_dir.empty()) throw ConfigError("config: output_dir must be set");
}

PipelineSpec ExperimentConfig::pipeline_spec() const {
  PipelineSpec spec;
  spec.imu = imu_encoder;
  spec.video = video_encoder;
  spec.stage1_head_hidden = stage1_head_hidden;
  spec.fusion_head_hidden = fusion_head_hidden;
  spec.stage1_imu_hyper = stage1_imu;
  spec.stage1_video_hyper = stage1_video;
  spec.stage2_hyper = stage2;
  spec.seed = seed;
  return spec;
}

namespace {

nlohmann::json hyper_to_json(const TrainHyperparams& h) {
  return {{"learning_rate", h.learning_rate}, {"weight_decay", h.weight_decay},
          {"batch_size", h.batch_size},       {"max_epochs", h.max_epochs},
          {"patience", h.patience},           {"val_fraction", h.val_fraction}};
}

void hyper_from_json(const nlohmann::json& j, TrainHyperparams& h) {
  h.learning_rate = j.value("learning_rate", h.learning_rate);
  h.weight_decay = j.value("weight_decay", h.weight_decay);
  h.batch_size = j.value("batch_size", h.batch_size);
  h.max_epochs = j.value("max_epochs", h.max_epochs);
  h.patience = j.value("patience", h.patience);
  h.val_fraction = j.value("val_fraction", h.val_fraction);
}

}  // namespace

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["dataset"] = to_string(c.dataset);
  j["modality_condition"] = to_string(c.modality_condition);
  j["experiment"] = to_string(c.experiment);
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["data_root"] = c.data_root;
  j["cache_dir"] = c.cache_dir;

  j["synthetic"] = {{"num_imu_factors", c.synthetic.num_imu_factors},
                    {"num_video_factors", c.synthetic.num_video_factors},
                    {"samples_per_class", c.synthetic.samples_per_class},
                    {"test_samples_per_class", c.synthetic.test_samples_per_class},
                    {"noise_std", c.synthetic.noise_std},
                    {"seq_len", c.synthetic.seq_len},
                    {"clip_shape", c.synthetic.clip_shape},
                    {"sensor_channels", c.synthetic.sensor_channels}};
  j["preprocess"] = {{"sensor_rate_hz", c.preprocess.sensor_rate_hz},
                     {"sensor_len", c.preprocess.sensor_len},
                     {"video_fps", c.preprocess.video_fps},
                     {"video_frames", c.preprocess.video_frames},
                     {"video_height", c.preprocess.video_height},
                     {"video_width", c.preprocess.video_width}};
  j["imu_encoder"] = {{"in_channels", c.imu_encoder.in_channels},
                      {"block_channels", c.imu_encoder.block_channels},
                      {"kernel_sizes", c.imu_encoder.kernel_sizes},
                      {"dropout_rate", c.imu_encoder.dropout_rate},
                      {"expected_input_length", c.imu_encoder.expected_input_length}};
  j["video_encoder"] = {{"backbone", to_string(c.video_encoder.backbone)},
                        {"input_shape", c.video_encoder.input_shape},
                        {"mini_channels", c.video_encoder.mini_channels},
                        {"trainable_groups", c.video_encoder.trainable_groups},
                        {"checkpoint_path", c.video_encoder.checkpoint_path}};
  j["stage1_head_hidden"] = c.stage1_head_hidden;
  j["fusion_head_hidden"] = c.fusion_head_hidden;
  j["stage1_imu"] = hyper_to_json(c.stage1_imu);
  j["stage1_video"] = hyper_to_json(c.stage1_video);
  j["stage2"] = hyper_to_json(c.stage2);
  j["sweep_ratios"] = c.sweep_ratios;
  j["sweep_seeds"] = c.sweep_seeds;
  j["zero_shot_hidden_counts"] = c.zero_shot_hidden_counts;
  j["zero_shot_masked_modality"] = c.zero_shot_masked_modality;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");

  ExperimentConfig c = default_config(
      dataset_from_string(j.value("dataset", std::string("SYNTHETIC"))));

  if (j.contains("modality_condition")) {
    c.modality_condition = condition_from_string(j.at("modality_condition"));
  }
  if (j.contains("experiment")) c.experiment = experiment_from_string(j.at("experiment"));
  c.seed = j.value("seed", c.seed);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.data_root = j.value("data_root", c.data_root);
  c.cache_dir = j.value("cache_dir", c.cache_dir);

  if (j.contains("synthetic")) {
    const auto& s = j.at("synthetic");
    c.synthetic.num_imu_factors = s.value("num_imu_factors", c.synthetic.num_imu_factors);
    c.synthetic.num_video_factors = s.value("num_video_factors", c.synthetic.num_video_factors);
    c.synthetic.samples_per_class = s.value("samples_per_class", c.synthetic.samples_per_class);
    c.synthetic.test_samples_per_class =
        s.value("test_samples_per_class", c.synthetic.test_samples_per_class);
    c.synthetic.noise_std = s.value("noise_std", c.synthetic.noise_std);
    c.synthetic.seq_len = s.value("seq_len", c.synthetic.seq_len);
    if (s.contains("clip_shape")) c.synthetic.clip_shape = s.at("clip_shape");
    c.synthetic.sensor_channels = s.value("sensor_channels", c.synthetic.sensor_channels);
  }
  if (j.contains("preprocess")) {
    const auto& p = j.at("preprocess");
    c.preprocess.sensor_rate_hz = p.value("sensor_rate_hz", c.preprocess.sensor_rate_hz);
    c.preprocess.sensor_len = p.value("sensor_len", c.preprocess.sensor_len);
    c.preprocess.video_fps = p.value("video_fps", c.preprocess.video_fps);
    c.preprocess.video_frames = p.value("video_frames", c.preprocess.video_frames);
    c.preprocess.video_height = p.value("video_height", c.preprocess.video_height);
    c.preprocess.video_width = p.value("video_width", c.preprocess.video_width);
  }
  if (j.contains("imu_encoder")) {
    const auto& e = j.at("imu_encoder");
    c.imu_encoder.in_channels = e.value("in_channels", c.imu_encoder.in_channels);
    if (e.contains("block_channels")) c.imu_encoder.block_channels = e.at("block_channels");
    if (e.contains("kernel_sizes")) c.imu_encoder.kernel_sizes = e.at("kernel_sizes");
    c.imu_encoder.dropout_rate = e.value("dropout_rate", c.imu_encoder.dropout_rate);
    c.imu_encoder.expected_input_length =
        e.value("expected_input_length", c.imu_encoder.expected_input_length);
  }
  if (j.contains("video_encoder")) {
    const auto& e = j.at("video_encoder");
    if (e.contains("backbone")) {
      c.video_encoder.backbone = video_backbone_from_string(e.at("backbone"));
    }
    if (e.contains("input_shape")) c.video_encoder.input_shape = e.at("input_shape");
    if (e.contains("mini_channels")) c.video_encoder.mini_channels = e.at("mini_channels");
    if (e.contains("trainable_groups")) {
      c.video_encoder.trainable_groups = e.at("trainable_groups").get<std::vector<std::string>>();
    }
    c.video_encoder.checkpoint_path =
        e.value("checkpoint_path", c.video_encoder.checkpoint_path);
  }
  c.stage1_head_hidden = j.value("stage1_head_hidden", c.stage1_head_hidden);
  c.fusion_head_hidden = j.value("fusion_head_hidden", c.fusion_head_hidden);
  if (j.contains("stage1_imu")) hyper_from_json(j.at("stage1_imu"), c.stage1_imu);
  if (j.contains("stage1_video")) hyper_from_json(j.at("stage1_video"), c.stage1_video);
  if (j.contains("stage2")) hyper_from_json(j.at("stage2"), c.stage2);
  if (j.contains("sweep_ratios")) c.sweep_ratios = j.at("sweep_ratios").get<std::vector<double>>();
  if (j.contains("sweep_seeds")) {
    c.sweep_seeds = j.at("sweep_seeds").get<std::vector<std::uint64_t>>();
  }
  if (j.contains("zero_shot_hidden_counts")) {
    c.zero_shot_hidden_counts = j.at("zero_shot_hidden_counts").get<std::vector<int>>();
  }
  c.zero_shot_masked_modality =
      j.value("zero_shot_masked_modality", c.zero_shot_masked_modality);

  c.validate();
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const ConfigError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

nlohmann::json apply_override(nlohmann::json config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' must look like key.path=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(value);
  } catch (const nlohmann::json::exception&) {
    parsed = value;  // plain string
  }

  nlohmann::json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw ConfigError("override '" + assignment + "': empty key segment");
    if (dot == std::string::npos) {
      (*node)[part] = parsed;
      break;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
  return config;
}

std::string config_hash(const ExperimentConfig& config) {
  return hex64(fnv1a64(config_to_json(config).dump()));
}

}  // namespace mmhar
