#include "mmhar/training.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mmhar/metrics.hpp"

namespace mmhar {

void TrainHyperparams::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("hyperparams: learning_rate must be positive");
  if (weight_decay < 0.0) throw ConfigError("hyperparams: weight_decay must be nonnegative");
  if (batch_size < 1) throw ConfigError("hyperparams: batch_size must be >= 1");
  if (max_epochs < 0) throw ConfigError("hyperparams: max_epochs must be >= 0");
  if (val_fraction < 0.0 || val_fraction >= 1.0) {
    throw ConfigError("hyperparams: val_fraction must be in [0, 1)");
  }
}

Tensor make_sensor_batch(const std::vector<const LabeledSample*>& samples,
                         const SampleProvider& provider) {
  if (samples.empty()) throw Error("make_sensor_batch: empty batch");
  std::vector<SensorSequence> seqs;
  seqs.reserve(samples.size());
  for (const auto* s : samples) seqs.push_back(provider.sensor(*s));

  const std::int64_t channels = seqs[0].channels();
  const std::int64_t len = seqs[0].timesteps();
  Tensor batch({static_cast<std::int64_t>(samples.size()), channels, len});
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (seqs[i].channels() != channels || seqs[i].timesteps() != len) {
      throw ShapeError("sensor batch: sample '" + samples[i]->sample_id + "' has shape " +
                       seqs[i].values.shape_string() + ", batch expects " +
                       Tensor::shape_string({channels, len}));
    }
    std::copy(seqs[i].values.data(), seqs[i].values.data() + channels * len,
              batch.data() + static_cast<std::int64_t>(i) * channels * len);
  }
  return batch;
}

Tensor make_video_batch(const std::vector<const LabeledSample*>& samples,
                        const SampleProvider& provider) {
  if (samples.empty()) throw Error("make_video_batch: empty batch");
  std::vector<VideoClip> clips;
  clips.reserve(samples.size());
  for (const auto* s : samples) clips.push_back(provider.video(*s));

  const std::int64_t t = clips[0].time(), h = clips[0].height(), w = clips[0].width();
  const std::int64_t n = static_cast<std::int64_t>(samples.size());
  Tensor batch({n, 3, t, h, w});
  for (std::int64_t i = 0; i < n; ++i) {
    const VideoClip& clip = clips[static_cast<std::size_t>(i)];
    if (clip.time() != t || clip.height() != h || clip.width() != w) {
      throw ShapeError("video batch: sample '" + samples[static_cast<std::size_t>(i)]->sample_id +
                       "' has clip " +
                       Tensor::shape_string({clip.time(), clip.height(), clip.width()}) +
                       ", batch expects " + Tensor::shape_string({t, h, w}));
    }
    // [T,H,W,3] -> [3,T,H,W]
    for (std::int64_t c = 0; c < 3; ++c) {
      double* dst = batch.data() + ((i * 3 + c) * t) * h * w;
      for (std::int64_t tt = 0; tt < t; ++tt) {
        for (std::int64_t yy = 0; yy < h; ++yy) {
          const double* src = clip.frames.data() + ((tt * h + yy) * w) * 3;
          for (std::int64_t xx = 0; xx < w; ++xx) dst[(tt * h + yy) * w + xx] = src[xx * 3 + c];
        }
      }
    }
  }
  return batch;
}

namespace {

/// Deterministic stratified carve-out: returns (train, val) position lists.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_val_split(
    const DatasetIndex& index, const std::vector<std::size_t>& eligible, double val_fraction,
    std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t pos : eligible) by_class[index.samples[pos].class_id].push_back(pos);

  std::vector<std::size_t> train, val;
  for (auto& [class_id, positions] : by_class) {
    Rng rng(derive_seed(seed, "valsplit/class_" + std::to_string(class_id)));
    rng.shuffle(positions);
    auto n_val = static_cast<std::size_t>(
        std::floor(val_fraction * static_cast<double>(positions.size())));
    if (n_val >= positions.size()) n_val = positions.size() - 1;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      (i < n_val ? val : train).push_back(positions[i]);
    }
  }
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  return {train, val};
}

std::vector<const LabeledSample*> gather(const DatasetIndex& index,
                                         const std::vector<std::size_t>& positions) {
  std::vector<const LabeledSample*> out;
  out.reserve(positions.size());
  for (std::size_t pos : positions) out.push_back(&index.samples[pos]);
  return out;
}

std::vector<int> labels_of(const std::vector<const LabeledSample*>& samples) {
  std::vector<int> labels;
  labels.reserve(samples.size());
  for (const auto* s : samples) labels.push_back(s->class_id);
  return labels;
}

void record_consumption(TrainingRun& run, const std::vector<const LabeledSample*>& samples,
                        Modality modality, int stage, int epoch) {
  for (const auto* s : samples) {
    if (!s->modality_mask.contains(modality)) {
      throw ContractError("training consumed sample '" + s->sample_id + "' for " +
                          to_string(modality) + " against its modality mask");
    }
    run.audit.push_back({s->sample_id, modality, stage, epoch});
  }
}

}  // namespace

Stage1Result train_stage1(const Stage1Config& config, const DatasetIndex& trainset,
                          const SampleProvider& provider) {
  config.hyper.validate();
  const Modality modality = config.modality;

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < trainset.samples.size(); ++i) {
    if (trainset.samples[i].eligible(modality)) eligible.push_back(i);
  }
  if (eligible.empty()) {
    throw TrainError("stage-1 " + to_string(modality) +
                     ": no eligible training samples (all masked or missing)");
  }

  const ImuEncoder imu_encoder(config.imu);
  const VideoEncoder video_encoder(config.video);
  const int feature_dim = modality == Modality::kImu ? config.imu.feature_dim()
                                                     : video_encoder.feature_dim();

  Stage1Result result;
  result.head_config = MlpHeadConfig{feature_dim, config.head_hidden_dim, trainset.num_classes};
  const MlpHead head(result.head_config);

  ModelParams enc_params = modality == Modality::kImu
                               ? imu_encoder.init(derive_seed(config.init_seed, "encoder"))
                               : video_encoder.init(derive_seed(config.init_seed, "encoder"));
  ModelParams head_params = head.init(derive_seed(config.init_seed, "head"));

  auto [train_pos, val_pos] = stratified_val_split(trainset, eligible, config.hyper.val_fraction,
                                                   config.hyper.seed);

  Rng shuffle_rng(derive_seed(config.hyper.seed, "stage1/shuffle"));
  Rng dropout_rng(derive_seed(config.hyper.seed, "stage1/dropout"));
  AdamWState enc_state, head_state;
  const OptimizerHyper opt{config.hyper.learning_rate, config.hyper.weight_decay};

  auto eval_val = [&](const ModelParams& enc, const ModelParams& hd) {
    if (val_pos.empty()) return std::pair<double, double>{0.0, 0.0};
    const auto samples = gather(trainset, val_pos);
    Tensor feats;
    if (modality == Modality::kImu) {
      feats = imu_encoder.forward(enc, make_sensor_batch(samples, provider), false);
    } else {
      feats = video_encoder.forward(enc, make_video_batch(samples, provider));
    }
    const Tensor logits = head.forward(hd, feats);
    const auto labels = labels_of(samples);
    return std::pair<double, double>{top_k_accuracy(logits, labels, 1),
                                     softmax_cross_entropy(logits, labels)};
  };

  ModelParams best_enc = enc_params;
  ModelParams best_head = head_params;
  double best_top1 = -1.0;
  double best_val_loss = 1e300;
  int stale = 0;

  for (int epoch = 1; epoch <= config.hyper.max_epochs; ++epoch) {
    shuffle_rng.shuffle(train_pos);
    double loss_sum = 0.0;
    int batches = 0;

    for (std::size_t start = 0; start < train_pos.size();
         start += static_cast<std::size_t>(config.hyper.batch_size)) {
      const std::size_t end =
          std::min(train_pos.size(), start + static_cast<std::size_t>(config.hyper.batch_size));
      const std::vector<std::size_t> chunk(train_pos.begin() + static_cast<std::ptrdiff_t>(start),
                                           train_pos.begin() + static_cast<std::ptrdiff_t>(end));
      const auto samples = gather(trainset, chunk);
      record_consumption(result.run, samples, modality, 1, epoch);
      const std::vector<int> labels = labels_of(samples);

      Tensor logits, dfeat;
      MlpHead::Cache head_cache;
      ImuEncoder::Cache imu_cache;
      VideoEncoder::Cache video_cache;
      if (modality == Modality::kImu) {
        const Tensor batch = make_sensor_batch(samples, provider);
        const Tensor feats =
            imu_encoder.forward(enc_params, batch, true, &dropout_rng, &imu_cache);
        logits = head.forward(head_params, feats, &head_cache);
      } else {
        const Tensor batch = make_video_batch(samples, provider);
        const Tensor feats = video_encoder.forward(enc_params, batch, &video_cache);
        logits = head.forward(head_params, feats, &head_cache);
      }

      Tensor dlogits;
      const double loss = softmax_cross_entropy(logits, labels, &dlogits);
      if (!std::isfinite(loss)) {
        throw TrainError("stage-1 " + to_string(modality) + ": loss diverged at epoch " +
                         std::to_string(epoch));
      }
      loss_sum += loss;
      ++batches;

      ModelParams head_grads = make_grad_store(head_params);
      ModelParams enc_grads = make_grad_store(enc_params);
      head.backward(head_params, head_cache, dlogits, &head_grads, &dfeat);
      if (modality == Modality::kImu) {
        imu_encoder.backward(enc_params, imu_cache, dfeat, &enc_grads);
      } else {
        video_encoder.backward(enc_params, video_cache, dfeat, &enc_grads);
      }
      optimizer_step(enc_params, enc_grads, enc_state, opt);
      optimizer_step(head_params, head_grads, head_state, opt);
    }

    if (!val_pos.empty()) {
      record_consumption(result.run, gather(trainset, val_pos), modality, 1, epoch);
    }
    const auto [val_top1, val_loss] = eval_val(enc_params, head_params);
    result.run.history.push_back({epoch, batches ? loss_sum / batches : 0.0, val_top1});
    result.run.epochs_run = epoch;

    if (val_pos.empty()) {
      best_enc = enc_params;
      best_head = head_params;
      result.run.best_epoch = epoch;
      continue;
    }
    // accuracy decides; a saturated accuracy falls back to validation loss
    if (val_top1 > best_top1 || (val_top1 == best_top1 && val_loss < best_val_loss)) {
      best_top1 = val_top1;
      best_val_loss = val_loss;
      best_enc = enc_params;
      best_head = head_params;
      result.run.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= config.hyper.patience) {
      break;
    }
  }

  result.encoder = std::move(best_enc);
  result.head = std::move(best_head);
  return result;
}

Stage2Result train_stage2(const Stage2Config& config, ModelParams imu_params,
                          ModelParams video_params, const DatasetIndex& trainset,
                          const SampleProvider& provider) {
  config.hyper.validate();

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < trainset.samples.size(); ++i) {
    const auto& s = trainset.samples[i];
    if (s.eligible(Modality::kImu) || s.eligible(Modality::kVideo)) eligible.push_back(i);
  }
  if (eligible.empty()) throw TrainError("stage-2: no sample offers any eligible modality");

  const ImuEncoder imu_encoder(config.imu);
  const VideoEncoder video_encoder(config.video);
  const std::int64_t d1 = config.imu.feature_dim();
  const std::int64_t d2 = video_encoder.feature_dim();

  // all IMU layers fine-tune; the video backbone freezes everything outside
  // the configured group set
  for (const auto& gname : imu_params.group_order) imu_params.group(gname).trainable = true;
  set_trainable_layers(video_params, config.video.trainable_groups, video_encoder.group_names());

  Stage2Result result;
  result.model.imu_config = config.imu;
  result.model.video_config = config.video;
  result.model.head_config =
      MlpHeadConfig{static_cast<int>(d1 + d2), config.head_hidden_dim, trainset.num_classes};
  const MlpHead head(result.model.head_config);
  ModelParams head_params = head.init(config.head_seed);

  auto [train_pos, val_pos] = stratified_val_split(trainset, eligible, config.hyper.val_fraction,
                                                   config.hyper.seed);

  Rng shuffle_rng(derive_seed(config.hyper.seed, "stage2/shuffle"));
  Rng dropout_rng(derive_seed(config.hyper.seed, "stage2/dropout"));
  AdamWState imu_state, video_state, head_state;
  const OptimizerHyper opt{config.hyper.learning_rate, config.hyper.weight_decay};

  // Fused features with the zero-vector policy for masked/missing
  // modalities; in training mode also returns per-modality row index maps
  // and caches for the backward pass.
  struct FusedForward {
    Tensor fused;
    std::vector<std::int64_t> imu_rows, video_rows;
    ImuEncoder::Cache imu_cache;
    VideoEncoder::Cache video_cache;
  };
  auto fused_forward = [&](const std::vector<const LabeledSample*>& samples,
                           const ModelParams& imu_p, const ModelParams& video_p, bool training,
                           FusedForward* ff) {
    const auto n = static_cast<std::int64_t>(samples.size());
    Tensor imu_feat({n, d1});
    Tensor video_feat({n, d2});
    std::vector<const LabeledSample*> imu_samples, video_samples;
    std::vector<std::int64_t> imu_rows, video_rows;
    for (std::int64_t i = 0; i < n; ++i) {
      if (samples[static_cast<std::size_t>(i)]->eligible(Modality::kImu)) {
        imu_samples.push_back(samples[static_cast<std::size_t>(i)]);
        imu_rows.push_back(i);
      }
      if (samples[static_cast<std::size_t>(i)]->eligible(Modality::kVideo)) {
        video_samples.push_back(samples[static_cast<std::size_t>(i)]);
        video_rows.push_back(i);
      }
    }
    if (!imu_samples.empty()) {
      const Tensor sub = imu_encoder.forward(imu_p, make_sensor_batch(imu_samples, provider),
                                             training, training ? &dropout_rng : nullptr,
                                             ff ? &ff->imu_cache : nullptr);
      for (std::size_t r = 0; r < imu_rows.size(); ++r) {
        std::copy(sub.data() + static_cast<std::int64_t>(r) * d1,
                  sub.data() + static_cast<std::int64_t>(r + 1) * d1,
                  imu_feat.data() + imu_rows[r] * d1);
      }
    }
    if (!video_samples.empty()) {
      const Tensor sub = video_encoder.forward(video_p, make_video_batch(video_samples, provider),
                                               ff ? &ff->video_cache : nullptr);
      for (std::size_t r = 0; r < video_rows.size(); ++r) {
        std::copy(sub.data() + static_cast<std::int64_t>(r) * d2,
                  sub.data() + static_cast<std::int64_t>(r + 1) * d2,
                  video_feat.data() + video_rows[r] * d2);
      }
    }
    if (ff) {
      ff->imu_rows = std::move(imu_rows);
      ff->video_rows = std::move(video_rows);
      ff->fused = fuse_features(imu_feat, video_feat);
      return ff->fused;
    }
    return fuse_features(imu_feat, video_feat);
  };

  auto eval_val = [&](const ModelParams& imu_p, const ModelParams& video_p,
                      const ModelParams& head_p) {
    if (val_pos.empty()) return std::pair<double, double>{0.0, 0.0};
    const auto samples = gather(trainset, val_pos);
    const Tensor fused = fused_forward(samples, imu_p, video_p, false, nullptr);
    const Tensor logits = head.forward(head_p, fused);
    const auto labels = labels_of(samples);
    return std::pair<double, double>{top_k_accuracy(logits, labels, 1),
                                     softmax_cross_entropy(logits, labels)};
  };

  ModelParams best_imu = imu_params, best_video = video_params, best_head = head_params;
  double best_top1 = -1.0;
  double best_val_loss = 1e300;
  int stale = 0;

  for (int epoch = 1; epoch <= config.hyper.max_epochs; ++epoch) {
    shuffle_rng.shuffle(train_pos);
    double loss_sum = 0.0;
    int batches = 0;

    for (std::size_t start = 0; start < train_pos.size();
         start += static_cast<std::size_t>(config.hyper.batch_size)) {
      const std::size_t end =
          std::min(train_pos.size(), start + static_cast<std::size_t>(config.hyper.batch_size));
      const std::vector<std::size_t> chunk(train_pos.begin() + static_cast<std::ptrdiff_t>(start),
                                           train_pos.begin() + static_cast<std::ptrdiff_t>(end));
      const auto samples = gather(trainset, chunk);
      const std::vector<int> labels = labels_of(samples);

      FusedForward ff;
      fused_forward(samples, imu_params, video_params, true, &ff);
      // the audit trail records exactly what was fed, per modality
      {
        std::vector<const LabeledSample*> imu_used, video_used;
        for (std::int64_t r : ff.imu_rows) imu_used.push_back(samples[static_cast<std::size_t>(r)]);
        for (std::int64_t r : ff.video_rows) video_used.push_back(samples[static_cast<std::size_t>(r)]);
        record_consumption(result.run, imu_used, Modality::kImu, 2, epoch);
        record_consumption(result.run, video_used, Modality::kVideo, 2, epoch);
      }

      MlpHead::Cache head_cache;
      const Tensor logits = head.forward(head_params, ff.fused, &head_cache);
      Tensor dlogits;
      const double loss = softmax_cross_entropy(logits, labels, &dlogits);
      if (!std::isfinite(loss)) {
        throw TrainError("stage-2: loss diverged at epoch " + std::to_string(epoch));
      }
      loss_sum += loss;
      ++batches;

      ModelParams head_grads = make_grad_store(head_params);
      ModelParams imu_grads = make_grad_store(imu_params);
      ModelParams video_grads = make_grad_store(video_params);

      Tensor dfused;
      head.backward(head_params, head_cache, dlogits, &head_grads, &dfused);
      Tensor dimu, dvideo;
      split_fused_gradient(dfused, d1, &dimu, &dvideo);

      // gradients flow only into rows that actually came from each encoder
      if (!ff.imu_rows.empty()) {
        Tensor dsub({static_cast<std::int64_t>(ff.imu_rows.size()), d1});
        for (std::size_t r = 0; r < ff.imu_rows.size(); ++r) {
          std::copy(dimu.data() + ff.imu_rows[r] * d1, dimu.data() + (ff.imu_rows[r] + 1) * d1,
                    dsub.data() + static_cast<std::int64_t>(r) * d1);
        }
        imu_encoder.backward(imu_params, ff.imu_cache, dsub, &imu_grads);
      }
      if (!ff.video_rows.empty()) {
        Tensor dsub({static_cast<std::int64_t>(ff.video_rows.size()), d2});
        for (std::size_t r = 0; r < ff.video_rows.size(); ++r) {
          std::copy(dvideo.data() + ff.video_rows[r] * d2,
                    dvideo.data() + (ff.video_rows[r] + 1) * d2,
                    dsub.data() + static_cast<std::int64_t>(r) * d2);
        }
        video_encoder.backward(video_params, ff.video_cache, dsub, &video_grads);
      }

      optimizer_step(head_params, head_grads, head_state, opt);
      if (!ff.imu_rows.empty()) optimizer_step(imu_params, imu_grads, imu_state, opt);
      if (!ff.video_rows.empty() && !video_grads.group_order.empty()) {
        optimizer_step(video_params, video_grads, video_state, opt);
      }
    }

    if (!val_pos.empty()) {
      const auto val_samples = gather(trainset, val_pos);
      std::vector<const LabeledSample*> imu_used, video_used;
      for (const auto* s : val_samples) {
        if (s->eligible(Modality::kImu)) imu_used.push_back(s);
        if (s->eligible(Modality::kVideo)) video_used.push_back(s);
      }
      record_consumption(result.run, imu_used, Modality::kImu, 2, epoch);
      record_consumption(result.run, video_used, Modality::kVideo, 2, epoch);
    }
    const auto [val_top1, val_loss] = eval_val(imu_params, video_params, head_params);
    result.run.history.push_back({epoch, batches ? loss_sum / batches : 0.0, val_top1});
    result.run.epochs_run = epoch;

    if (val_pos.empty()) {
      best_imu = imu_params;
      best_video = video_params;
      best_head = head_params;
      result.run.best_epoch = epoch;
      continue;
    }
    if (val_top1 > best_top1 || (val_top1 == best_top1 && val_loss < best_val_loss)) {
      best_top1 = val_top1;
      best_val_loss = val_loss;
      best_imu = imu_params;
      best_video = video_params;
      best_head = head_params;
      result.run.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= config.hyper.patience) {
      break;
    }
  }

  result.model.imu = std::move(best_imu);
  result.model.video = std::move(best_video);
  result.model.head = std::move(best_head);
  return result;
}

}  // namespace mmhar
