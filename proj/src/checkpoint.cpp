#include "mmhar/checkpoint.hpp"

#include "mmhar/config_json.hpp"
#include "mmhar/evaluation.hpp"
#include "mmhar/npz.hpp"
#include "mmhar/training.hpp"

namespace mmhar {

void save_params_archive(const std::string& path, const ModelParams& params,
                         const nlohmann::json& meta) {
  NpzWriter writer;
  nlohmann::json header;
  header["format"] = "mmhar-params-v1";
  header["meta"] = meta;
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& gname : params.group_order) {
    const ParamGroup& g = params.group(gname);
    nlohmann::json gj;
    gj["name"] = gname;
    gj["trainable"] = g.trainable;
    gj["arrays"] = g.order;
    groups.push_back(std::move(gj));
    for (const auto& pname : g.order) {
      writer.add(gname + "/" + pname, g.at(pname));
    }
  }
  header["groups"] = std::move(groups);
  writer.add_bytes("__header_json__", header.dump());
  writer.save(path);
}

ModelParams load_params_archive(const std::string& path, nlohmann::json* meta_out) {
  const NpzArchive archive = NpzArchive::load(path);
  const auto header = nlohmann::json::parse(archive.at("__header_json__").text());
  if (header.value("format", "") != "mmhar-params-v1") {
    throw LoadError("checkpoint '" + path + "': unrecognized format");
  }
  if (meta_out) *meta_out = header.value("meta", nlohmann::json::object());

  ModelParams params;
  for (const auto& gj : header.at("groups")) {
    ParamGroup& g = params.add_group(gj.at("name"));
    g.trainable = gj.at("trainable");
    for (const auto& pname : gj.at("arrays")) {
      const std::string key = std::string(gj.at("name")) + "/" + std::string(pname);
      g.add(pname, archive.at(key).tensor());
    }
  }
  return params;
}

namespace {

ModelParams with_prefix(const ModelParams& params, const std::string& prefix) {
  ModelParams out;
  for (const auto& gname : params.group_order) {
    const ParamGroup& g = params.group(gname);
    ParamGroup& target = out.add_group(prefix + gname);
    target.trainable = g.trainable;
    for (const auto& pname : g.order) target.add(pname, g.at(pname));
  }
  return out;
}

ModelParams strip_prefix(const ModelParams& params, const std::string& prefix) {
  ModelParams out;
  for (const auto& gname : params.group_order) {
    if (gname.rfind(prefix, 0) != 0) continue;
    const ParamGroup& g = params.group(gname);
    ParamGroup& target = out.add_group(gname.substr(prefix.size()));
    target.trainable = g.trainable;
    for (const auto& pname : g.order) target.add(pname, g.at(pname));
  }
  return out;
}

ModelParams merge_bundles(std::initializer_list<ModelParams> bundles) {
  ModelParams out;
  for (const auto& b : bundles) {
    for (const auto& gname : b.group_order) {
      const ParamGroup& g = b.group(gname);
      ParamGroup& target = out.add_group(gname);
      target.trainable = g.trainable;
      for (const auto& pname : g.order) target.add(pname, g.at(pname));
    }
  }
  return out;
}

}  // namespace

void save_fused_checkpoint(const std::string& path, const FusedModel& model) {
  nlohmann::json meta;
  meta["kind"] = "fused";
  meta["imu_config"] = model.imu_config;
  meta["video_config"] = model.video_config;
  meta["head_config"] = model.head_config;
  const ModelParams bundle = merge_bundles({with_prefix(model.imu, "imu/"),
                                            with_prefix(model.video, "video/"),
                                            with_prefix(model.head, "head/")});
  save_params_archive(path, bundle, meta);
}

FusedModel load_fused_checkpoint(const std::string& path) {
  nlohmann::json meta;
  const ModelParams bundle = load_params_archive(path, &meta);
  if (meta.value("kind", "") != "fused") {
    throw LoadError("checkpoint '" + path + "': not a fused-model checkpoint");
  }
  FusedModel model;
  model.imu_config = meta.at("imu_config").get<ImuEncoderConfig>();
  model.video_config = meta.at("video_config").get<VideoEncoderConfig>();
  model.head_config = meta.at("head_config").get<MlpHeadConfig>();
  model.imu = strip_prefix(bundle, "imu/");
  model.video = strip_prefix(bundle, "video/");
  model.head = strip_prefix(bundle, "head/");
  return model;
}

void save_stage1_checkpoint(const std::string& path, Modality modality,
                            const ImuEncoderConfig& imu_config,
                            const VideoEncoderConfig& video_config, const Stage1Result& result) {
  nlohmann::json meta;
  meta["kind"] = "stage1";
  meta["modality"] = to_string(modality);
  meta["imu_config"] = imu_config;
  meta["video_config"] = video_config;
  meta["head_config"] = result.head_config;
  const ModelParams bundle = merge_bundles({with_prefix(result.encoder, "encoder/"),
                                            with_prefix(result.head, "head/")});
  save_params_archive(path, bundle, meta);
}

UnimodalModel load_stage1_checkpoint(const std::string& path) {
  nlohmann::json meta;
  const ModelParams bundle = load_params_archive(path, &meta);
  if (meta.value("kind", "") != "stage1") {
    throw LoadError("checkpoint '" + path + "': not a stage-1 checkpoint");
  }
  UnimodalModel model;
  model.modality = modality_from_string(meta.at("modality"));
  model.imu_config = meta.at("imu_config").get<ImuEncoderConfig>();
  model.video_config = meta.at("video_config").get<VideoEncoderConfig>();
  model.head_config = meta.at("head_config").get<MlpHeadConfig>();
  model.encoder = strip_prefix(bundle, "encoder/");
  model.head = strip_prefix(bundle, "head/");
  return model;
}

}  // namespace mmhar
