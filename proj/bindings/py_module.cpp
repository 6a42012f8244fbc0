#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mmhar/checkpoint.hpp"
#include "mmhar/config.hpp"
#include "mmhar/metrics.hpp"
#include "mmhar/plots.hpp"
#include "mmhar/runner.hpp"
#include "mmhar/synthetic.hpp"
#include "mmhar/transforms.hpp"

namespace py = pybind11;
using namespace mmhar;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor tensor_from_numpy(const DoubleArray& a) {
  std::vector<std::int64_t> shape;
  for (py::ssize_t d = 0; d < a.ndim(); ++d) shape.push_back(a.shape(d));
  std::vector<double> data(a.data(), a.data() + a.size());
  return Tensor(std::move(shape), std::move(data));
}

py::array_t<double> numpy_from_tensor(const Tensor& t) {
  py::array_t<double> out(t.shape());
  std::copy(t.data(), t.data() + t.numel(), out.mutable_data());
  return out;
}

SensorSequence sensor_from_numpy(const DoubleArray& values, double rate) {
  SensorSequence seq;
  seq.values = tensor_from_numpy(values);
  seq.sample_rate_hz = rate;
  return seq;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-stage multimodal HAR pipeline: IMU 1D-CNN + video 3D-CNN with late fusion";

  // translators run newest-first: the derived ConfigError must register
  // after the base Error to win the match
  py::register_exception<Error>(m, "MmharError");
  py::register_exception<ConfigError>(m, "ConfigError");

  // ------------------------------------------------------------------ metrics
  m.def(
      "top_k_accuracy",
      [](const DoubleArray& logits, const std::vector<int>& labels, int k) {
        return top_k_accuracy(tensor_from_numpy(logits), labels, k);
      },
      py::arg("logits"), py::arg("labels"), py::arg("k"));
  m.def("macro_f1", &macro_f1, py::arg("predictions"), py::arg("labels"), py::arg("num_classes"));
  m.def(
      "cross_entropy_loss",
      [](const DoubleArray& logits, const std::vector<int>& labels) {
        return cross_entropy_loss(tensor_from_numpy(logits), labels);
      },
      py::arg("logits"), py::arg("labels"));

  // ------------------------------------------------------------- preprocessing
  m.def(
      "resample_sensor",
      [](const DoubleArray& values, double source_rate, double target_rate) {
        return numpy_from_tensor(
            resample_sensor(sensor_from_numpy(values, source_rate), target_rate).values);
      },
      py::arg("values"), py::arg("source_rate_hz"), py::arg("target_rate_hz"),
      "Linear-interpolation resampling of a [channels, timesteps] array.");
  m.def(
      "pad_or_crop",
      [](const DoubleArray& values, std::int64_t target_len) {
        return numpy_from_tensor(pad_or_crop(sensor_from_numpy(values, 50.0), target_len).values);
      },
      py::arg("values"), py::arg("target_len"),
      "Trailing zero-pad or prefix crop to exactly target_len steps.");

  // ------------------------------------------------------------ imu encoder op
  m.def(
      "imu_forward",
      [](const DoubleArray& batch, int in_channels, std::vector<int> block_channels,
         std::uint64_t seed) {
        ImuEncoderConfig cfg;
        cfg.in_channels = in_channels;
        if (block_channels.size() == 3) {
          cfg.block_channels = {block_channels[0], block_channels[1], block_channels[2]};
        }
        const ImuEncoder enc(cfg);
        const ModelParams params = enc.init(seed);
        return numpy_from_tensor(enc.forward(params, tensor_from_numpy(batch), false));
      },
      py::arg("batch"), py::arg("in_channels"), py::arg("block_channels"), py::arg("seed") = 0,
      "Eval-mode forward of a freshly initialized IMU encoder over [N, C, L].");
  m.def("imu_output_lengths", [](std::int64_t input_len) {
    return ImuEncoder(ImuEncoderConfig{}).output_lengths(input_len);
  });

  // ----------------------------------------------------------------- synthetic
  py::class_<SyntheticSpec>(m, "SyntheticSpec")
      .def(py::init<>())
      .def_readwrite("num_imu_factors", &SyntheticSpec::num_imu_factors)
      .def_readwrite("num_video_factors", &SyntheticSpec::num_video_factors)
      .def_readwrite("samples_per_class", &SyntheticSpec::samples_per_class)
      .def_readwrite("test_samples_per_class", &SyntheticSpec::test_samples_per_class)
      .def_readwrite("noise_std", &SyntheticSpec::noise_std)
      .def_readwrite("seq_len", &SyntheticSpec::seq_len)
      .def_readwrite("clip_shape", &SyntheticSpec::clip_shape)
      .def_readwrite("sensor_channels", &SyntheticSpec::sensor_channels)
      .def_property_readonly("num_classes", &SyntheticSpec::num_classes);

  py::class_<LabeledSample>(m, "LabeledSample")
      .def_readonly("sample_id", &LabeledSample::sample_id)
      .def_readonly("subject_id", &LabeledSample::subject_id)
      .def_readonly("class_id", &LabeledSample::class_id)
      .def_property_readonly("sensor",
                             [](const LabeledSample& s) -> py::object {
                               if (!s.sensor) return py::none();
                               return numpy_from_tensor(s.sensor->values);
                             })
      .def_property_readonly("video",
                             [](const LabeledSample& s) -> py::object {
                               if (!s.video) return py::none();
                               return numpy_from_tensor(s.video->frames);
                             })
      .def_property_readonly("mask_imu",
                             [](const LabeledSample& s) { return s.modality_mask.imu; })
      .def_property_readonly("mask_video",
                             [](const LabeledSample& s) { return s.modality_mask.video; });

  py::class_<DatasetIndex>(m, "DatasetIndex")
      .def_readonly("num_classes", &DatasetIndex::num_classes)
      .def_readonly("class_names", &DatasetIndex::class_names)
      .def("__len__", [](const DatasetIndex& d) { return d.samples.size(); })
      .def(
          "__getitem__",
          [](const DatasetIndex& d, std::size_t i) {
            if (i >= d.samples.size()) throw py::index_error();
            return d.samples[i];
          },
          py::return_value_policy::copy);

  m.def("generate_synthetic_dataset", &generate_synthetic_dataset, py::arg("spec"),
        py::arg("seed"), "Returns the (train, test) synthetic benchmark splits.");
  m.def("save_synthetic_archive", &save_synthetic_archive, py::arg("path"), py::arg("index"),
        py::arg("spec"), py::arg("seed"));
  m.def(
      "subset_by_ratio",
      [](const DatasetIndex& index, double ratio, std::uint64_t seed) {
        return subset_by_ratio(index, ratio, seed);
      },
      py::arg("index"), py::arg("ratio"), py::arg("seed"));
  m.def(
      "mask_classes",
      [](const DatasetIndex& index, const std::string& modality,
         const std::set<int>& hidden_classes) {
        MaskAudit audit;
        DatasetIndex out =
            mask_classes(index, modality_from_string(modality), hidden_classes, &audit);
        return py::make_tuple(out, audit.affected_sample_ids);
      },
      py::arg("index"), py::arg("modality"), py::arg("hidden_classes"),
      "Returns (masked index, affected sample ids).");

  // -------------------------------------------------------------- video encoder
  m.def(
      "video_features",
      [](const std::string& checkpoint_path, const std::string& backbone,
         const std::vector<std::int64_t>& input_shape, const DoubleArray& batch) {
        VideoEncoderConfig cfg;
        cfg.backbone = video_backbone_from_string(backbone);
        if (input_shape.size() == 3) {
          cfg.input_shape = {input_shape[0], input_shape[1], input_shape[2]};
        }
        const VideoEncoder enc(cfg);
        const ModelParams params = checkpoint_path.empty()
                                       ? enc.init(0)
                                       : load_pretrained_video_weights(checkpoint_path, cfg);
        return numpy_from_tensor(enc.forward(params, tensor_from_numpy(batch)));
      },
      py::arg("checkpoint_path"), py::arg("backbone"), py::arg("input_shape"), py::arg("batch"),
      "Eval-mode video features over [N, 3, T, H, W]; empty path = random init.");

  // ---------------------------------------------------------------- experiments
  m.def(
      "run_experiment",
      [](const std::string& config_json, const std::string& output_dir, py::object seed) {
        nlohmann::json j = nlohmann::json::parse(config_json);
        if (!output_dir.empty()) j["output_dir"] = output_dir;
        if (!seed.is_none()) j["seed"] = seed.cast<std::uint64_t>();
        const ExperimentConfig cfg = config_from_json(j);
        const RunResult result = run_experiment(cfg);
        py::list rows;
        for (const auto& row : result.rows) {
          py::dict d;
          d["dataset"] = row.dataset;
          d["condition"] = row.condition;
          d["ratio"] = row.ratio;
          d["hidden_count"] = row.hidden_count;
          d["seed"] = row.seed;
          d["top1"] = row.top1;
          d["top5"] = row.top5;
          d["macro_f1"] = row.macro_f1;
          rows.append(std::move(d));
        }
        return rows;
      },
      py::arg("config_json"), py::arg("output_dir") = std::string(),
      py::arg("seed") = py::none(),
      "Runs an experiment from a JSON config string; returns summary rows.");
  m.def("default_config_json", [](const std::string& dataset) {
    ExperimentConfig cfg = default_config([&] {
      if (dataset == "UTD_MHAD") return DatasetKind::kUtdMhad;
      if (dataset == "MMACT") return DatasetKind::kMmact;
      return DatasetKind::kSynthetic;
    }());
    return config_to_json(cfg).dump();
  });
  m.def("emit_plots", &emit_plots, py::arg("results_dir"), py::arg("out_dir"));
}
