"""Two-stage multimodal human-activity-recognition pipeline.

Thin wrapper over the C++ core (`mmhar._core`): per-modality encoders
(IMU 1D-CNN, video 3D-CNN), late-fusion classifier, dataset tooling,
metrics, and the experiment harnesses.
"""

from mmhar._core import (  # noqa: F401
    ConfigError,
    DatasetIndex,
    LabeledSample,
    MmharError,
    SyntheticSpec,
    cross_entropy_loss,
    default_config_json,
    emit_plots,
    generate_synthetic_dataset,
    imu_forward,
    imu_output_lengths,
    macro_f1,
    mask_classes,
    pad_or_crop,
    resample_sensor,
    run_experiment,
    save_synthetic_archive,
    subset_by_ratio,
    top_k_accuracy,
    video_features,
)

__all__ = [
    "ConfigError",
    "DatasetIndex",
    "LabeledSample",
    "MmharError",
    "SyntheticSpec",
    "cross_entropy_loss",
    "default_config_json",
    "emit_plots",
    "generate_synthetic_dataset",
    "imu_forward",
    "imu_output_lengths",
    "macro_f1",
    "mask_classes",
    "pad_or_crop",
    "resample_sensor",
    "run_experiment",
    "save_synthetic_archive",
    "subset_by_ratio",
    "top_k_accuracy",
    "video_features",
]
