"""Python smoke tests for the pybind11 module.

The C++ suites carry the real coverage; these check the binding surface:
numpy round trips, metric agreement, the synthetic generator, and one tiny
end-to-end experiment.
"""

import json
import math
import os

import numpy as np
import pytest

import mmhar


def test_metrics_agree_with_numpy_reference():
    rng = np.random.default_rng(0)
    logits = rng.normal(size=(40, 6))
    labels = rng.integers(0, 6, size=40).tolist()

    top1 = mmhar.top_k_accuracy(logits, labels, 1)
    expected = float(np.mean(np.argmax(logits, axis=1) == np.asarray(labels)))
    assert top1 == pytest.approx(expected)

    assert mmhar.top_k_accuracy(logits, labels, 6) == 1.0
    assert mmhar.macro_f1([0, 0, 1], [0, 1, 1], 2) == pytest.approx(2 / 3)

    uniform = np.zeros((3, 27))
    assert mmhar.cross_entropy_loss(uniform, [0, 13, 26]) == pytest.approx(math.log(27))


def test_preprocessing_ops():
    ramp = np.arange(8, dtype=float).reshape(1, 8)
    half = mmhar.resample_sensor(ramp, 2.0, 1.0)
    assert half.shape == (1, 4)
    np.testing.assert_allclose(half[0], [0, 2, 4, 6])

    padded = mmhar.pad_or_crop(ramp, 10)
    assert padded.shape == (1, 10)
    assert padded[0, 9] == 0.0
    cropped = mmhar.pad_or_crop(ramp, 5)
    np.testing.assert_allclose(cropped[0], ramp[0, :5])


def test_imu_encoder_shapes():
    assert mmhar.imu_output_lengths(160) == [137, 122, 115]
    batch = np.random.default_rng(1).normal(size=(2, 3, 64))
    feats = mmhar.imu_forward(batch, 3, [8, 8, 8], seed=0)
    assert feats.shape == (2, 8)
    assert (feats >= 0).all()


def test_synthetic_generator_and_masking():
    spec = mmhar.SyntheticSpec()
    spec.num_imu_factors = 2
    spec.num_video_factors = 2
    spec.samples_per_class = 3
    spec.noise_std = 0.0
    spec.seq_len = 48
    spec.clip_shape = [4, 8, 8]
    spec.sensor_channels = 2
    assert spec.num_classes == 4

    train, test = mmhar.generate_synthetic_dataset(spec, 5)
    assert len(train) == 12 and len(test) == 12
    sample = train[0]
    assert sample.sensor.shape == (2, 48)
    assert sample.video.shape == (4, 8, 8, 3)
    assert sample.video.min() >= 0.0 and sample.video.max() <= 1.0

    # classes sharing an imu factor have identical noiseless sensors
    by_class = {}
    for i in range(len(train)):
        s = train[i]
        by_class.setdefault(s.class_id, s)
    np.testing.assert_array_equal(by_class[0].sensor, by_class[1].sensor)

    masked, affected = mmhar.mask_classes(train, "IMU", {1})
    assert len(masked) == len(train)
    assert len(affected) == 3
    for i in range(len(masked)):
        s = masked[i]
        assert s.mask_imu == (s.class_id != 1)
        assert s.mask_video

    subset = mmhar.subset_by_ratio(train, 1.0 / 3.0, seed=9)
    assert len(subset) == 4  # one per class


def test_end_to_end_tiny_experiment(tmp_path):
    config = json.loads(mmhar.default_config_json("SYNTHETIC"))
    config["synthetic"].update(
        num_imu_factors=2, num_video_factors=2, samples_per_class=6, seq_len=48,
        clip_shape=[4, 8, 8], sensor_channels=2,
    )
    config["imu_encoder"].update(in_channels=2, block_channels=[8, 8, 8])
    config["video_encoder"].update(input_shape=[4, 8, 8], mini_channels=[4, 6, 8])
    for stage in ("stage1_imu", "stage1_video", "stage2"):
        config[stage]["max_epochs"] = 4

    rows = mmhar.run_experiment(json.dumps(config), str(tmp_path / "run"), seed=3)
    assert len(rows) == 1
    row = rows[0]
    assert row["condition"] == "FUSED"
    assert 0.0 <= row["top1"] <= 1.0
    assert row["top1"] <= row["top5"]

    assert (tmp_path / "run" / "manifest.json").exists()
    assert (tmp_path / "run" / "summary.csv").exists()
    assert (tmp_path / "run" / "checkpoints" / "stage2_fused.npz").exists()

    # checkpoints are plain npz archives numpy can open
    archive = np.load(tmp_path / "run" / "checkpoints" / "stage2_fused.npz")
    names = list(archive.files)
    assert any(n.startswith("imu/") for n in names)
    assert any(n.startswith("video/") for n in names)
    header = json.loads(bytes(archive["__header_json__"]).decode())
    assert header["format"] == "mmhar-params-v1"


def test_synthetic_archive_is_numpy_readable(tmp_path):
    spec = mmhar.SyntheticSpec()
    spec.num_imu_factors = 2
    spec.num_video_factors = 2
    spec.samples_per_class = 2
    spec.seq_len = 48
    spec.clip_shape = [4, 8, 8]
    spec.sensor_channels = 2
    train, _ = mmhar.generate_synthetic_dataset(spec, 1)

    path = tmp_path / "train.npz"
    mmhar.save_synthetic_archive(str(path), train, spec, 1)
    archive = np.load(path)
    header = json.loads(bytes(archive["__header_json__"]).decode())
    assert header["spec"]["num_imu_factors"] == 2
    assert archive["sensor/0"].shape == (2, 48)


def test_config_error_maps_to_python_exception():
    with pytest.raises(mmhar.ConfigError):
        mmhar.run_experiment(json.dumps({"dataset": "NOT_A_DATASET"}), "", None)
