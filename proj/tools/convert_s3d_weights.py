#!/usr/bin/env python3
"""Convert torchvision S3D (Kinetics-400) weights to the named-array archive
the C++ backbone loads.

Usage:
    python tools/convert_s3d_weights.py S3D_Kinetics400.pth weights/s3d_kinetics400.npz

The input is a torchvision `s3d` state dict (e.g. downloaded through
`torchvision.models.video.s3d(weights="KINETICS400_V1")` and saved with
`torch.save(model.state_dict(), path)`), or a checkpoint file holding such a
state dict. Only the `features.*` backbone weights are converted; the
Kinetics classifier head is dropped (the fusion pipeline replaces it).

Output keys follow "<group>/<branch>/conv/weight" and
"<group>/<branch>/bn/{gamma,beta,running_mean,running_var}" with groups
Conv_1a, Conv_2b, Conv_2c, Mixed_3b..Mixed_5c.
"""

import sys

import numpy as np

# features.<idx> -> group name; pooling stages carry no parameters
FEATURE_GROUPS = {
    0: ("Conv_1a", "sep"),
    2: ("Conv_2b", "basic"),
    3: ("Conv_2c", "sep"),
    5: ("Mixed_3b", "inception"),
    6: ("Mixed_3c", "inception"),
    8: ("Mixed_4b", "inception"),
    9: ("Mixed_4c", "inception"),
    10: ("Mixed_4d", "inception"),
    11: ("Mixed_4e", "inception"),
    12: ("Mixed_4f", "inception"),
    14: ("Mixed_5b", "inception"),
    15: ("Mixed_5c", "inception"),
}

BN_NAMES = {
    "weight": "gamma",
    "bias": "beta",
    "running_mean": "running_mean",
    "running_var": "running_var",
}

# (source submodule path, output prefix) per stage kind. A
# Conv3dNormActivation is Sequential(Conv3d, BatchNorm3d, ReLU); a
# TemporalSeparableConv is Sequential(spatial CNA, temporal CNA).
KIND_LAYOUT = {
    "basic": [("", "")],
    "sep": [("0.", "spatial/"), ("1.", "temporal/")],
    "inception": [
        ("branch0.", "b0/"),
        ("branch1.0.", "b1a/"),
        ("branch1.1.0.", "b1b/spatial/"),
        ("branch1.1.1.", "b1b/temporal/"),
        ("branch2.0.", "b2a/"),
        ("branch2.1.0.", "b2b/spatial/"),
        ("branch2.1.1.", "b2b/temporal/"),
        ("branch3.1.", "b3/"),
    ],
}


def load_state_dict(path):
    import torch

    blob = torch.load(path, map_location="cpu", weights_only=False)
    if hasattr(blob, "state_dict"):
        blob = blob.state_dict()
    if "state_dict" in blob and isinstance(blob["state_dict"], dict):
        blob = blob["state_dict"]
    return {k: v.numpy().astype(np.float64) for k, v in blob.items() if hasattr(v, "numpy")}


def convert(state, verbose=True):
    out = {}
    missing = []
    for idx, (group, kind) in sorted(FEATURE_GROUPS.items()):
        for src_sub, dst_prefix in KIND_LAYOUT[kind]:
            base = f"features.{idx}.{src_sub}" if src_sub else f"features.{idx}."
            conv_key = base + "0.weight"
            if conv_key not in state:
                missing.append(conv_key)
                continue
            out[f"{group}/{dst_prefix}conv/weight"] = state[conv_key]
            for src_name, dst_name in BN_NAMES.items():
                bn_key = base + "1." + src_name
                if bn_key not in state:
                    missing.append(bn_key)
                    continue
                out[f"{group}/{dst_prefix}bn/{dst_name}"] = state[bn_key]
    if missing:
        raise SystemExit(
            "state dict is missing expected backbone keys, e.g. "
            + ", ".join(missing[:5])
            + "\nIs this a torchvision s3d checkpoint?"
        )
    if verbose:
        total = sum(v.size for v in out.values())
        print(f"converted {len(out)} arrays ({total / 1e6:.1f} M parameters)")
    return out


def main(argv):
    if len(argv) != 3:
        print(__doc__)
        return 2
    state = load_state_dict(argv[1])
    arrays = convert(state)
    np.savez(argv[2], **arrays)
    print(f"wrote {argv[2]}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main(sys.argv))
