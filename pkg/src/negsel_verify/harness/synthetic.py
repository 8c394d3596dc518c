"""A desk-scale stand-in for the ACAS Xu phi2 setup with a known answer.

The network computes y = x_0 on the box [-0.5, 0.5]^3; the unsafe condition
is y > t with t the middle sub-interval boundary of x_0. With n = 4 per
dimension exactly half of the 64 cells (those with x_0 >= t) are unsafe.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..geometry import SCHEMA_VERSION, Box, PartitionSpec, subintervals
from ..network import Network, make_threshold_network, serialize_nnet
from ..verifier import OutputCondition
from .config import PropertySpec

BOX = ((-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5))
N_SPLITS = 4


def threshold() -> float:
    box = Box.from_bounds(BOX)
    return subintervals(box.dims[0], N_SPLITS)[N_SPLITS // 2].lo


def synthetic_network() -> Network:
    return make_threshold_network(len(BOX), dim=0)


def synthetic_property() -> PropertySpec:
    # y > t  written as  -y < -t
    return PropertySpec(
        Box.from_bounds(BOX),
        OutputCondition.single([-1.0], 0.0 - threshold(), "<"),
        PartitionSpec((0, 1, 2), N_SPLITS),
    )


def expected_unsafe_ids() -> set[int]:
    t = threshold()
    return {c.id for c in synthetic_property().cells() if c.dims[0].lo >= t}


def experiment_config_obj(output_dir: str = "synthetic_out") -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "networks": ["synthetic_threshold.nnet"],
        "property": "synthetic_property.json",
        "nsa": {"detector_sizes": [8, 16, 24, 32], "radii": [0.05], "repetitions": 5},
        "seed": 0,
        "backend": "builtin",
        "workers": 1,
        "timeout_s": 60,
        "falsify_samples": 1000,
        "output_dir": output_dir,
        "plot_dims": [0, 2],
    }


def write_bundle(directory: str | Path) -> Path:
    """Write network, property and experiment config; return the config path."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    (d / "synthetic_threshold.nnet").write_text(
        serialize_nnet(synthetic_network(), "y = x_0 as relu(x_0) - relu(-x_0)")
    )
    (d / "synthetic_property.json").write_text(
        json.dumps(synthetic_property().to_json_obj(), indent=1) + "\n"
    )
    cfg = d / "synthetic_experiment.json"
    cfg.write_text(json.dumps(experiment_config_obj(), indent=1) + "\n")
    return cfg
