"""Detector-size / radius sweeps over a labeled partition."""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..geometry import SCHEMA_VERSION
from ..nsa import DetectorSet, NsaParams, generate_detectors
from .config import ExperimentConfig
from .ground_truth import GroundTruth, Label, label_ground_truth, validate_detectors
from .region_map import render_region_map

log = logging.getLogger(__name__)

TIMING_KEYS = frozenset({"timing", "time_s"})


class ExperimentError(RuntimeError):
    pass


@dataclass
class RunRecord:
    detector_size: int
    radius: float
    repetition: int
    seed: int
    detector_ids: list[int]
    attempts_used: int
    tp: int
    fp: int
    unknown: int
    time_s: float = 0.0

    @property
    def precision(self) -> float | None:
        n = self.tp + self.fp
        return self.tp / n if n else None

    def to_dict(self) -> dict:
        return {
            "detector_size": self.detector_size,
            "radius": self.radius,
            "repetition": self.repetition,
            "seed": self.seed,
            "detector_ids": self.detector_ids,
            "attempts_used": self.attempts_used,
            "tp": self.tp,
            "fp": self.fp,
            "unknown": self.unknown,
            "precision": self.precision,
            "time_s": self.time_s,
        }


@dataclass
class ExperimentReport:
    config: dict
    ground_truth: dict
    runs: list[RunRecord]
    timing: dict = field(default_factory=dict)
    detector_sets: list[DetectorSet] = field(default_factory=list, repr=False)

    def aggregates(self) -> list[dict]:
        groups: dict[tuple[int, float], list[RunRecord]] = {}
        for r in self.runs:
            groups.setdefault((r.detector_size, r.radius), []).append(r)
        out = []
        for (n, radius), rows in groups.items():
            precisions = [r.precision for r in rows if r.precision is not None]
            out.append({
                "detector_size": n,
                "radius": radius,
                "repetitions": len(rows),
                "mean_tp": float(np.mean([r.tp for r in rows])),
                "mean_fp": float(np.mean([r.fp for r in rows])),
                "mean_unknown": float(np.mean([r.unknown for r in rows])),
                "mean_precision": float(np.mean(precisions)) if precisions else None,
            })
        return out

    def to_json_obj(self, timing: bool = True) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "ground_truth": self.ground_truth,
            "runs": [r.to_dict() for r in self.runs],
            "aggregates": self.aggregates(),
        }
        if timing:
            doc["timing"] = self.timing
        else:
            for r in doc["runs"]:
                r.pop("time_s")
        return doc

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_json_obj(timing), indent=1)

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["detector_size", "radius", "repetition", "seed", "tp", "fp", "unknown",
                    "precision", "attempts_used", "detector_ids"])
        for r in self.runs:
            w.writerow([r.detector_size, r.radius, r.repetition, r.seed, r.tp, r.fp, r.unknown,
                        "" if r.precision is None else repr(r.precision), r.attempts_used,
                        " ".join(str(i) for i in r.detector_ids)])
        return out.getvalue()


def strip_timing(obj):
    """Drop timing fields recursively, for determinism comparisons."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def sweep(cfg: ExperimentConfig, gt: GroundTruth) -> ExperimentReport:
    pool = list(gt.cells)
    selves = gt.cells_with(Label.SAFE)
    runs, sets = [], []
    for n in cfg.detector_sizes:
        for radius in cfg.radii:
            for rep in range(cfg.repetitions):
                seed = cfg.seed + rep
                start = time.perf_counter()
                if n == 0:
                    runs.append(RunRecord(0, radius, rep, seed, [], 0, 0, 0, 0))
                    continue
                params = NsaParams(r_s=radius, N=n, seed=seed, max_attempts=cfg.max_attempts)
                try:
                    ds = generate_detectors(pool, selves, params)
                except (RuntimeError, ValueError) as exc:
                    raise ExperimentError(
                        f"NSA run failed (detector_size={n}, radius={radius}, repetition={rep}, "
                        f"seed={seed}): {exc}"
                    ) from exc
                res = validate_detectors(ds, gt)
                runs.append(RunRecord(n, radius, rep, seed, ds.ids, ds.attempts_used,
                                      res.tp, res.fp, res.unknown, time.perf_counter() - start))
                sets.append(ds)
    return ExperimentReport(cfg.describe(), gt.summary(), runs, detector_sets=sets)


def run_experiment(cfg: ExperimentConfig, gt: GroundTruth | None = None) -> ExperimentReport:
    """Label (unless ``gt`` is given), sweep NSA settings, write outputs if configured."""
    t0 = time.perf_counter()
    if gt is None:
        gt = label_ground_truth(cfg)
    t1 = time.perf_counter()
    report = sweep(cfg, gt)
    t2 = time.perf_counter()
    report.timing = {"label_s": t1 - t0, "nsa_s": t2 - t1}
    log.info("ground truth %s; %d NSA runs", gt.summary(), len(report.runs))
    if cfg.output_dir is not None:
        write_outputs(cfg, gt, report, cfg.output_dir)
    return report


def write_outputs(cfg: ExperimentConfig, gt: GroundTruth, report: ExperimentReport, out: Path) -> None:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "ground_truth.json").write_text(gt.to_json())
    (out / "report.json").write_text(report.to_json())
    (out / "report.csv").write_text(report.to_csv())
    dims = cfg.plot_dims
    if dims is None and cfg.property.box.ndim >= 2:
        split = list(cfg.property.partition.split_dims)
        dims = (split[0], split[-1]) if len(split) >= 2 else (0, 1)
    if dims is not None:
        ds = report.detector_sets[0] if report.detector_sets else None
        (out / "region_map.svg").write_text(render_region_map(gt, ds, dims))
