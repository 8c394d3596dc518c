"""Ground-truth labeling of partition cells and detector validation."""

from __future__ import annotations

import enum
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..geometry import SCHEMA_VERSION, Box
from ..network import Network
from ..nsa import DetectorSet
from ..verifier import (
    Backend,
    ExternalAdapterConfig,
    OutputCondition,
    Status,
    VerificationQuery,
    Verdict,
    complete_verify,
    external_verify,
    falsify_sample,
)
from .config import ConfigError, ExperimentConfig, networks_from_paths

log = logging.getLogger(__name__)


class Label(str, enum.Enum):
    SAFE = "safe"
    UNSAFE = "unsafe"
    UNKNOWN = "unknown"


def aggregate_label(verdicts: Sequence[Verdict]) -> Label:
    if any(v.status is Status.SAT for v in verdicts):
        return Label.UNSAFE
    if verdicts and all(v.status is Status.UNSAT for v in verdicts):
        return Label.SAFE
    return Label.UNKNOWN


@dataclass
class GroundTruth:
    cells: list[Box]
    network_names: list[str]
    verdicts: dict[int, list[Verdict]]

    def __post_init__(self):
        ids = [c.id for c in self.cells]
        if None in ids or len(set(ids)) != len(ids):
            raise ValueError("ground-truth cells need unique ids")
        self._by_id = {c.id: c for c in self.cells}

    def label(self, cell_id: int) -> Label:
        return aggregate_label(self.verdicts[cell_id])

    @property
    def labels(self) -> dict[int, Label]:
        return {c.id: self.label(c.id) for c in self.cells}

    def ids_with(self, label: Label) -> list[int]:
        return [c.id for c in self.cells if self.label(c.id) is label]

    def cells_with(self, label: Label) -> list[Box]:
        return [c for c in self.cells if self.label(c.id) is label]

    def cell(self, cell_id: int) -> Box:
        return self._by_id[cell_id]

    def summary(self) -> dict:
        return {lab.value: len(self.ids_with(lab)) for lab in Label}

    def to_json_obj(self, timing: bool = True) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "networks": list(self.network_names),
            "summary": self.summary(),
            "cells": [
                {
                    "id": c.id,
                    "bounds": c.bounds(),
                    "label": self.label(c.id).value,
                    "verdicts": [v.to_dict(timing) for v in self.verdicts[c.id]],
                }
                for c in self.cells
            ],
        }

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_json_obj(timing), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "GroundTruth":
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {doc.get('schema_version')!r}")
        cells, verdicts = [], {}
        for item in doc["cells"]:
            box = Box.from_bounds(item["bounds"], int(item["id"]))
            cells.append(box)
            verdicts[box.id] = [
                Verdict(
                    v["status"],
                    v.get("witness"),
                    splits=int(v.get("splits", 0)),
                    time=float(v.get("time_s", 0.0)),
                    backend=v.get("backend", "builtin"),
                )
                for v in item["verdicts"]
            ]
            if "label" in item and aggregate_label(verdicts[box.id]).value != item["label"]:
                raise ValueError(f"cell {box.id}: stored label disagrees with its verdicts")
        return cls(cells, list(doc["networks"]), verdicts)

    @classmethod
    def from_labels(cls, cells: Sequence[Box], labels: dict[int, Label], name="given") -> "GroundTruth":
        """Ground truth with one synthetic verdict per cell, for tests and what-if runs."""
        status = {Label.SAFE: Status.UNSAT, Label.UNSAFE: Status.SAT, Label.UNKNOWN: Status.UNKNOWN}
        verdicts = {}
        for c in cells:
            lab = Label(labels[c.id])
            w = None if lab is not Label.UNSAFE else np.array([iv.lo for iv in c.dims])
            verdicts[c.id] = [Verdict(status[lab], w)]
        return cls(list(cells), [name], verdicts)


def task_seed(master: int, cell_id: int, net_index: int) -> int:
    return int(np.random.SeedSequence([master, cell_id, net_index]).generate_state(1, np.uint64)[0])


def _verify_cell(args) -> Verdict:
    net, box, condition, backend, timeout, samples, seed, adapter = args
    q = VerificationQuery(net, box, condition, timeout=timeout)
    if samples > 0:
        v = falsify_sample(q, samples, seed)
        if v.status is Status.SAT or backend is Backend.SAMPLER:
            return v
    elif backend is Backend.SAMPLER:
        return Verdict(Status.UNKNOWN, backend=Backend.SAMPLER)
    if backend is Backend.EXTERNAL:
        return external_verify(q, adapter)
    return complete_verify(q)


def label_cells(
    networks: Sequence[Network],
    cells: Sequence[Box],
    condition: OutputCondition,
    *,
    network_names: Sequence[str] | None = None,
    backend: Backend = Backend.BUILTIN,
    timeout_s: float = 60.0,
    falsify_samples: int = 1000,
    seed: int = 0,
    workers: int = 1,
    adapter: ExternalAdapterConfig | None = None,
) -> GroundTruth:
    """Verify every (cell, network) pair; a cell is UNSAFE if any network is SAT."""
    if not networks:
        raise ConfigError("at least one network is required")
    backend = Backend(backend)
    tasks = [
        (net, cell, condition, backend, timeout_s, falsify_samples, task_seed(seed, cell.id, k), adapter)
        for cell in cells
        for k, net in enumerate(networks)
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_verify_cell, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_verify_cell(t) for t in tasks]

    m = len(networks)
    verdicts = {cell.id: results[i * m:(i + 1) * m] for i, cell in enumerate(cells)}
    names = list(network_names) if network_names else [f"net{k}" for k in range(m)]
    gt = GroundTruth(list(cells), names, verdicts)
    unknown = gt.ids_with(Label.UNKNOWN)
    if unknown:
        log.warning("%d sub-requirements could not be decided: %s", len(unknown), unknown)
    return gt


def label_ground_truth(cfg: ExperimentConfig) -> GroundTruth:
    networks = networks_from_paths(cfg.networks)
    for path, net in zip(cfg.networks, networks):
        if net.input_dim != cfg.property.box.ndim:
            raise ConfigError(
                f"{path.name}: network has {net.input_dim} inputs, property box has {cfg.property.box.ndim}"
            )
    return label_cells(
        networks,
        cfg.property.cells(),
        cfg.property.condition,
        network_names=[p.name for p in cfg.networks],
        backend=cfg.backend,
        timeout_s=cfg.timeout_s,
        falsify_samples=cfg.falsify_samples,
        seed=cfg.seed,
        workers=cfg.workers,
        adapter=cfg.adapter,
    )


@dataclass(frozen=True)
class ValidationResult:
    tp: int
    fp: int
    unknown: int
    unknown_ids: tuple[int, ...] = ()

    @property
    def precision(self) -> float | None:
        n = self.tp + self.fp
        return self.tp / n if n else None

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "unknown": self.unknown,
            "unknown_ids": list(self.unknown_ids),
            "precision": self.precision,
        }


def validate_detectors(ds: DetectorSet | Sequence[int], gt: GroundTruth) -> ValidationResult:
    ids = ds.ids if isinstance(ds, DetectorSet) else list(ds)
    labels = gt.labels
    missing = [i for i in ids if i not in labels]
    if missing:
        raise ValueError(f"detectors {missing} are not cells of the ground truth")
    tp = sum(labels[i] is Label.UNSAFE for i in ids)
    fp = sum(labels[i] is Label.SAFE for i in ids)
    unk = tuple(i for i in ids if labels[i] is Label.UNKNOWN)
    return ValidationResult(tp, fp, len(unk), unk)
