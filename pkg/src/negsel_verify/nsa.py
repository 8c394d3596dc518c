"""Real-valued negative selection over partition cells.

Each cell is represented by its center; a candidate cell matches the self
set when its center lies within ``r_s`` (L1) of some self center. Candidates
that match nothing become detectors, i.e. candidate unsafe cells.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import SCHEMA_VERSION, Box, center


class NsaExhaustedError(RuntimeError):
    """Fewer than N detectors could be generated."""

    def __init__(self, found: int, wanted: int, attempts: int, reason: str):
        self.found = found
        self.wanted = wanted
        self.attempts = attempts
        super().__init__(
            f"found only {found} of {wanted} detectors after {attempts} attempts ({reason}); "
            "N or r_s is too large for this pool"
        )


@dataclass(frozen=True)
class NsaParams:
    r_s: float
    N: int
    seed: int = 0
    max_attempts: int | None = None  # default 50 * N

    def __post_init__(self):
        if not self.r_s >= 0:
            raise ValueError(f"self radius must be >= 0, got {self.r_s}")
        if int(self.N) != self.N or self.N < 0:
            raise ValueError(f"N must be a non-negative integer, got {self.N}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.max_attempts is None:
            object.__setattr__(self, "max_attempts", 50 * max(int(self.N), 1))
        if self.max_attempts < self.N:
            raise ValueError("max_attempts must be at least N")

    def to_dict(self) -> dict:
        return {"r_s": self.r_s, "N": self.N, "seed": self.seed, "max_attempts": self.max_attempts}


@dataclass(frozen=True)
class DetectorSet:
    detectors: tuple[Box, ...]
    params: NsaParams
    attempts_used: int

    @property
    def ids(self) -> list[int]:
        return [b.id for b in self.detectors]

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "params": self.params.to_dict(),
            "detector_ids": self.ids,
            "attempts_used": self.attempts_used,
            "detectors": [{"id": b.id, "bounds": b.bounds()} for b in self.detectors],
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "DetectorSet":
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {doc.get('schema_version')!r}")
        boxes = tuple(Box.from_bounds(d["bounds"], d["id"]) for d in doc["detectors"])
        if [b.id for b in boxes] != list(doc["detector_ids"]):
            raise ValueError("detector_ids disagree with the detector boxes")
        return cls(boxes, NsaParams(**doc["params"]), int(doc["attempts_used"]))


def l1_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.abs(a - b).sum())


def is_self_match(candidate: Box, self_set: Sequence[Box], r_s: float) -> bool:
    if not self_set:
        return False
    c = center(candidate)
    selves = np.array([center(s) for s in self_set])
    return bool(np.abs(selves - c).sum(axis=1).min() <= r_s)


def generate_detectors(pool: Sequence[Box], self_set: Sequence[Box], params: NsaParams) -> DetectorSet:
    """Draw untried pool cells uniformly at random until N detectors are found.

    Pool cells whose id is in the self set are never drawn. Raises
    :class:`NsaExhaustedError` when the pool or ``max_attempts`` runs out first.
    """
    if not pool:
        raise ValueError("candidate pool is empty")
    ids = [b.id for b in pool]
    if len(set(ids)) != len(ids):
        raise ValueError("pool contains duplicate ids")
    if params.N > len(pool):
        raise ValueError(f"N={params.N} exceeds the pool size {len(pool)}")

    self_ids = {s.id for s in self_set if s.id is not None}
    untried = [b for b in pool if b.id not in self_ids or b.id is None]
    selves = np.array([center(s) for s in self_set]) if self_set else None
    rng = np.random.default_rng(int(params.seed))

    detectors: list[Box] = []
    attempts = 0
    while len(detectors) < params.N:
        if not untried:
            raise NsaExhaustedError(len(detectors), params.N, attempts, "pool exhausted")
        if attempts >= params.max_attempts:
            raise NsaExhaustedError(len(detectors), params.N, attempts, "max_attempts reached")
        x = untried.pop(int(rng.integers(len(untried))))
        attempts += 1
        if selves is not None and np.abs(selves - center(x)).sum(axis=1).min() <= params.r_s:
            continue
        detectors.append(x)
    return DetectorSet(tuple(detectors), params, attempts)
