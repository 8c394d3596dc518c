"""Intervals, boxes and uniform Cartesian partitioning of an input box."""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

SCHEMA_VERSION = 1

# Dimensions narrower than this are never split.
MIN_SPLIT_WIDTH = 1e-9


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not lo <= hi:
            raise ValueError(f"invalid interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __iter__(self):
        yield self.lo
        yield self.hi


@dataclass(frozen=True)
class Box:
    """Axis-aligned closed hyper-rectangle. ``id`` is the partition ordinal, if any."""

    dims: tuple[Interval, ...]
    id: int | None = None

    def __post_init__(self):
        dims = tuple(d if isinstance(d, Interval) else Interval(*d) for d in self.dims)
        if not dims:
            raise ValueError("a box needs at least one dimension")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_bounds(cls, bounds: Iterable[Sequence[float]], id: int | None = None) -> "Box":
        return cls(tuple(Interval(lo, hi) for lo, hi in bounds), id)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def lower(self) -> np.ndarray:
        return np.array([iv.lo for iv in self.dims])

    @property
    def upper(self) -> np.ndarray:
        return np.array([iv.hi for iv in self.dims])

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def bounds(self) -> list[list[float]]:
        return [[iv.lo, iv.hi] for iv in self.dims]

    def with_id(self, id: int | None) -> "Box":
        return Box(self.dims, id)

    def split(self, dim: int) -> tuple["Box", "Box"]:
        """Bisect along ``dim``; children carry no id."""
        iv = self.dims[dim]
        m = iv.mid
        left = self.dims[:dim] + (Interval(iv.lo, m),) + self.dims[dim + 1:]
        right = self.dims[:dim] + (Interval(m, iv.hi),) + self.dims[dim + 1:]
        return Box(left), Box(right)


SubRequirement = Box


@dataclass(frozen=True)
class PartitionSpec:
    split_dims: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "split_dims", tuple(int(i) for i in self.split_dims))
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not self.split_dims:
            raise ValueError("split_dims must be non-empty")
        if len(set(self.split_dims)) != len(self.split_dims):
            raise ValueError("split_dims contains duplicates")

    def check(self, box: Box) -> None:
        bad = [i for i in self.split_dims if not 0 <= i < box.ndim]
        if bad:
            raise ValueError(f"split dimensions {bad} out of range for a {box.ndim}-d box")


def step_size(iv: Interval, n: int) -> float:
    if n < 1:
        raise ValueError("n must be at least 1")
    return (iv.hi - iv.lo) / n


def subintervals(iv: Interval, n: int) -> list[Interval]:
    gamma = step_size(iv, n)
    edges = [iv.lo + j * gamma for j in range(n)] + [iv.hi]
    return [Interval(a, b) for a, b in zip(edges, edges[1:])]


def partition(box: Box, spec: PartitionSpec, min_width: float = MIN_SPLIT_WIDTH) -> list[Box]:
    """All n^k cells, ordered lexicographically by the split-dimension indices.

    Split dimensions narrower than ``min_width`` are left whole, so the count
    shrinks accordingly for near-constant dimensions.
    """
    spec.check(box)
    per_dim: list[list[Interval]] = []
    for i, iv in enumerate(box.dims):
        if i in spec.split_dims and iv.width >= min_width:
            per_dim.append(subintervals(iv, spec.n))
        else:
            per_dim.append([iv])
    # itertools.product varies the last dimension fastest, matching the
    # row order of the sub-requirement tables.
    return [Box(cell, k) for k, cell in enumerate(itertools.product(*per_dim))]


def center(box: Box) -> np.ndarray:
    return np.array([iv.mid for iv in box.dims])


def contains(box: Box, x) -> bool:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (box.ndim,):
        raise ValueError(f"point has shape {x.shape}, box is {box.ndim}-d")
    return bool(np.all((box.lower <= x) & (x <= box.upper)))


# ---------------------------------------------------------------------------
# sub-requirement files


def boxes_to_json(boxes: Sequence[Box]) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "boxes": [{"id": b.id, "bounds": b.bounds()} for b in boxes],
    }
    return json.dumps(doc, indent=1)


def boxes_from_json(text: str) -> list[Box]:
    doc = json.loads(text)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {doc.get('schema_version')!r}")
    return [Box.from_bounds(item["bounds"], item.get("id")) for item in doc["boxes"]]


def boxes_to_csv(boxes: Sequence[Box]) -> str:
    if not boxes:
        return "id\n"
    d = boxes[0].ndim
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["id"] + [f"{s}{i}" for i in range(d) for s in ("lo", "hi")])
    for b in boxes:
        w.writerow([b.id] + [repr(v) for iv in b.dims for v in (iv.lo, iv.hi)])
    return out.getvalue()
