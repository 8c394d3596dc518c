"""Property specs and experiment configuration files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from ..geometry import SCHEMA_VERSION, Box, PartitionSpec, partition
from ..verifier import Backend, ExternalAdapterConfig, OutputCondition


class ConfigError(ValueError):
    pass


def _check_schema(doc: dict, what: str) -> None:
    if not isinstance(doc, dict):
        raise ConfigError(f"{what}: expected a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"{what}: unsupported schema_version {version!r}")


@dataclass(frozen=True)
class PropertySpec:
    """Input box, unsafe-output condition and how to partition the box."""

    box: Box
    condition: OutputCondition
    partition: PartitionSpec

    def cells(self) -> list[Box]:
        return partition(self.box, self.partition)

    def to_json_obj(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "bounds": self.box.bounds(),
            "condition": self.condition.to_json_obj(),
            "split_dims": list(self.partition.split_dims),
            "n": self.partition.n,
        }

    @classmethod
    def from_json_obj(cls, doc: dict) -> "PropertySpec":
        _check_schema(doc, "property")
        try:
            box = Box.from_bounds(doc["bounds"])
            split_dims = doc.get("split_dims", list(range(box.ndim)))
            spec = cls(
                box,
                OutputCondition.from_json_obj(doc["condition"]),
                PartitionSpec(tuple(split_dims), int(doc.get("n", 1))),
            )
            spec.partition.check(box)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid property spec: {exc}") from exc
        return spec

    @classmethod
    def load(cls, path: str | Path) -> "PropertySpec":
        return cls.from_json_obj(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class ExperimentConfig:
    networks: tuple[Path, ...]
    property: PropertySpec
    detector_sizes: tuple[int, ...] = (8, 16, 24, 32)
    radii: tuple[float, ...] = (0.05,)
    repetitions: int = 1
    seed: int = 0
    max_attempts: int | None = None
    backend: Backend = Backend.BUILTIN
    workers: int = 1
    timeout_s: float = 60.0
    falsify_samples: int = 1000
    output_dir: Path | None = None
    adapter: ExternalAdapterConfig | None = None
    plot_dims: tuple[int, int] | None = None
    source: Path | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "networks", tuple(Path(p) for p in self.networks))
        object.__setattr__(self, "backend", Backend(self.backend))
        if not self.networks:
            raise ConfigError("at least one network is required")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.falsify_samples < 0:
            raise ConfigError("falsify_samples must be non-negative")
        if self.backend is Backend.EXTERNAL and self.adapter is None:
            raise ConfigError("the external backend needs an adapter command")
        n_cells = len(self.property.cells())
        too_big = [n for n in self.detector_sizes if n > n_cells]
        if too_big:
            raise ConfigError(f"detector sizes {too_big} exceed the {n_cells} partition cells")
        if any(n < 0 for n in self.detector_sizes):
            raise ConfigError("detector sizes must be non-negative")
        if any(not r >= 0 for r in self.radii):
            raise ConfigError("radii must be non-negative")
        if self.plot_dims is not None:
            a, b = self.plot_dims
            d = self.property.box.ndim
            if not (0 <= a < d and 0 <= b < d and a != b):
                raise ConfigError(f"plot_dims {self.plot_dims} invalid for a {d}-d box")

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self

    @classmethod
    def from_json_obj(cls, doc: dict, base_dir: Path | None = None) -> "ExperimentConfig":
        _check_schema(doc, "experiment config")
        base = Path(base_dir) if base_dir else Path.cwd()

        def resolve(p) -> Path:
            p = Path(p)
            return p if p.is_absolute() else base / p

        prop = doc.get("property")
        if prop is None:
            raise ConfigError("config has no property")
        if isinstance(prop, str):
            prop = PropertySpec.load(resolve(prop))
        else:
            prop = PropertySpec.from_json_obj(prop)
        nsa = doc.get("nsa", {})
        adapter = doc.get("adapter")
        plot_dims = doc.get("plot_dims")
        try:
            return cls(
                networks=tuple(resolve(p) for p in doc.get("networks", [])),
                property=prop,
                detector_sizes=tuple(int(n) for n in nsa.get("detector_sizes", (8, 16, 24, 32))),
                radii=tuple(float(r) for r in nsa.get("radii", (0.05,))),
                repetitions=int(nsa.get("repetitions", 1)),
                max_attempts=nsa.get("max_attempts"),
                seed=int(doc.get("seed", 0)),
                backend=Backend(doc.get("backend", "builtin")),
                workers=int(doc.get("workers", 1)),
                timeout_s=float(doc.get("timeout_s", 60.0)),
                falsify_samples=int(doc.get("falsify_samples", 1000)),
                output_dir=resolve(doc["output_dir"]) if doc.get("output_dir") else None,
                adapter=ExternalAdapterConfig.from_json_obj(adapter) if adapter else None,
                plot_dims=tuple(plot_dims) if plot_dims else None,
                source=None,
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid experiment config: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        cfg = cls.from_json_obj(doc, path.parent)
        return replace(cfg, source=path)

    def describe(self) -> dict:
        """Echo of the run parameters, path-free so reports stay relocatable."""
        return {
            "networks": [p.name for p in self.networks],
            "property": self.property.to_json_obj(),
            "detector_sizes": list(self.detector_sizes),
            "radii": list(self.radii),
            "repetitions": self.repetitions,
            "seed": self.seed,
            "max_attempts": self.max_attempts,
            "backend": self.backend.value,
            "timeout_s": self.timeout_s,
            "falsify_samples": self.falsify_samples,
        }


def networks_from_paths(paths: Sequence[Path]):
    from ..network import load_nnet

    return [load_nnet(p) for p in paths]
