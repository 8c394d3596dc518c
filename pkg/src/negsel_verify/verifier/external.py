"""File-based protocol for delegating queries to an external verifier.

The executable is invoked as ``<command...> <query.json> <verdict.json>``.

query.json::

    {"schema_version": 1, "nnet_path": "...", "bounds": [[lo, hi], ...],
     "condition": [[{"coeffs": [...], "rhs": r, "relation": "<="}, ...], ...],
     "timeout_s": 60}

verdict.json::

    {"status": "sat" | "unsat" | "unknown", "witness": [floats]}

A SAT witness is always re-checked locally before it is accepted.
"""

from __future__ import annotations

import json
import math
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..geometry import SCHEMA_VERSION, Box
from ..network import load_nnet, save_nnet
from .complete import complete_verify
from .query import (
    Backend,
    OutputCondition,
    Status,
    VerificationQuery,
    Verdict,
    check_witness,
)


class ExternalVerifierError(RuntimeError):
    pass


class ExternalProcessError(ExternalVerifierError):
    """The external executable could not be run or exited with an error."""


class ExternalProtocolError(ExternalVerifierError):
    """The external verifier produced an unusable or untrustworthy verdict."""


@dataclass(frozen=True)
class ExternalAdapterConfig:
    command: tuple[str, ...]
    # extra wall-clock allowance on top of the query timeout
    grace_s: float = 30.0
    env: dict | None = field(default=None, hash=False)

    def __post_init__(self):
        cmd = self.command
        if isinstance(cmd, str):
            cmd = shlex.split(cmd)
        cmd = tuple(str(c) for c in cmd)
        if not cmd:
            raise ValueError("adapter command is empty")
        object.__setattr__(self, "command", cmd)

    @classmethod
    def from_json_obj(cls, obj) -> "ExternalAdapterConfig":
        if isinstance(obj, (str, list)):
            return cls(obj)
        return cls(obj["command"], float(obj.get("grace_s", 30.0)))


def write_query_file(q: VerificationQuery, path: Path, nnet_path: Path) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "nnet_path": str(nnet_path),
        "bounds": q.box.bounds(),
        "condition": q.condition.to_json_obj(),
        "timeout_s": q.timeout,
    }
    Path(path).write_text(json.dumps(doc))


def read_query_file(path: str | Path) -> VerificationQuery:
    path = Path(path)
    doc = json.loads(path.read_text())
    nnet_path = Path(doc["nnet_path"])
    if not nnet_path.is_absolute():
        nnet_path = path.parent / nnet_path
    return VerificationQuery(
        network=load_nnet(nnet_path),
        box=Box.from_bounds(doc["bounds"]),
        condition=OutputCondition.from_json_obj(doc["condition"]),
        timeout=float(doc.get("timeout_s", 60.0)),
    )


def parse_verdict_file(path: Path, q: VerificationQuery) -> Verdict:
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ExternalProtocolError(f"verifier wrote no verdict file at {path}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ExternalProtocolError(f"verdict file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ExternalProtocolError("verdict file must hold a JSON object")
    try:
        status = Status(doc.get("status"))
    except ValueError:
        raise ExternalProtocolError(f"unknown verdict status {doc.get('status')!r}") from None

    witness = None
    if status is Status.SAT:
        raw = doc.get("witness")
        if not isinstance(raw, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw
        ):
            raise ExternalProtocolError("SAT verdict without a numeric witness list")
        witness = np.array(raw, dtype=np.float64)
        problem = check_witness(q, witness)
        if problem is not None:
            raise ExternalProtocolError(f"witness rejected: {problem}")
    return Verdict(status, witness, backend=Backend.EXTERNAL)


def external_verify(q: VerificationQuery, adapter: ExternalAdapterConfig) -> Verdict:
    start = time.monotonic()
    with tempfile.TemporaryDirectory(prefix="negsel-ext-") as tmp:
        tmp = Path(tmp)
        nnet_path = tmp / "network.nnet"
        save_nnet(q.network, nnet_path)
        query_path, verdict_path = tmp / "query.json", tmp / "verdict.json"
        write_query_file(q, query_path, nnet_path)
        limit = q.timeout + adapter.grace_s if math.isfinite(q.timeout) else None
        try:
            proc = subprocess.run(
                [*adapter.command, str(query_path), str(verdict_path)],
                capture_output=True,
                text=True,
                timeout=limit,
                env=adapter.env,
            )
        except FileNotFoundError as exc:
            raise ExternalProcessError(f"cannot execute {adapter.command[0]!r}: {exc}") from None
        except PermissionError as exc:
            raise ExternalProcessError(f"cannot execute {adapter.command[0]!r}: {exc}") from None
        except subprocess.TimeoutExpired:
            return Verdict(Status.UNKNOWN, time=time.monotonic() - start, backend=Backend.EXTERNAL,
                           stats={"timed_out": True})
        if proc.returncode != 0:
            tail = (proc.stderr or "").strip().splitlines()[-5:]
            raise ExternalProcessError(
                f"{adapter.command[0]} exited with status {proc.returncode}: " + " | ".join(tail)
            )
        verdict = parse_verdict_file(verdict_path, q)
    verdict.time = time.monotonic() - start
    return verdict


def serve_query_file(query_path: str | Path, verdict_path: str | Path) -> Verdict:
    """Builtin side of the protocol: answer one query file with complete_verify."""
    q = read_query_file(query_path)
    v = complete_verify(q)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "status": v.status.value,
        "witness": None if v.witness is None else v.witness.tolist(),
    }
    Path(verdict_path).write_text(json.dumps(doc))
    return v
