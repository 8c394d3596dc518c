"""Unsafe-output conditions, verification queries and verdicts."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..geometry import Box
from ..network import Network, forward

# Strict inequalities are decided as `<= rhs - STRICT_EPS`.
STRICT_EPS = 1e-9
# Slack allowed when re-checking a witness by forward evaluation.
WITNESS_SLACK = 1e-6


class Relation(str, enum.Enum):
    LE = "<="
    LT = "<"


@dataclass(frozen=True, eq=False)
class LinearInequality:
    """``coeffs . y  (<= | <)  rhs`` over the network outputs."""

    coeffs: np.ndarray
    rhs: float
    relation: Relation = Relation.LE

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.float64)
        if c.ndim != 1:
            raise ValueError("coeffs must be a vector")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "rhs", float(self.rhs))
        object.__setattr__(self, "relation", Relation(self.relation))

    @property
    def effective_rhs(self) -> float:
        return self.rhs - STRICT_EPS if self.relation is Relation.LT else self.rhs

    def holds(self, y, slack: float = 0.0) -> bool:
        v = float(self.coeffs @ np.asarray(y, dtype=np.float64))
        if self.relation is Relation.LT:
            return v < self.rhs + slack
        return v <= self.rhs + slack

    def to_dict(self) -> dict:
        return {"coeffs": self.coeffs.tolist(), "rhs": self.rhs, "relation": self.relation.value}

    def __eq__(self, other):
        if not isinstance(other, LinearInequality):
            return NotImplemented
        return (
            np.array_equal(self.coeffs, other.coeffs)
            and self.rhs == other.rhs
            and self.relation == other.relation
        )


@dataclass(frozen=True)
class OutputCondition:
    """Disjunction of conjunctions of linear inequalities over outputs.

    Describes the *unsafe* outputs: a query is SAT when some input in the box
    drives the network into this set.
    """

    dnf: tuple[tuple[LinearInequality, ...], ...]

    def __post_init__(self):
        dnf = tuple(tuple(conj) for conj in self.dnf)
        if not dnf or any(not conj for conj in dnf):
            raise ValueError("condition needs at least one non-empty conjunction")
        sizes = {ineq.coeffs.shape[0] for conj in dnf for ineq in conj}
        if len(sizes) != 1:
            raise ValueError("all inequalities must range over the same output dimension")
        object.__setattr__(self, "dnf", dnf)

    @property
    def output_dim(self) -> int:
        return self.dnf[0][0].coeffs.shape[0]

    @classmethod
    def single(cls, coeffs, rhs, relation="<=") -> "OutputCondition":
        return cls(((LinearInequality(coeffs, rhs, relation),),))

    def matrices(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per conjunction ``(C, d)`` such that the conjunction reads ``C y <= d``."""
        out = []
        for conj in self.dnf:
            C = np.array([q.coeffs for q in conj])
            d = np.array([q.effective_rhs for q in conj])
            out.append((C, d))
        return out

    def holds(self, y, slack: float = 0.0) -> bool:
        return any(all(q.holds(y, slack) for q in conj) for conj in self.dnf)

    def holds_batch(self, Y: np.ndarray) -> np.ndarray:
        """Exact (no slack) membership for a batch of outputs, shape (k, m)."""
        hit = np.zeros(Y.shape[0], dtype=bool)
        for conj in self.dnf:
            ok = np.ones(Y.shape[0], dtype=bool)
            for q in conj:
                v = Y @ q.coeffs
                ok &= (v < q.rhs) if q.relation is Relation.LT else (v <= q.rhs)
            hit |= ok
        return hit

    def to_json_obj(self) -> list:
        return [[q.to_dict() for q in conj] for conj in self.dnf]

    @classmethod
    def from_json_obj(cls, obj) -> "OutputCondition":
        """Accepts a DNF list or ``{"dnf": [...]}`` or an argmin/argmax shorthand
        ``{"kind": "minimal"|"not_minimal"|"maximal"|"not_maximal", "index": k, "output_dim": m}``.
        """
        if isinstance(obj, dict) and "kind" in obj:
            makers = {
                "minimal": output_minimal,
                "not_minimal": output_not_minimal,
                "maximal": output_maximal,
                "not_maximal": output_not_maximal,
            }
            if obj["kind"] not in makers:
                raise ValueError(f"unknown condition kind {obj['kind']!r}")
            return makers[obj["kind"]](int(obj["index"]), int(obj["output_dim"]))
        if isinstance(obj, dict):
            obj = obj["dnf"]
        return cls(
            tuple(
                tuple(
                    LinearInequality(q["coeffs"], q["rhs"], q.get("relation", "<="))
                    for q in conj
                )
                for conj in obj
            )
        )


def _diff(m: int, plus: int, minus: int) -> np.ndarray:
    c = np.zeros(m)
    c[plus] += 1.0
    c[minus] -= 1.0
    return c


def output_minimal(k: int, m: int) -> OutputCondition:
    """y_k <= y_j for every j != k."""
    return OutputCondition((tuple(LinearInequality(_diff(m, k, j), 0.0) for j in range(m) if j != k),))


def output_not_minimal(k: int, m: int) -> OutputCondition:
    """Some y_j < y_k."""
    return OutputCondition(
        tuple((LinearInequality(_diff(m, j, k), 0.0, Relation.LT),) for j in range(m) if j != k)
    )


def output_maximal(k: int, m: int) -> OutputCondition:
    """y_j <= y_k for every j != k."""
    return OutputCondition((tuple(LinearInequality(_diff(m, j, k), 0.0) for j in range(m) if j != k),))


def output_not_maximal(k: int, m: int) -> OutputCondition:
    """Some y_j > y_k."""
    return OutputCondition(
        tuple((LinearInequality(_diff(m, k, j), 0.0, Relation.LT),) for j in range(m) if j != k)
    )


class Backend(str, enum.Enum):
    BUILTIN = "builtin"
    SAMPLER = "sampler"
    EXTERNAL = "external"


class Status(str, enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class VerificationQuery:
    network: Network
    box: Box
    condition: OutputCondition
    timeout: float = 60.0
    backend: Backend = Backend.BUILTIN

    def __post_init__(self):
        if self.box.ndim != self.network.input_dim:
            raise ValueError(
                f"box has {self.box.ndim} dims, network expects {self.network.input_dim}"
            )
        if self.condition.output_dim != self.network.output_dim:
            raise ValueError(
                f"condition ranges over {self.condition.output_dim} outputs, "
                f"network has {self.network.output_dim}"
            )
        object.__setattr__(self, "backend", Backend(self.backend))


@dataclass
class Verdict:
    status: Status
    witness: np.ndarray | None = None
    splits: int = 0
    time: float = 0.0
    backend: Backend = Backend.BUILTIN
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        self.status = Status(self.status)
        self.backend = Backend(self.backend)
        if self.witness is not None:
            self.witness = np.asarray(self.witness, dtype=np.float64)
        if self.status is Status.SAT and self.witness is None:
            raise ValueError("a SAT verdict needs a witness")

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "status": self.status.value,
            "witness": None if self.witness is None else self.witness.tolist(),
            "backend": self.backend.value,
            "splits": self.splits,
        }
        if timing:
            d["time_s"] = self.time
        return d


def check_witness(q: VerificationQuery, x, slack: float = WITNESS_SLACK) -> str | None:
    """Return None when ``x`` is a genuine counterexample, else the reason it is not."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (q.box.ndim,):
        return f"witness has shape {x.shape}, expected ({q.box.ndim},)"
    if not np.all(np.isfinite(x)):
        return "witness is not finite"
    if not (np.all(q.box.lower <= x) and np.all(x <= q.box.upper)):
        return "witness lies outside the input box"
    y = forward(q.network, x)
    if not q.condition.holds(y, slack):
        return "network output at the witness does not satisfy the condition"
    return None
