"""Complete verification of small ReLU networks over boxes.

Depth-first branch and bound. Each node is an input box:

* IBP bounds, pushed through the final affine layer straight into the
  condition rows, prune conjunctions that cannot hold anywhere in the box;
* the box center is tried as a concrete counterexample;
* once few ReLUs remain unstable (or the box is tiny) the node is decided
  exactly: every phase pattern of the unstable ReLUs makes the network
  affine on a polytope, and one LP per pattern and conjunction settles it;
* otherwise the box is bisected along the dimension with the largest
  width times accumulated weight magnitude.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from ..geometry import Box, center
from ..network import Activation, Network, forward
from .ibp import LayerBounds, ibp_bounds
from .query import Backend, Status, VerificationQuery, Verdict, check_witness


@dataclass(frozen=True)
class SearchConfig:
    min_width: float = 1e-7
    phase_split_limit: int = 3
    lp_tol: float = 1e-9


def input_influence(net: Network) -> np.ndarray:
    """Column sums of |W_L| ... |W_1|, a crude per-input sensitivity."""
    M = np.abs(net.layers[0].weights)
    for layer in net.layers[1:]:
        M = np.abs(layer.weights) @ M
    infl = M.sum(axis=0)
    if not np.any(infl > 0):
        return np.ones_like(infl)
    return infl


def _row_lower_bounds(net: Network, bounds: list[LayerBounds], box: Box, C: np.ndarray) -> np.ndarray:
    """Lower bounds of C @ y over the box, through the last affine layer."""
    last = net.layers[-1]
    if len(net.layers) > 1:
        lo, hi = bounds[-2].post_lo, bounds[-2].post_hi
    else:
        lo, hi = box.lower, box.upper
    G = C @ last.weights
    return np.maximum(G, 0.0) @ lo + np.minimum(G, 0.0) @ hi + C @ last.biases


def _unstable(net: Network, bounds: list[LayerBounds]) -> list[tuple[int, int]]:
    out = []
    for li, (layer, b) in enumerate(zip(net.layers, bounds)):
        if layer.activation is Activation.RELU:
            out.extend((li, int(j)) for j in np.flatnonzero(b.unstable()))
    return out


def _affine_under_pattern(net, bounds, pattern: dict[tuple[int, int], bool]):
    """Affine map x -> y valid where the phase pattern holds, plus the phase rows G x <= h."""
    d = net.input_dim
    A, c = np.eye(d), np.zeros(d)
    G_rows, h_rows = [], []
    for li, layer in enumerate(net.layers):
        ZA = layer.weights @ A
        Zc = layer.weights @ c + layer.biases
        if layer.activation is Activation.RELU:
            active = bounds[li].pre_lo >= 0.0
            for j in np.flatnonzero(bounds[li].unstable()):
                if pattern[(li, int(j))]:
                    active[j] = True
                    G_rows.append(-ZA[j])
                    h_rows.append(Zc[j])
                else:
                    G_rows.append(ZA[j])
                    h_rows.append(-Zc[j])
            A, c = ZA * active[:, None], Zc * active
        else:
            A, c = ZA, Zc
    G = np.array(G_rows).reshape(-1, d)
    return A, c, G, np.array(h_rows)


class _Search:
    def __init__(self, q: VerificationQuery, cfg: SearchConfig):
        self.q = q
        self.net = q.network
        self.cfg = cfg
        self.conjs = q.condition.matrices()
        self.influence = input_influence(self.net)
        self.stats = {
            "nodes": 0,
            "pruned": 0,
            "lp_calls": 0,
            "phase_leaves": 0,
            "min_width_leaves": 0,
            "lp_witness_rejects": 0,
        }
        self.splits = 0

    def _accept(self, x) -> np.ndarray | None:
        x = np.clip(np.asarray(x, dtype=np.float64), self.q.box.lower, self.q.box.upper)
        return x if check_witness(self.q, x) is None else None

    def _probe(self, box: Box, live) -> np.ndarray | None:
        x = center(box)
        y = forward(self.net, x)
        for C, dd in live:
            if np.all(C @ y <= dd):
                return self._accept(x)
        return None

    def _decide_leaf(self, box: Box, bounds, live) -> np.ndarray | None:
        d = self.net.input_dim
        unstable = _unstable(self.net, bounds)
        box_bounds = [(iv.lo, iv.hi) for iv in box.dims] + [(None, 1.0)]
        objective = np.zeros(d + 1)
        objective[-1] = -1.0
        for bits in itertools.product((True, False), repeat=len(unstable)):
            A, c, G, h = _affine_under_pattern(self.net, bounds, dict(zip(unstable, bits)))
            for C, dd in live:
                # maximize t  s.t.  C(Ax + c) + t <= dd,  G x <= h,  x in box
                A_ub = np.vstack([
                    np.hstack([C @ A, np.ones((C.shape[0], 1))]),
                    np.hstack([G, np.zeros((G.shape[0], 1))]),
                ])
                b_ub = np.concatenate([dd - C @ c, h])
                self.stats["lp_calls"] += 1
                res = linprog(objective, A_ub=A_ub, b_ub=b_ub, bounds=box_bounds, method="highs")
                if res.status != 0 or -res.fun < -self.cfg.lp_tol:
                    continue
                x = self._accept(res.x[:d])
                if x is not None:
                    return x
                self.stats["lp_witness_rejects"] += 1
        return None

    def run(self, deadline: float) -> tuple[Status, np.ndarray | None]:
        stack = [self.q.box]
        while stack:
            if time.monotonic() > deadline:
                return Status.UNKNOWN, None
            box = stack.pop()
            self.stats["nodes"] += 1
            bounds = ibp_bounds(self.net, box)
            live = [
                (C, dd)
                for C, dd in self.conjs
                if np.all(_row_lower_bounds(self.net, bounds, box, C) <= dd)
            ]
            if not live:
                self.stats["pruned"] += 1
                continue
            x = self._probe(box, live)
            if x is not None:
                return Status.SAT, x

            n_unstable = int(sum(b.unstable().sum() for l, b in zip(self.net.layers, bounds)
                                 if l.activation is Activation.RELU))
            tiny = bool(np.all(box.widths < self.cfg.min_width))
            if n_unstable <= self.cfg.phase_split_limit or tiny:
                self.stats["phase_leaves"] += 1
                if tiny:
                    self.stats["min_width_leaves"] += 1
                x = self._decide_leaf(box, bounds, live)
                if x is not None:
                    return Status.SAT, x
                continue

            dim = int(np.argmax(box.widths * self.influence))
            left, right = box.split(dim)
            self.splits += 1
            stack.append(right)
            stack.append(left)
        return Status.UNSAT, None


def complete_verify(q: VerificationQuery, config: SearchConfig | None = None) -> Verdict:
    """Decide whether some input in ``q.box`` satisfies ``q.condition``.

    Returns SAT with a checked witness, UNSAT, or UNKNOWN when ``q.timeout``
    (seconds) runs out.
    """
    if q.backend is not Backend.BUILTIN:
        raise ValueError(f"complete_verify runs the builtin backend, query asks for {q.backend.value}")
    cfg = config or SearchConfig()
    start = time.monotonic()
    search = _Search(q, cfg)
    status, witness = search.run(start + q.timeout)
    return Verdict(
        status=status,
        witness=witness,
        splits=search.splits,
        time=time.monotonic() - start,
        backend=Backend.BUILTIN,
        stats=search.stats,
    )
