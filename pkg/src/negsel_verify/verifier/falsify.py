"""Uniform-sampling counterexample search. Never returns UNSAT."""

from __future__ import annotations

import time

import numpy as np

from ..network import forward
from .query import Backend, Status, VerificationQuery, Verdict

_BATCH = 8192


def falsify_sample(q: VerificationQuery, samples: int = 1000, seed: int = 0) -> Verdict:
    start = time.monotonic()
    rng = np.random.default_rng(seed)
    lo, hi = q.box.lower, q.box.upper
    done = 0
    while done < samples:
        k = min(_BATCH, samples - done)
        X = lo + (hi - lo) * rng.random((k, lo.shape[0]))
        hit = q.condition.holds_batch(forward(q.network, X))
        if hit.any():
            i = int(np.argmax(hit))
            return Verdict(
                Status.SAT,
                X[i],
                time=time.monotonic() - start,
                backend=Backend.SAMPLER,
                stats={"samples": done + i + 1},
            )
        done += k
    return Verdict(
        Status.UNKNOWN,
        time=time.monotonic() - start,
        backend=Backend.SAMPLER,
        stats={"samples": done},
    )
