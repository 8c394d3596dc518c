"""The seeded 100-query desk-scale suite shared by several test modules."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from negsel_verify.geometry import Box
from negsel_verify.network import Network
from negsel_verify.verifier import OutputCondition, VerificationQuery

from oracles import phase_enumeration_min

SUITE_SEED = 20221
SUITE_SIZE = 100
# queries whose optimum sits this close to the threshold are redrawn
MARGIN = 1e-6


def random_network(rng: np.random.Generator) -> Network:
    d = int(rng.integers(1, 4))
    hidden = [int(rng.integers(1, 7)) for _ in range(int(rng.integers(1, 3)))]
    m = int(rng.integers(1, 4))
    sizes = [d] + hidden + [m]
    weights = [rng.normal(size=(b, a)) for a, b in zip(sizes, sizes[1:])]
    biases = [rng.normal(scale=0.5, size=b) for b in sizes[1:]]
    return Network.from_weights(weights, biases)


def random_query(rng: np.random.Generator) -> tuple[VerificationQuery, float]:
    """A query and its exact optimum min coeffs . y over the box."""
    net = random_network(rng)
    d, m = net.input_dim, net.output_dim
    lo = rng.uniform(-1.0, 0.5, size=d)
    hi = lo + rng.uniform(0.05, 1.5, size=d)
    coeffs = rng.normal(size=m)
    opt, _ = phase_enumeration_min(net, lo, hi, coeffs)
    while True:
        # thresholds spread around the optimum: roughly half SAT, half UNSAT
        rhs = opt + rng.normal(scale=0.3)
        if abs(rhs - opt) > MARGIN:
            break
    relation = "<" if rng.random() < 0.3 else "<="
    q = VerificationQuery(
        net,
        Box.from_bounds(np.column_stack([lo, hi])),
        OutputCondition.single(coeffs, rhs, relation),
        timeout=60.0,
    )
    return q, opt


@lru_cache(maxsize=1)
def query_suite() -> tuple[tuple[VerificationQuery, bool], ...]:
    """(query, oracle says SAT) pairs."""
    rng = np.random.default_rng(SUITE_SEED)
    out = []
    for _ in range(SUITE_SIZE):
        q, opt = random_query(rng)
        ineq = q.condition.dnf[0][0]
        sat = opt < ineq.rhs if ineq.relation.value == "<" else opt <= ineq.rhs
        out.append((q, bool(sat)))
    return tuple(out)
