"""Ask the complete verifier whether each advisory can be the top score on a small box.

Uses the bundled 5-8-8-5 network. For each output k we check whether some
input in the box makes y_k maximal (SAT gives a concrete witness).

    python3 demos/02_verify_tiny_network.py
"""
from importlib import resources

import numpy as np

from negsel_verify.geometry import Box
from negsel_verify.network import describe, forward, load_nnet
from negsel_verify.verifier import VerificationQuery, complete_verify, falsify_sample, output_maximal

net = load_nnet(resources.files("negsel_verify").joinpath("data", "acas_like_tiny.nnet"))
print(describe(net), "\n")

box = Box.from_bounds([[0.6, 0.67985], [-0.5, 0.5], [-0.5, 0.5], [0.45, 0.5], [-0.5, -0.45]])
for k in range(net.output_dim):
    q = VerificationQuery(net, box, output_maximal(k, net.output_dim), timeout=30)
    quick = falsify_sample(q, 2000, seed=k)
    v = quick if quick.status.value == "sat" else complete_verify(q)
    line = f"output {k} maximal somewhere: {v.status.value:7s}"
    if v.witness is not None:
        line += f" x={np.round(v.witness, 4)} y={np.round(forward(net, v.witness), 3)}"
    else:
        line += f" nodes={v.stats.get('nodes')} lp_calls={v.stats.get('lp_calls')}"
    print(line)
