"""Interval bound propagation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import Box
from ..network import Activation, Network


@dataclass(frozen=True)
class LayerBounds:
    pre_lo: np.ndarray
    pre_hi: np.ndarray
    post_lo: np.ndarray
    post_hi: np.ndarray

    def unstable(self) -> np.ndarray:
        return (self.pre_lo < 0.0) & (self.pre_hi > 0.0)


def affine_bounds(W: np.ndarray, b: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    Wp = np.maximum(W, 0.0)
    Wn = np.minimum(W, 0.0)
    return Wp @ lo + Wn @ hi + b, Wp @ hi + Wn @ lo + b


def ibp_bounds(net: Network, box: Box) -> list[LayerBounds]:
    """Per-layer pre/post-activation intervals valid for every input in ``box``."""
    if box.ndim != net.input_dim:
        raise ValueError(f"box has {box.ndim} dims, network expects {net.input_dim}")
    lo, hi = box.lower, box.upper
    out = []
    for layer in net.layers:
        plo, phi = affine_bounds(layer.weights, layer.biases, lo, hi)
        if layer.activation is Activation.RELU:
            lo, hi = np.maximum(plo, 0.0), np.maximum(phi, 0.0)
        else:
            lo, hi = plo, phi
        out.append(LayerBounds(plo, phi, lo, hi))
    return out


def output_bounds(net: Network, box: Box) -> tuple[np.ndarray, np.ndarray]:
    b = ibp_bounds(net, box)[-1]
    return b.post_lo, b.post_hi
