"""Feed-forward ReLU networks and the NNet text format.

The NNet layout (as shipped with the ACAS Xu benchmark networks)::

    // comment lines
    numLayers,inputSize,outputSize,maxLayerSize
    size_0,size_1,...,size_numLayers
    0                                   (unused flag)
    min_1,...,min_d
    max_1,...,max_d
    mean_1,...,mean_d,mean_out
    range_1,...,range_d,range_out
    <weight rows of layer 1>  one row per neuron, comma separated
    <bias rows of layer 1>    one value per line
    ...

Every hidden layer is followed by a ReLU; the output layer is affine.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np


class Activation(str, Enum):
    RELU = "relu"
    IDENTITY = "identity"


class NetworkError(ValueError):
    """Invalid network structure."""


class NNetFormatError(ValueError):
    """Malformed NNet text. ``line`` is 1-based, or None for end of file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else "end of file: "
        super().__init__(where + message)


def _frozen(a, ndim: int) -> np.ndarray:
    arr = np.array(a, dtype=np.float64, copy=True)
    if arr.ndim != ndim:
        raise NetworkError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Layer:
    weights: np.ndarray
    biases: np.ndarray
    activation: Activation = Activation.RELU

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen(self.weights, 2))
        object.__setattr__(self, "biases", _frozen(self.biases, 1))
        object.__setattr__(self, "activation", Activation(self.activation))
        if self.biases.shape[0] != self.weights.shape[0]:
            raise NetworkError(
                f"bias length {self.biases.shape[0]} != weight rows {self.weights.shape[0]}"
            )

    @property
    def in_size(self) -> int:
        return self.weights.shape[1]

    @property
    def out_size(self) -> int:
        return self.weights.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Layer):
            return NotImplemented
        return (
            self.activation == other.activation
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.biases, other.biases)
        )


@dataclass(frozen=True, eq=False)
class Network:
    """Immutable layered ReLU network with NNet normalization metadata.

    ``means`` and ``ranges`` have ``input_dim + 1`` entries; the last entry
    applies to every output.
    """

    layers: tuple[Layer, ...]
    input_mins: np.ndarray
    input_maxes: np.ndarray
    means: np.ndarray
    ranges: np.ndarray

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise NetworkError("a network needs at least one layer")
        object.__setattr__(self, "layers", layers)
        for name in ("input_mins", "input_maxes", "means", "ranges"):
            object.__setattr__(self, name, _frozen(getattr(self, name), 1))

        prev = layers[0].in_size
        if prev < 1:
            raise NetworkError("input dimension must be positive")
        for k, layer in enumerate(layers):
            if layer.in_size != prev:
                raise NetworkError(
                    f"layer {k} expects {layer.in_size} inputs but previous layer has {prev}"
                )
            prev = layer.out_size
        if layers[-1].activation is not Activation.IDENTITY:
            raise NetworkError("the output layer must not have an activation")

        d = self.input_dim
        if self.input_mins.shape != (d,) or self.input_maxes.shape != (d,):
            raise NetworkError(f"input mins/maxes must have length {d}")
        if self.means.shape != (d + 1,) or self.ranges.shape != (d + 1,):
            raise NetworkError(f"means/ranges must have length {d + 1}")
        if not np.all(self.ranges > 0):
            raise NetworkError("ranges must be strictly positive")

    @classmethod
    def from_weights(
        cls,
        weights: Sequence[np.ndarray],
        biases: Sequence[np.ndarray],
        *,
        input_mins=None,
        input_maxes=None,
        means=None,
        ranges=None,
    ) -> "Network":
        """ReLU after every layer except the last; identity normalization by default."""
        if len(weights) != len(biases):
            raise NetworkError("weights and biases must have the same number of layers")
        if not weights:
            raise NetworkError("a network needs at least one layer")
        n = len(weights)
        layers = tuple(
            Layer(w, b, Activation.IDENTITY if k == n - 1 else Activation.RELU)
            for k, (w, b) in enumerate(zip(weights, biases))
        )
        d = np.asarray(weights[0]).shape[1]
        return cls(
            layers=layers,
            input_mins=np.full(d, -np.inf) if input_mins is None else input_mins,
            input_maxes=np.full(d, np.inf) if input_maxes is None else input_maxes,
            means=np.zeros(d + 1) if means is None else means,
            ranges=np.ones(d + 1) if ranges is None else ranges,
        )

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_size

    @property
    def output_dim(self) -> int:
        return self.layers[-1].out_size

    @property
    def layer_sizes(self) -> list[int]:
        return [self.input_dim] + [layer.out_size for layer in self.layers]

    @property
    def num_relus(self) -> int:
        return sum(l.out_size for l in self.layers if l.activation is Activation.RELU)

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self.layers == other.layers
            and np.array_equal(self.input_mins, other.input_mins)
            and np.array_equal(self.input_maxes, other.input_maxes)
            and np.array_equal(self.means, other.means)
            and np.array_equal(self.ranges, other.ranges)
        )

    __hash__ = None


def normalize_input(net: Network, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return (x - net.means[:-1]) / net.ranges[:-1]


def forward(net: Network, x, normalized: bool = True) -> np.ndarray:
    """Evaluate the network.

    ``x`` may be a single vector or a batch with inputs along the last axis.
    If ``normalized`` is False the raw input is normalized first. The output
    stays in normalized units; see :func:`denormalize_output`.
    """
    h = np.asarray(x, dtype=np.float64)
    if h.shape[-1:] != (net.input_dim,):
        raise ValueError(f"expected input of length {net.input_dim}, got shape {h.shape}")
    if not normalized:
        h = normalize_input(net, h)
    for layer in net.layers:
        h = h @ layer.weights.T + layer.biases
        if layer.activation is Activation.RELU:
            h = np.maximum(h, 0.0)
    return h


def denormalize_output(net: Network, y) -> np.ndarray:
    return np.asarray(y, dtype=np.float64) * net.ranges[-1] + net.means[-1]


def normalize_output(net: Network, y) -> np.ndarray:
    return (np.asarray(y, dtype=np.float64) - net.means[-1]) / net.ranges[-1]


# ---------------------------------------------------------------------------
# NNet text format


def _fields(text: str, lineno: int) -> list[float]:
    parts = [p.strip() for p in text.split(",")]
    if parts and parts[-1] == "":
        parts.pop()
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise NNetFormatError(f"cannot parse numbers from {text.strip()!r}", lineno) from None


class _Lines:
    def __init__(self, lines: Iterable[str]):
        self._it = iter(enumerate(lines, start=1))
        self.lineno: int | None = None  # line of the last returned record

    def next(self, what: str) -> tuple[int, str]:
        for lineno, raw in self._it:
            s = raw.strip()
            if not s or s.startswith("//"):
                continue
            self.lineno = lineno
            return lineno, s
        raise NNetFormatError(f"truncated file, expected {what}")


def parse_nnet(source: str | TextIO) -> Network:
    """Parse NNet text (a string or a readable stream)."""
    text = source if isinstance(source, str) else source.read()
    lines = _Lines(text.splitlines())

    lineno, s = lines.next("header")
    header = _fields(s, lineno)
    if len(header) < 3 or any(v != int(v) or v < 1 for v in header[:3]):
        raise NNetFormatError("malformed header, expected numLayers,inputSize,outputSize,...", lineno)
    num_layers, input_size, output_size = (int(v) for v in header[:3])

    lineno, s = lines.next("layer sizes")
    sizes = _fields(s, lineno)
    if len(sizes) != num_layers + 1 or any(v != int(v) or v < 1 for v in sizes):
        raise NNetFormatError(
            f"expected {num_layers + 1} positive layer sizes, got {len(sizes)}", lineno
        )
    sizes = [int(v) for v in sizes]
    if sizes[0] != input_size or sizes[-1] != output_size:
        raise NNetFormatError("layer sizes disagree with header input/output sizes", lineno)

    lines.next("flag line")

    def vector(name: str, length: int) -> np.ndarray:
        ln, txt = lines.next(name)
        vals = _fields(txt, ln)
        if len(vals) != length:
            raise NNetFormatError(f"{name}: expected {length} values, got {len(vals)}", ln)
        return np.array(vals)

    mins = vector("input minima", input_size)
    maxes = vector("input maxima", input_size)
    means = vector("means", input_size + 1)
    ranges = vector("ranges", input_size + 1)
    if not np.all(ranges > 0):
        raise NNetFormatError("range entries must be strictly positive", lines.lineno)

    weights, biases = [], []
    for k in range(num_layers):
        rows, cols = sizes[k + 1], sizes[k]
        w = np.empty((rows, cols))
        for r in range(rows):
            ln, txt = lines.next(f"weight row {r} of layer {k}")
            vals = _fields(txt, ln)
            if len(vals) != cols:
                raise NNetFormatError(
                    f"layer {k} weight row has {len(vals)} entries, expected {cols}", ln
                )
            w[r] = vals
        b = np.empty(rows)
        for r in range(rows):
            ln, txt = lines.next(f"bias {r} of layer {k}")
            vals = _fields(txt, ln)
            if len(vals) != 1:
                raise NNetFormatError(
                    f"layer {k} bias row should hold one value, got {len(vals)} "
                    f"(declared layer size {rows})",
                    ln,
                )
            b[r] = vals[0]
        weights.append(w)
        biases.append(b)

    try:
        ln, txt = lines.next("end of file")
    except NNetFormatError:
        pass
    else:
        raise NNetFormatError(f"unexpected trailing data {txt[:40]!r}", ln)

    return Network.from_weights(
        weights, biases, input_mins=mins, input_maxes=maxes, means=means, ranges=ranges
    )


def load_nnet(path: str | Path) -> Network:
    return parse_nnet(Path(path).read_text())


def _fmt(v: float) -> str:
    # repr is the shortest string that round-trips; .17g pads to 17 significant digits.
    return format(float(v), ".17g")


def serialize_nnet(net: Network, comment: str | None = None) -> str:
    out = io.StringIO()
    if comment:
        for line in comment.splitlines():
            out.write(f"// {line}\n")
    sizes = net.layer_sizes
    out.write(f"{len(net.layers)},{net.input_dim},{net.output_dim},{max(sizes)},\n")
    out.write(",".join(str(s) for s in sizes) + ",\n")
    out.write("0,\n")
    for vec in (net.input_mins, net.input_maxes, net.means, net.ranges):
        out.write(",".join(_fmt(v) for v in vec) + ",\n")
    for layer in net.layers:
        for row in layer.weights:
            out.write(",".join(_fmt(v) for v in row) + ",\n")
        for b in layer.biases:
            out.write(_fmt(b) + ",\n")
    return out.getvalue()


def save_nnet(net: Network, path: str | Path, comment: str | None = None) -> None:
    Path(path).write_text(serialize_nnet(net, comment))


def describe(net: Network) -> str:
    lines = [
        f"input_dim:   {net.input_dim}",
        f"output_dim:  {net.output_dim}",
        f"layer sizes: {net.layer_sizes}",
        f"relus:       {net.num_relus}",
        f"input mins:  {net.input_mins.tolist()}",
        f"input maxes: {net.input_maxes.tolist()}",
        f"means:       {net.means.tolist()}",
        f"ranges:      {net.ranges.tolist()}",
    ]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# builders


def make_acas_like_tiny(seed: int = 2022) -> Network:
    """5 inputs, 5 outputs, two hidden layers of 8, seeded weights."""
    rng = np.random.default_rng(seed)
    sizes = [5, 8, 8, 5]
    weights = [rng.normal(0.0, 1.0 / np.sqrt(m), size=(n, m)) for m, n in zip(sizes, sizes[1:])]
    biases = [rng.normal(0.0, 0.1, size=n) for n in sizes[1:]]
    return Network.from_weights(
        weights,
        biases,
        input_mins=[0.0, -3.141593, -3.141593, 100.0, 0.0],
        input_maxes=[60760.0, 3.141593, 3.141593, 1200.0, 1200.0],
        means=[19791.091, 0.0, 0.0, 650.0, 600.0, 7.5188840201005975],
        ranges=[60261.0, 6.28318530718, 6.28318530718, 1100.0, 1200.0, 373.94992],
    )


def make_threshold_network(input_dim: int, dim: int = 0) -> Network:
    """ReLU network computing y = x[dim] exactly, as relu(x) - relu(-x)."""
    w1 = np.zeros((2, input_dim))
    w1[0, dim] = 1.0
    w1[1, dim] = -1.0
    return Network.from_weights([w1, np.array([[1.0, -1.0]])], [np.zeros(2), np.zeros(1)])
