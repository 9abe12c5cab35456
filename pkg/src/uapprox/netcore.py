"""Layered network IR shared by every construction, plus its evaluator.

Units are stored individually (not as weight matrices) so the census of
step/ReLU/sine units is a plain count.  Each unit reads a sparse list of
outputs of the previous layer; layer 0 reads the input (a scalar for every
approximating network; the product gadget takes two inputs).

Evaluation semantics
--------------------
``pre = sum_i w_i * in_i + bias`` where each product is rounded once and the
sum (bias included) is then *correctly rounded*, i.e. computed as
``math.fsum``.  This makes the network arithmetic independent of summation
order, which the bit-level constructions rely on to reproduce a Horner
evaluation exactly.  Non-finite terms fall back to plain left-to-right
summation.
"""

from __future__ import annotations

import dataclasses
import json
from collections import Counter
from typing import Iterable, Sequence

import numpy as np

from . import _backend

ACTIVATIONS = ("identity", "relu", "binary_step", "sine")
_ACT_CODE = {name: code for code, name in enumerate(ACTIVATIONS)}


@dataclasses.dataclass(frozen=True)
class Unit:
    activation: str
    inputs: tuple[int, ...]
    weights: tuple[float, ...]
    bias: float = 0.0

    def __post_init__(self):
        if self.activation not in _ACT_CODE:
            raise ValueError(f"unknown activation {self.activation!r}")
        if len(self.inputs) != len(self.weights):
            raise ValueError("one weight per input edge is required")


def unit(activation: str, edges: dict[int, float] | Sequence[tuple[int, float]] = (),
         bias: float = 0.0) -> Unit:
    items = list(edges.items()) if isinstance(edges, dict) else list(edges)
    return Unit(activation, tuple(int(i) for i, _ in items),
                tuple(float(w) for _, w in items), float(bias))


@dataclasses.dataclass(frozen=True)
class NetworkGraph:
    """Layers of units, a linear read-out of the last layer, and skip read-outs.

    ``skips`` holds ``(layer_index, weights)`` pairs whose weights apply to the
    outputs of that hidden layer and are added into the final output.
    """

    layers: tuple[tuple[Unit, ...], ...]
    output_weights: tuple[float, ...] = ()
    skips: tuple[tuple[int, tuple[float, ...]], ...] = ()
    output_bias: float = 0.0
    n_inputs: int = 1

    def __post_init__(self):
        width = self.n_inputs
        for depth, layer in enumerate(self.layers):
            for u in layer:
                if any(i < 0 or i >= width for i in u.inputs):
                    raise ValueError(f"layer {depth} reads past the previous layer")
            width = len(layer)
        last = len(self.layers[-1]) if self.layers else 0
        if self.output_weights and len(self.output_weights) != last:
            raise ValueError("output weights must match the last layer width")
        for src, w in self.skips:
            if not 0 <= src < len(self.layers):
                raise ValueError(f"skip source {src} is not a hidden layer")
            if len(w) != len(self.layers[src]):
                raise ValueError("skip weights must match the source layer width")

    @property
    def depth(self) -> int:
        return len(self.layers)

    def scaled_output(self, alpha: float) -> "NetworkGraph":
        """Same network with every read-out weight multiplied by ``alpha``."""
        return dataclasses.replace(
            self,
            output_weights=tuple(alpha * w for w in self.output_weights),
            skips=tuple((s, tuple(alpha * w for w in ws)) for s, ws in self.skips),
        )


def count_units(net: NetworkGraph) -> dict[str, int]:
    counts = Counter(u.activation for layer in net.layers for u in layer)
    return {name: counts.get(name, 0) for name in ACTIVATIONS}


# -- lowering to the flat program the kernels execute ------------------------


@dataclasses.dataclass(frozen=True)
class Program:
    act: np.ndarray  # int8, one per unit
    ptr: np.ndarray  # int64, CSR offsets into src/w
    src: np.ndarray  # int64, absolute node index (0 is the input)
    w: np.ndarray
    bias: np.ndarray
    layer_ptr: np.ndarray  # node index of each layer's first unit, plus end
    out_src: np.ndarray
    out_w: np.ndarray
    out_bias: float
    n_inputs: int


def compile_net(net: NetworkGraph) -> Program:
    act, ptr, src, w, bias, layer_ptr = [], [0], [], [], [], [net.n_inputs]
    prev_start = 0  # node index of the previous layer's first node (inputs come first)
    for layer in net.layers:
        for u in layer:
            act.append(_ACT_CODE[u.activation])
            src.extend(prev_start + i for i in u.inputs)
            w.extend(u.weights)
            ptr.append(len(src))
            bias.append(u.bias)
        prev_start = layer_ptr[-1]
        layer_ptr.append(layer_ptr[-1] + len(layer))
    out_src, out_w = [], []
    if net.layers and net.output_weights:
        start = layer_ptr[-2]
        for i, wt in enumerate(net.output_weights):
            if wt != 0.0:
                out_src.append(start + i)
                out_w.append(wt)
    for s, ws in net.skips:
        start = layer_ptr[s]
        for i, wt in enumerate(ws):
            if wt != 0.0:
                out_src.append(start + i)
                out_w.append(wt)
    return Program(
        act=np.asarray(act, dtype=np.int8),
        ptr=np.asarray(ptr, dtype=np.int64),
        src=np.asarray(src, dtype=np.int64),
        w=np.asarray(w, dtype=float),
        bias=np.asarray(bias, dtype=float),
        layer_ptr=np.asarray(layer_ptr, dtype=np.int64),
        out_src=np.asarray(out_src, dtype=np.int64),
        out_w=np.asarray(out_w, dtype=float),
        out_bias=float(net.output_bias),
        n_inputs=net.n_inputs,
    )


_PROGRAM_CACHE: dict[int, tuple[NetworkGraph, Program]] = {}


def _program(net: NetworkGraph) -> Program:
    hit = _PROGRAM_CACHE.get(id(net))
    if hit is not None and hit[0] is net:
        return hit[1]
    prog = compile_net(net)
    if len(_PROGRAM_CACHE) > 64:
        _PROGRAM_CACHE.clear()
    _PROGRAM_CACHE[id(net)] = (net, prog)
    return prog


def _as_inputs(net: NetworkGraph, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if net.n_inputs == 1:
        xs = xs.reshape(-1, 1)
    elif xs.ndim == 1:
        xs = xs.reshape(1, -1)
    if xs.shape[1] != net.n_inputs:
        raise ValueError(f"network takes {net.n_inputs} inputs, got {xs.shape[1]}")
    return np.ascontiguousarray(xs)


def forward(net: NetworkGraph, x) -> float:
    """Network output at one input (a scalar, or a tuple for multi-input nets)."""
    return float(forward_many(net, [x] if net.n_inputs > 1 else [float(x)])[0])


def forward_many(net: NetworkGraph, xs) -> np.ndarray:
    """Outputs for a batch: shape (N,) for scalar-input nets, (N, n_inputs) otherwise."""
    p = _program(net)
    return _backend.kernels.forward_many(
        p.act, p.ptr, p.src, p.w, p.bias, p.out_src, p.out_w, p.out_bias, _as_inputs(net, xs)
    )


def forward_layers(net: NetworkGraph, x) -> list[np.ndarray]:
    """Outputs of every hidden layer at ``x`` (index 0 is the first hidden layer)."""
    p = _program(net)
    nodes = _backend.kernels.forward_nodes(p.act, p.ptr, p.src, p.w, p.bias,
                                           _as_inputs(net, [x] if net.n_inputs > 1 else [x])[0])
    return [nodes[a:b].copy() for a, b in zip(p.layer_ptr[:-1], p.layer_ptr[1:])]


# -- JSON ----------------------------------------------------------------------


def to_dict(net: NetworkGraph) -> dict:
    return {
        "layers": [
            [
                {"activation": u.activation, "inputs": list(u.inputs),
                 "weights": list(u.weights), "bias": u.bias}
                for u in layer
            ]
            for layer in net.layers
        ],
        "output_weights": list(net.output_weights),
        "skips": [{"source": s, "weights": list(w)} for s, w in net.skips],
        "output_bias": net.output_bias,
        "n_inputs": net.n_inputs,
    }


def from_dict(doc: dict) -> NetworkGraph:
    layers = tuple(
        tuple(Unit(u["activation"], tuple(u["inputs"]), tuple(float(v) for v in u["weights"]),
                   float(u["bias"])) for u in layer)
        for layer in doc["layers"]
    )
    return NetworkGraph(
        layers=layers,
        output_weights=tuple(float(v) for v in doc.get("output_weights", ())),
        skips=tuple((int(s["source"]), tuple(float(v) for v in s["weights"]))
                    for s in doc.get("skips", ())),
        output_bias=float(doc.get("output_bias", 0.0)),
        n_inputs=int(doc.get("n_inputs", 1)),
    )


def dumps(net: NetworkGraph) -> str:
    # repr-based float formatting round-trips every double exactly
    return json.dumps(to_dict(net))


def loads(text: str) -> NetworkGraph:
    return from_dict(json.loads(text))
