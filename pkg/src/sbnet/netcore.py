"""Exact semantics of layered sigmoid belief networks.

A layer maps a binary state ``h`` to a product distribution whose unit
probabilities are ``sigmoid(W @ h + b)``.  Kernels are dense row-stochastic
matrices indexed by ``dec`` of the input and output states.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import expit

from .bitspace import dec

# Max width (input or output) of a single layer for state enumeration.
ENUM_CAP = 20
# Max total hidden units for the brute-force oracle.
BRUTEFORCE_CAP = 24
# Rows of a layer kernel materialised at once.
_CHUNK = 4096


class CapacityError(ValueError):
    """State space too large to enumerate."""


def sigmoid(t):
    return expit(t)


def logit(p):
    """``log(p / (1 - p))``; rejects p outside the open unit interval."""
    arr = np.asarray(p, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError("logit is only defined on (0, 1)")
    out = np.log(arr) - np.log1p(-arr)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class Layer:
    weights: np.ndarray  # (out_width, in_width)
    biases: np.ndarray  # (out_width,)

    def __post_init__(self):
        W = np.array(self.weights, dtype=float, copy=True)
        b = np.array(self.biases, dtype=float, copy=True).reshape(-1)
        if W.ndim != 2:
            W = W.reshape(len(b), -1) if W.size == 0 else W
        if W.ndim != 2 or W.shape[0] != b.shape[0]:
            raise ValueError(f"weights {W.shape} do not match biases {b.shape}")
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
            raise ValueError("layer parameters must be finite")
        W.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", W)
        object.__setattr__(self, "biases", b)

    @property
    def in_width(self) -> int:
        return self.weights.shape[1]

    @property
    def out_width(self) -> int:
        return self.weights.shape[0]

    def unit_probs(self, states: np.ndarray) -> np.ndarray:
        """Firing probabilities for a batch of input states, shape (n, out)."""
        return expit(states @ self.weights.T + self.biases)


@dataclass(frozen=True, eq=False)
class Network:
    d: int
    layers: tuple[Layer, ...] = field(default_factory=tuple)

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("a network needs at least one layer")
        width = self.d
        for i, layer in enumerate(layers):
            if layer.in_width != width:
                raise ValueError(f"layer {i} expects {layer.in_width} inputs, got {width}")
            width = layer.out_width
        object.__setattr__(self, "layers", layers)

    @property
    def s(self) -> int:
        return self.layers[-1].out_width

    @property
    def hidden_widths(self) -> list[int]:
        return [layer.out_width for layer in self.layers[:-1]]

    @property
    def unit_count(self) -> int:
        """Units excluding inputs."""
        return sum(layer.out_width for layer in self.layers)

    def parameters(self) -> np.ndarray:
        """All weights and biases, flattened layer by layer."""
        return np.concatenate([np.concatenate([l.weights.ravel(), l.biases]) for l in self.layers])

    @property
    def param_count(self) -> int:
        return sum(l.weights.size + l.biases.size for l in self.layers)


@dataclass(frozen=True, eq=False)
class Kernel:
    """Row-stochastic matrix of shape (2^d, 2^s)."""

    probs: np.ndarray

    def __post_init__(self):
        P = np.array(self.probs, dtype=float, copy=True)
        if P.ndim == 1:
            P = P[None, :]
        d, s = _log2(P.shape[0]), _log2(P.shape[1])
        if d is None or s is None:
            raise ValueError(f"kernel shape {P.shape} is not (2^d, 2^s)")
        P.setflags(write=False)
        object.__setattr__(self, "probs", P)

    @property
    def d(self) -> int:
        return _log2(self.probs.shape[0])

    @property
    def s(self) -> int:
        return _log2(self.probs.shape[1])

    def row(self, x: Sequence[int]) -> np.ndarray:
        return self.probs[dec(x)]

    def is_stochastic(self, tol: float = 1e-12) -> bool:
        P = self.probs
        return bool(
            np.all(P >= -tol) and np.all(P <= 1 + tol) and np.allclose(P.sum(axis=1), 1.0, atol=tol, rtol=0)
        )


def _log2(n: int) -> int | None:
    if n < 1 or n & (n - 1):
        return None
    return n.bit_length() - 1


def state_matrix(n: int) -> np.ndarray:
    """All states of n bits as rows, in ascending ``dec`` order."""
    if n > ENUM_CAP:
        raise CapacityError(f"width {n} exceeds enumeration cap {ENUM_CAP}")
    idx = np.arange(1 << n)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(float)


def product_expand(unit_probs: Sequence[float]) -> np.ndarray:
    """Distribution over {0,1}^n of independent bits with the given P(bit=1)."""
    p = np.asarray(unit_probs, dtype=float).reshape(1, -1)
    return _expand(p)[0]


def _expand(p: np.ndarray) -> np.ndarray:
    # p: (rows, n) -> (rows, 2^n); unit 0 ends up least significant.
    out = np.ones((p.shape[0], 1))
    for j in range(p.shape[1]):
        pj = p[:, j : j + 1]
        out = np.concatenate([out * (1.0 - pj), out * pj], axis=1)
    return out


def _check_width(layer: Layer):
    if layer.in_width > ENUM_CAP or layer.out_width > ENUM_CAP:
        raise CapacityError(
            f"layer {layer.in_width}->{layer.out_width} exceeds enumeration cap {ENUM_CAP}"
        )


def layer_kernel(layer: Layer) -> Kernel:
    _check_width(layer)
    return Kernel(_expand(layer.unit_probs(state_matrix(layer.in_width))))


def _propagate(dist: np.ndarray, layer: Layer) -> np.ndarray:
    """``dist @ layer_kernel(layer)`` without materialising the whole kernel."""
    _check_width(layer)
    n_in = 1 << layer.in_width
    out = np.zeros((dist.shape[0], 1 << layer.out_width))
    for start in range(0, n_in, _CHUNK):
        stop = min(start + _CHUNK, n_in)
        idx = np.arange(start, stop)
        states = ((idx[:, None] >> np.arange(layer.in_width)) & 1).astype(float)
        out += dist[:, start:stop] @ _expand(layer.unit_probs(states))
    return out


def network_kernel(net: Network) -> Kernel:
    """Marginal kernel p(y|x): the ordered product of the layer kernels."""
    if net.d > ENUM_CAP:
        raise CapacityError(f"input width {net.d} exceeds enumeration cap {ENUM_CAP}")
    dist = np.eye(1 << net.d)
    for layer in net.layers:
        dist = _propagate(dist, layer)
    return Kernel(dist)


def compose(first: Kernel, second: Kernel) -> Kernel:
    if first.s != second.d:
        raise ValueError("kernel shapes do not chain")
    return Kernel(first.probs @ second.probs)


def network_kernel_bruteforce(net: Network, chunk: int = 1 << 15) -> Kernel:
    """Sum the full joint p(y, h^L, ..., h^1 | x) over every hidden tuple.

    Independent of ``layer_kernel``: each term is evaluated unit by unit
    from the definition.  Exponential in the number of hidden units.
    """
    widths = net.hidden_widths
    H = sum(widths)
    if H > BRUTEFORCE_CAP:
        raise CapacityError(f"{H} hidden units exceed brute-force cap {BRUTEFORCE_CAP}")
    if net.d > ENUM_CAP or net.s > ENUM_CAP:
        raise CapacityError("input/output width exceeds enumeration cap")
    offsets = np.concatenate([[0], np.cumsum(widths)]).astype(int)
    ys = np.array(list(itertools.product((0, 1), repeat=net.s)), dtype=float)[:, ::-1]
    y_index = (ys * (1 << np.arange(net.s))).sum(axis=1).astype(int)
    P = np.zeros((1 << net.d, 1 << net.s))

    def bern(states, W, b):
        with np.errstate(over="ignore"):
            on = 1.0 / (1.0 + np.exp(-(states @ W.T + b)))
        return on

    for xi in range(1 << net.d):
        x = np.array([(xi >> i) & 1 for i in range(net.d)], dtype=float)
        for start in range(0, 1 << H, chunk):
            idx = np.arange(start, min(start + chunk, 1 << H))
            bits = ((idx[:, None] >> np.arange(H)) & 1).astype(float)
            weight = np.ones(len(idx))
            prev = np.broadcast_to(x, (len(idx), net.d))
            for l, layer in enumerate(net.layers[:-1]):
                h = bits[:, offsets[l] : offsets[l + 1]]
                on = bern(prev, layer.weights, layer.biases)
                weight = weight * np.prod(np.where(h == 1, on, 1.0 - on), axis=1)
                prev = h
            last = net.layers[-1]
            on = bern(prev, last.weights, last.biases)  # (n, s)
            for y, col in zip(ys, y_index):
                py = np.prod(np.where(y == 1, on, 1.0 - on), axis=1)
                P[xi, col] += weight @ py
    return Kernel(P)


def sample(
    net: Network,
    x: Sequence[int],
    n: int,
    seed: int,
    key: Sequence[int] = (),
) -> np.ndarray:
    """Counts of output states from ``n`` ancestral samples given input ``x``.

    Random draws for layer ``l`` come from a generator keyed by
    ``(seed, *key, l)``, so results do not depend on evaluation order.
    """
    if len(x) != net.d:
        raise ValueError(f"input has {len(x)} bits, network expects {net.d}")
    if n < 1:
        raise ValueError("n must be >= 1")
    state = np.broadcast_to(np.asarray(x, dtype=float), (n, net.d))
    for l, layer in enumerate(net.layers):
        rng = np.random.default_rng(np.random.SeedSequence([seed, *key, l]))
        u = rng.random((n, layer.out_width))
        state = (u < layer.unit_probs(state)).astype(float)
    idx = (state.astype(np.int64) << np.arange(net.s)).sum(axis=1)
    return np.bincount(idx, minlength=1 << net.s)


def entropy_bits(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float).ravel()
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def mutual_information(joint) -> float:
    """MI(X;Y) in bits of a joint probability table (rows X, columns Y)."""
    J = np.asarray(joint, dtype=float)
    if J.ndim != 2 or np.any(J < 0) or abs(J.sum() - 1.0) > 1e-9:
        raise ValueError("joint must be a nonnegative matrix summing to 1")
    return entropy_bits(J.sum(axis=1)) + entropy_bits(J.sum(axis=0)) - entropy_bits(J)


def joint_from_kernel(kernel: Kernel, input_dist=None) -> np.ndarray:
    P = kernel.probs
    px = np.full(P.shape[0], 1.0 / P.shape[0]) if input_dist is None else np.asarray(input_dist, float)
    return px[:, None] * P


def random_network(widths: Sequence[int], rng: np.random.Generator, scale: float = 2.0) -> Network:
    """Gaussian weights/biases; ``widths`` = (d, m_1, ..., m_L, s)."""
    layers = [
        Layer(rng.normal(0.0, scale, (m, n)), rng.normal(0.0, scale, m))
        for n, m in zip(widths[:-1], widths[1:])
    ]
    return Network(widths[0], tuple(layers))


# -- JSON interchange -------------------------------------------------------
# Python's float repr is the shortest string that round-trips exactly, so
# plain ``json`` serialization is lossless.


def network_to_dict(net: Network) -> dict:
    return {
        "d": net.d,
        "layers": [{"W": l.weights.tolist(), "b": l.biases.tolist()} for l in net.layers],
    }


def network_from_dict(obj: dict) -> Network:
    d = int(obj["d"])
    layers = []
    width = d
    for entry in obj["layers"]:
        b = np.asarray(entry["b"], dtype=float)
        W = np.asarray(entry["W"], dtype=float).reshape(len(b), width)
        layers.append(Layer(W, b))
        width = len(b)
    return Network(d, tuple(layers))


def kernel_to_dict(kernel: Kernel) -> dict:
    return {"d": kernel.d, "s": kernel.s, "rows": kernel.probs.tolist()}


def kernel_from_dict(obj: dict) -> Kernel:
    K = Kernel(np.asarray(obj["rows"], dtype=float))
    if (K.d, K.s) != (int(obj["d"]), int(obj["s"])):
        raise ValueError(f"declared shape ({obj['d']}, {obj['s']}) does not match rows")
    if not K.is_stochastic(1e-9):
        raise ValueError("kernel rows must be probability distributions")
    return K
