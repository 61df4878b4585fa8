"""Building blocks shared by the shallow and deep constructions.

Throughout, ``gamma = logit(1 - eps)`` is the pre-activation magnitude at
which a unit is "on" or "off" with probability ``1 - eps``.  Every affine
function of a binary state is handled as a pair ``(w, c)`` meaning
``h -> w @ h + c``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..bitspace import BitVec, all_states, flipped_index, hamming
from ..netcore import Layer, logit


def gamma_for_eps(eps: float) -> float:
    _check_eps(eps)
    return logit(1.0 - eps)


def _check_eps(eps: float):
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")


def error_bound(eps: float, N: int) -> float:
    """Worst-case entrywise error ``1 - (1-eps)^N + 2 eps`` for N noisy units."""
    _check_eps(eps)
    if N < 1:
        raise ValueError("N must be >= 1")
    return 1.0 - (1.0 - eps) ** N + 2.0 * eps


def alpha_for_eps(eps: float, m: int) -> float:
    """Parameter magnitude ``2 m logit(1-eps)`` needed for unit error eps."""
    return 2.0 * m * gamma_for_eps(eps)


# -- affine indicators ------------------------------------------------------


def _mismatch(g: Sequence[int], k: int, m: int) -> tuple[np.ndarray, float]:
    """Affine 0/1 indicator of ``h_k != g_k``."""
    w = np.zeros(m)
    if g[k]:
        w[k] = -1.0
        return w, 1.0
    w[k] = 1.0
    return w, 0.0


def _mismatch_count(g: Sequence[int], coords: Sequence[int], m: int) -> tuple[np.ndarray, float]:
    w, c = np.zeros(m), 0.0
    for k in coords:
        wk, ck = _mismatch(g, k, m)
        w += wk
        c += ck
    return w, c


def edge_hyperplane(x1: Sequence[int], x2: Sequence[int]) -> tuple[np.ndarray, float]:
    """Affine map that is 0 on the edge {x1, x2} and at most -2 elsewhere.

    It is ``-2`` times the number of mismatches with ``x1`` on the
    coordinates where the two endpoints agree.
    """
    if len(x1) != len(x2) or hamming(x1, x2) != 1:
        raise ValueError(f"{tuple(x1)} and {tuple(x2)} do not form an edge")
    k0 = flipped_index(x1, x2)
    w, c = _mismatch_count(x1, [k for k in range(len(x1)) if k != k0], len(x1))
    return -2.0 * w, -2.0 * c


def face_hyperplane(g: Sequence[int], coords: Sequence[int], n: int) -> tuple[np.ndarray, float]:
    """``-2 * (mismatches with g on coords)``: 0 on the face, <= -2 off it."""
    w, c = _mismatch_count(_embed(g, coords, n), coords, n)
    return -2.0 * w, -2.0 * c


def _embed(g, coords, n):
    full = [0] * n
    for k, bit in zip(coords, g):
        full[k] = bit
    return full


def orthant_map_weights(s: int) -> tuple[np.ndarray, np.ndarray]:
    """Affine map on {0,1}^(2^s - 1) sending z into the orthant of bin_s(l(z)).

    Column ``l`` is ``2^l (2 bin_s(l) - 1)``; the bias is all ``-1``.  The
    highest set unit dominates the sum of all lower columns, so the sign
    pattern is decided by ``l(z)``.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    N = (1 << s) - 1
    W = np.empty((s, N))
    for l in range(1, N + 1):
        bits = np.array([(l >> i) & 1 for i in range(s)], dtype=float)
        W[:, l - 1] = (2.0 ** l) * (2.0 * bits - 1.0)
    return W, -np.ones(s)


def invert_product_chain(q: Sequence[float]) -> np.ndarray:
    """Unit probabilities whose product distribution, read through z -> l(z),
    reproduces ``q``.

    Returns ``p_i = P(z_i = 1) = q_i / (q_0 + ... + q_i)`` for i = 1..2^s-1.
    Then ``P(l(z) = i) = p_i * prod_{k>i} (1 - p_k) = q_i``.
    """
    q = np.asarray(q, dtype=float)
    n = q.size
    if n < 2 or n & (n - 1):
        raise ValueError("q must have 2^s entries with s >= 1")
    if np.any(q <= 0):
        raise ValueError("q must be strictly positive; clamp it first")
    if abs(q.sum() - 1.0) > 1e-9:
        raise ValueError("q must sum to 1")
    head = np.cumsum(q)
    return q[1:] / head[1:]


def largest_index_distribution(p: Sequence[float]) -> np.ndarray:
    """Distribution of ``l(z)`` for independent z_i ~ Bernoulli(p_i)."""
    p = np.asarray(p, dtype=float)
    out = np.empty(p.size + 1)
    above = 1.0
    for i in range(p.size, 0, -1):
        out[i] = p[i - 1] * above
        above *= 1.0 - p[i - 1]
    out[0] = above
    return out


def invert_sharing_chain(target_row: Sequence[float], code: Sequence[BitVec]) -> np.ndarray:
    """Continuing probabilities of stick-breaking along ``code``.

    Code entry ``r`` (1-based) receives ``rho_1 ... rho_{r-1} (1 - rho_r)``
    and the last entry receives the product of all ``rho``.  Hence
    ``rho_r = tail_{>r} / tail_{>=r}`` where tails are target masses of
    later code entries.  Works for partial codes too, in which case the
    masses are taken relative to the code's own total.
    """
    row = np.asarray(target_row, dtype=float)
    mass = np.array([row[_dec(v)] for v in code])
    return _stick_breaking(mass)


def _dec(v):
    return sum(int(b) << i for i, b in enumerate(v))


def _stick_breaking(mass: np.ndarray) -> np.ndarray:
    tails = np.cumsum(mass[::-1])[::-1]  # tails[r] = sum_{t >= r}
    if np.any(tails[1:] <= 0):
        raise ValueError("tail mass vanishes; clamp the target first")
    return tails[1:] / tails[:-1]


def unit_prob_for_step(rho: float, nxt: Sequence[int], i: int) -> float:
    """P(unit i = 1) that continues to ``nxt`` with probability ``rho``."""
    return rho if nxt[i] else 1.0 - rho


@dataclass(frozen=True)
class SharingStep:
    """One unit's job in a sharing layer.

    ``rho`` is P(unit i = 1 | h = g).  With ``g_hat`` set, the same unit also
    serves the neighbour ``g_hat`` with ``rho_hat``; otherwise the step is a
    single step and only the bias depends on ``rho``.
    """

    g: BitVec
    i: int
    rho: float
    g_hat: Optional[BitVec] = None
    rho_hat: Optional[float] = None
    layer: int = 0

    def __post_init__(self):
        if not 0 <= self.i < len(self.g):
            raise ValueError(f"unit index {self.i} out of range")
        if self.g_hat is not None:
            if len(self.g_hat) != len(self.g) or hamming(self.g, self.g_hat) != 1:
                raise ValueError("g and g_hat must be Hamming neighbours")
            if flipped_index(self.g, self.g_hat) == self.i:
                raise ValueError("the sharing unit cannot be the bit where g and g_hat differ")
            if self.rho_hat is None:
                raise ValueError("rho_hat is required with g_hat")

    @property
    def j(self) -> Optional[int]:
        return None if self.g_hat is None else flipped_index(self.g, self.g_hat)


def _sharing_row(m: int, step: SharingStep, gamma: float) -> tuple[np.ndarray, float]:
    g, i = step.g, step.i
    a = logit(step.rho)
    sign = -1.0 if g[i] else 1.0
    Q = 2.0 * gamma
    f_w, f_c = _mismatch(g, i, m)
    if step.g_hat is None:
        P = 2.0 * gamma * m
        d_w, d_c = _mismatch_count(g, [k for k in range(m) if k != i], m)
        w = sign * P * f_w - sign * Q * d_w
        c = a + sign * P * f_c - sign * Q * d_c
        return w, c
    j = step.j
    a_hat = logit(step.rho_hat)
    P = 2.0 * gamma * (m - 1)
    # xi: indicator of h_j == g_hat_j, i.e. of h_j != g_j.
    x_w, x_c = _mismatch(g, j, m)
    d_w, d_c = _mismatch_count(g, [k for k in range(m) if k not in (i, j)], m)
    w = (a_hat - a) * x_w + sign * P * f_w - sign * Q * d_w
    c = a + (a_hat - a) * x_c + sign * P * f_c - sign * Q * d_c
    return w, c


def copy_rows(m: int, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    return 2.0 * gamma * np.eye(m), -gamma * np.ones(m)


def copy_layer(m: int, eps: float) -> Layer:
    """Each unit copies its predecessor with probability 1 - eps."""
    W, b = copy_rows(m, gamma_for_eps(eps))
    return Layer(W, b)


def sharing_layer(m: int, step: SharingStep, eps: float) -> Layer:
    """Copy layer whose unit ``step.i`` instead performs a sharing step.

    On ``g`` (and ``g_hat``) the unit fires with probability ``rho``
    (``rho_hat``) while the rest copy with probability 1 - eps; every other
    state is copied by every unit with probability at least 1 - eps.
    """
    gamma = gamma_for_eps(eps)
    if len(step.g) != m:
        raise ValueError(f"step state has {len(step.g)} bits, layer has {m}")
    for r in (step.rho, step.rho_hat):
        if r is not None and not eps - 1e-12 <= r <= 1.0 - eps + 1e-12:
            raise ValueError(f"sharing probability {r} outside [eps, 1-eps]")
    W, b = copy_rows(m, gamma)
    W[step.i], b[step.i] = _sharing_row(m, step, gamma)
    return Layer(W, b)


def block_diag_layer(blocks: Sequence[tuple[np.ndarray, np.ndarray]]) -> Layer:
    rows = sum(W.shape[0] for W, _ in blocks)
    cols = sum(W.shape[1] for W, _ in blocks)
    W_all, b_all = np.zeros((rows, cols)), np.zeros(rows)
    r = c = 0
    for W, b in blocks:
        W_all[r : r + W.shape[0], c : c + W.shape[1]] = W
        b_all[r : r + W.shape[0]] = b
        r += W.shape[0]
        c += W.shape[1]
    return Layer(W_all, b_all)


# -- deep construction layers ----------------------------------------------


def _gate_unit(x_bits: BitVec, j: int, d: int, gamma: float, on_value: float):
    """Unit with pre-activation ``on_value`` on the face x[:j] == x_bits and
    at most ``on_value - 2 gamma`` off it."""
    w, c = face_hyperplane(x_bits, range(j), d)
    return gamma * w, on_value + gamma * c


def gate_block(
    d: int, s: int, j: int, tau: int, gamma: float, share: Optional[tuple[int, float]] = None
) -> tuple[np.ndarray, np.ndarray]:
    """Rows of block ``tau`` in the first hidden layer.

    ``share = (i, a)`` gives unit ``a_i`` pre-activation ``a`` on the face
    (the save-one-layer variant); otherwise only ``a_1`` is gated on.
    """
    m = s + d - j
    W, b = np.zeros((m, d)), np.full(m, -gamma)
    g = tuple((tau >> k) & 1 for k in range(j))
    share_i = None if share is None else share[0]
    if share_i != 0:
        W[0], b[0] = _gate_unit(g, j, d, gamma, gamma)
    if share is not None:
        W[share_i], b[share_i] = _gate_unit(g, j, d, gamma, share[1])
    for k in range(d - j):
        W[s + k, j + k] = 2.0 * gamma
    return W, b


def gate_layer(d: int, s: int, j: int, eps: float) -> Layer:
    """First hidden layer: block tau switches on iff x[:j] encodes tau."""
    if not 0 <= j <= d:
        raise ValueError(f"j must lie in [0, {d}]")
    gamma = gamma_for_eps(eps)
    return _stack_rows([gate_block(d, s, j, tau, gamma) for tau in range(1 << j)])


def _stack_rows(blocks):
    return Layer(np.vstack([W for W, _ in blocks]), np.concatenate([b for _, b in blocks]))


def or_output_layer(d: int, s: int, j: int, eps: float) -> Layer:
    """Output bit i is an OR over bit a_i of every block."""
    gamma = gamma_for_eps(eps)
    m = s + d - j
    W = np.zeros((s, (1 << j) * m))
    for tau in range(1 << j):
        W[:, tau * m : tau * m + s] = 2.0 * gamma * np.eye(s)
    return Layer(W, -gamma * np.ones(s))


def states_mapping_to_self(layer: Layer, exclude: Sequence[BitVec] = ()) -> dict[BitVec, float]:
    """Diagnostic: self-transition probability of every state not excluded."""
    from ..netcore import layer_kernel

    K = layer_kernel(layer).probs
    skip = {tuple(v) for v in exclude}
    return {v: float(K[k, k]) for k, v in enumerate(all_states(layer.in_width)) if v not in skip}
