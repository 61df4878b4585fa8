"""Shallow approximators with a single hidden layer.

Both constructions write a target row as the image of a product
distribution on hidden units under the map ``z -> bin(l(z))``, where
``l(z)`` is the largest index of an active unit.  The output layer
realizes that map with scaled orthant weights.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.optimize import brentq

from ..bitspace import to_bits
from ..netcore import Layer, Network, logit, sigmoid, state_matrix
from .deep import prepare_target
from .primitives import edge_hyperplane, face_hyperplane, gamma_for_eps, invert_product_chain, orthant_map_weights

VARIANTS = ("literal", "anchored")
MU_BRACKET = 50.0
MU_XTOL = 1e-12


def _gated_row(w_face: np.ndarray, c_face: float, logits: np.ndarray, gamma: float):
    """Scale a face functional so off-face units fire with probability <= eps."""
    alpha = 0.5 * (gamma + float(np.max(np.abs(logits))))
    return alpha * w_face, alpha * c_face


def build_shallow_fixed(target, eps: float, scale: Optional[float] = None, clamp: bool = True) -> Network:
    """One hidden block of ``2^s - 1`` units per pair of inputs differing in x_1.

    Only the hidden layer depends on the target; the output layer is the
    replicated orthant map times ``scale`` (default ``logit(1 - eps)``).
    """
    P = prepare_target(target, eps, clamp)
    d, s = P.d, P.s
    if s < 1:
        raise ValueError("s must be >= 1")
    gamma = gamma_for_eps(eps)
    scale = gamma if scale is None else float(scale)
    if d == 0:
        hidden = Layer(np.zeros(((1 << s) - 1, 0)), logit(invert_product_chain(P.probs[0])))
        n_blocks = 1
    else:
        Ws, bs = [], []
        for k in range(1 << (d - 1)):
            x1, x2 = to_bits(2 * k, d), to_bits(2 * k + 1, d)
            lo = np.atleast_1d(logit(invert_product_chain(P.probs[2 * k])))
            hi = np.atleast_1d(logit(invert_product_chain(P.probs[2 * k + 1])))
            w_face, c_face = edge_hyperplane(x1, x2)
            w, c = _gated_row(w_face, c_face, np.concatenate([lo, hi]), gamma)
            W = np.tile(w, (lo.size, 1))
            W[:, 0] += hi - lo
            Ws.append(W)
            bs.append(c + lo)
        hidden = Layer(np.vstack(Ws), np.concatenate(bs))
        n_blocks = 1 << (d - 1)
    Wq, bq = orthant_map_weights(s)
    out = Layer(scale * np.tile(Wq, (1, n_blocks)), scale * bq)
    return Network(d, (hidden, out))


def _conditional_mean(mu0: float, mu: np.ndarray, p: np.ndarray, l: int, mu_l: float) -> float:
    """E[sigmoid(mu0 + mu_l + sum_{k<l} mu_k z_k)] with z_k ~ Bernoulli(p_k)."""
    if l == 1:
        return float(sigmoid(mu0 + mu_l))
    Z = state_matrix(l - 1)
    pk = p[: l - 1]
    weights = np.prod(np.where(Z == 1, pk, 1.0 - pk), axis=1)
    return float(weights @ sigmoid(mu0 + mu_l + Z @ mu[: l - 1]))


def tune_mu(p: np.ndarray, t: np.ndarray, mu0: Optional[float] = None) -> tuple[float, np.ndarray]:
    """Weights from hidden units to the first output bit.

    Given ``l(z) = l``, the bit fires with probability ``t_l``.  ``mu_l`` only
    enters the cases with ``l(z) >= l``, so the weights are fixed one at a
    time; each target is strictly increasing in ``mu_l``.  ``mu0`` overrides
    the bias, as happens when it is shared by several blocks.
    """
    mu0 = logit(t[0]) if mu0 is None else mu0
    mu = np.zeros(p.size)
    for l in range(1, p.size + 1):
        f = lambda x: _conditional_mean(mu0, mu, p, l, x) - t[l]  # noqa: E731
        lo, hi = -MU_BRACKET, MU_BRACKET
        while f(lo) > 0:
            lo *= 2
        while f(hi) < 0:
            hi *= 2
        mu[l - 1] = brentq(f, lo, hi, xtol=MU_XTOL)
    return mu0, mu


def pair_split(row: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Masses of the pairs {2l, 2l+1} and the share of the odd member."""
    pair = row[0::2] + row[1::2]
    return pair, row[1::2] / pair


def build_shallow_trainable(
    target,
    eps: float,
    scale: Optional[float] = None,
    variant: Optional[str] = None,
    clamp: bool = True,
) -> Network:
    """One block of ``2^(s-1) - 1`` units per input, plus a tuned first output.

    Output bits 2..s read ``l(z)`` through the (s-1)-bit orthant map; the
    first output bit has tuned weights ``mu`` so that its odds inside each
    pair of outputs match the target.  ``literal`` uses one shared output
    bias for all blocks, which can only fit every row when d = 0.
    ``anchored`` (default for d >= 1) gives each block an always-on unit
    whose weight plays the role of that bias.
    """
    P = prepare_target(target, eps, clamp)
    d, s = P.d, P.s
    if s < 2:
        raise ValueError("the trainable shallow construction needs s >= 2")
    variant = variant or ("literal" if d == 0 else "anchored")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    gamma = gamma_for_eps(eps)
    scale = gamma if scale is None else float(scale)
    N = (1 << (s - 1)) - 1
    anchored = variant == "anchored"
    width = N + int(anchored)
    Wq, bq = orthant_map_weights(s - 1)

    hid_W, hid_b, mu_row, q_cols = [], [], [], []
    shared_mu0 = None
    for x in range(1 << d):
        pair, odd = pair_split(P.probs[x])
        p = invert_product_chain(pair)
        logits = logit(p)
        mu0, mu = tune_mu(p, odd, None if anchored else shared_mu0)
        if shared_mu0 is None:
            shared_mu0 = mu0
        w_face, c_face = face_hyperplane(to_bits(x, d), range(d), d)
        w, c = _gated_row(w_face, c_face, logits, gamma)
        W = np.tile(w, (N, 1))
        b = c + logits
        if anchored:
            W = np.vstack([W, gamma * w_face])
            b = np.append(b, gamma + gamma * c_face)
            mu = np.append(mu, mu0)
        hid_W.append(W)
        hid_b.append(b)
        mu_row.append(mu)
        q_cols.append(np.hstack([Wq, np.zeros((s - 1, width - N))]))
    hidden = Layer(np.vstack(hid_W), np.concatenate(hid_b))
    out_W = np.vstack([np.concatenate(mu_row), scale * np.hstack(q_cols)])
    out_b = np.concatenate([[0.0 if anchored else shared_mu0], scale * bq])
    return Network(d, (hidden, Layer(out_W, out_b)))
