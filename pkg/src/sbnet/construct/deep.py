"""Deep narrow networks that share probability mass along Gray codes.

Layout: hidden layers consist of ``2^j`` parallel blocks, one per value of
the first ``j`` input bits.  A block holds ``s`` a-units (the output under
construction) followed by ``d - j`` b-units that carry the remaining input
bits forward unchanged.  The block for face ``tau`` processes its
``2^(d-j)`` inputs one after another; the stretch of layers devoted to one
input is a subsection.

Each subsection starts with a gate layer (first subsection) or a copy
layer, after which the a-state sits at ``(1, 0, ..., 0)``.  Sharing steps
then spread the mass over {0,1}^s to match the target row.  Sharing states
include the b-bits, so a step only acts on the input it was built for.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from ..bitspace import (
    BitVec,
    PartialCodeSet,
    block_exponent,
    flipped_index,
    partial_codes,
    reflected_gray_code,
    sharing_code,
    to_bits,
)
from ..netcore import Kernel, Layer, Network, logit
from ..verify import clamp_to_eps
from .primitives import (
    SharingStep,
    _sharing_row,
    _stack_rows,
    _stick_breaking,
    copy_rows,
    gamma_for_eps,
    gate_block,
    or_output_layer,
    unit_prob_for_step,
)

SCHEDULES = ("simplified", "overlaid")


def prepare_target(target, eps: float, clamp: bool = True) -> Kernel:
    P = target if isinstance(target, Kernel) else Kernel(target)
    if not P.is_stochastic(1e-9):
        raise ValueError("target is not a Markov kernel")
    if clamp:
        return clamp_to_eps(P, eps)
    if np.any(P.probs < eps - 1e-12):
        raise ValueError("target has entries below eps; clamp it first")
    return P


def _single(cur: BitVec, nxt: BitVec, rho: float, layer: int) -> SharingStep:
    i = flipped_index(cur, nxt)
    return SharingStep(g=tuple(cur), i=i, rho=unit_prob_for_step(rho, nxt, i), layer=layer)


def simplified_steps(row: np.ndarray, s: int) -> list[list[SharingStep]]:
    """One single step per layer along the full sharing code."""
    code = sharing_code(s)
    rho = _stick_breaking(np.array([row[_dec(v)] for v in code]))
    return [[_single(code[r], code[r + 1], rho[r], r)] for r in range(len(code) - 1)]


def overlaid_codes(s: int) -> tuple[PartialCodeSet, list[int]]:
    """Partial codes for the a-block and the chain order of their heads."""
    b = block_exponent(s)
    if b is None:
        raise ValueError(f"overlaid schedule needs s = 2^(b-1) + b, got s={s}")
    pcs = partial_codes(s, b)
    head_index = {tuple(c[0]): k for k, c in enumerate(pcs.codes)}
    prefix = (1,) + (0,) * (s - b - 1)
    chain = [head_index[prefix + u] for u in reflected_gray_code(b)]
    return pcs, chain


def overlaid_steps(row: np.ndarray, s: int, pcs: PartialCodeSet, chain: list[int]) -> list[list[SharingStep]]:
    """Initial distribution over the code heads, then all codes in parallel.

    Steps of two codes that switch the same bit happen at Hamming-adjacent
    states and are merged into one (g, g_hat) unit.
    """
    codes = pcs.codes
    totals = np.array([sum(row[_dec(v)] for v in codes[k]) for k in chain])
    heads = [codes[k][0] for k in chain]
    rho = _stick_breaking(totals)
    layers = [[_single(heads[t], heads[t + 1], rho[t], t)] for t in range(len(heads) - 1)]
    rhos = [_stick_breaking(np.array([row[_dec(v)] for v in c])) for c in codes]
    for k in range(pcs.length - 1):
        by_bit: dict[int, list[SharingStep]] = {}
        for c, code in enumerate(codes):
            st = _single(code[k], code[k + 1], rhos[c][k], len(layers))
            by_bit.setdefault(st.i, []).append(st)
        layer = []
        for group in by_bit.values():
            if len(group) == 1:
                layer.append(group[0])
            else:
                first, second = group
                layer.append(
                    SharingStep(
                        g=first.g, i=first.i, rho=first.rho, g_hat=second.g, rho_hat=second.rho, layer=len(layers)
                    )
                )
        layers.append(layer)
    return layers


def _dec(v) -> int:
    return sum(int(bit) << i for i, bit in enumerate(v))


def _extend(step: SharingStep, tail: BitVec) -> SharingStep:
    return SharingStep(
        g=tuple(step.g) + tail,
        i=step.i,
        rho=step.rho,
        g_hat=None if step.g_hat is None else tuple(step.g_hat) + tail,
        rho_hat=step.rho_hat,
        layer=step.layer,
    )


def _block_rows(m: int, steps: list[SharingStep], tail: BitVec, gamma: float):
    W, b = copy_rows(m, gamma)
    for st in steps:
        W[st.i], b[st.i] = _sharing_row(m, _extend(st, tail), gamma)
    return W, b


def _block_diagonal(blocks: list[tuple[np.ndarray, np.ndarray]]) -> Layer:
    m = blocks[0][0].shape[0]
    W = np.zeros((m * len(blocks), m * len(blocks)))
    b = np.zeros(m * len(blocks))
    for k, (Wk, bk) in enumerate(blocks):
        W[k * m : (k + 1) * m, k * m : (k + 1) * m] = Wk
        b[k * m : (k + 1) * m] = bk
    return Layer(W, b)


def build_deep(
    target,
    j: int,
    eps: float,
    schedule: str = "simplified",
    clamp: bool = True,
) -> Network:
    """Deep approximator of ``target`` with shape coefficient ``j``.

    ``schedule="simplified"`` uses one sharing step per layer along a full
    Gray code (depth ``2^(d+s-j)``).  ``schedule="overlaid"`` runs partial
    codes side by side and requires ``s = 2^(b-1) + b``.  With ``j = d`` the
    first sharing step is folded into the gate layer.
    """
    P = prepare_target(target, eps, clamp)
    d, s = P.d, P.s
    if not 0 <= j <= d:
        raise ValueError(f"j must lie in [0, {d}], got {j}")
    if schedule not in SCHEDULES:
        raise ValueError(f"unknown schedule {schedule!r}")
    gamma = gamma_for_eps(eps)
    m = s + d - j
    n_blocks, n_sub = 1 << j, 1 << (d - j)
    if schedule == "overlaid":
        pcs, chain = overlaid_codes(s)
        steps_for = lambda row: overlaid_steps(row, s, pcs, chain)  # noqa: E731
    else:
        steps_for = lambda row: simplified_steps(row, s)  # noqa: E731
    save_one = j == d

    layers: list[Layer] = []
    for q in range(n_sub):
        tail = to_bits(q, d - j)
        plans = [steps_for(P.probs[tau + (q << j)]) for tau in range(n_blocks)]
        if q == 0:
            gates = []
            for tau in range(n_blocks):
                share = None
                if save_one:
                    first = plans[tau][0][0]
                    share = (first.i, logit(first.rho))
                gates.append(gate_block(d, s, j, tau, gamma, share))
            layers.append(_stack_rows(gates))
        else:
            layers.append(_block_diagonal([copy_rows(m, gamma)] * n_blocks))
        start = 1 if save_one else 0
        for depth in range(start, len(plans[0])):
            layers.append(
                _block_diagonal([_block_rows(m, plans[tau][depth], tail, gamma) for tau in range(n_blocks)])
            )
    layers.append(or_output_layer(d, s, j, eps))
    return Network(d, tuple(layers))


def second_layer_omegas(net: Network) -> np.ndarray:
    """Diagnostic for the j = d = s = 2 network: the weight from a_2 to a_1
    in each block of the second hidden layer."""
    W = net.layers[1].weights
    m = 2
    return np.array([W[k * m, k * m + 1] for k in range(W.shape[0] // m)])
