"""Error metrics, random targets and the reference experiment harness."""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .bitspace import to_bits
from .netcore import Kernel, network_kernel, sample

# The reference experiment's epsilon ladder (10 eps = 2^-2 ... 2^-6).
TABLE_EPS = (0.025, 0.0125, 0.00625, 0.003125, 0.0015625)
# Average errors published alongside that ladder, estimated from samples.
PUBLISHED_E_AVG = (0.0522, 0.0248, 0.0134, 0.0077, 0.0060)
TABLE_UNITS = 18


def max_abs_error(P, P_star) -> float:
    A = P.probs if isinstance(P, Kernel) else np.asarray(P, dtype=float)
    B = P_star.probs if isinstance(P_star, Kernel) else np.asarray(P_star, dtype=float)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    return float(np.max(np.abs(A - B)))


def clamp_to_eps(P, eps: float) -> Kernel:
    """Push every entry into [eps, 1 - eps] keeping rows normalized.

    Entries below eps are raised to eps; the deficit is removed from the
    excess ``p - eps`` of the remaining entries in proportion to it.  Rows
    already inside the slab are returned unchanged.
    """
    A = P.probs if isinstance(P, Kernel) else np.atleast_2d(np.asarray(P, dtype=float))
    n = A.shape[1]
    if not 0.0 < eps <= 1.0 / n:
        raise ValueError(f"eps must lie in (0, 1/{n}] for rows of length {n}")
    out = A.copy()
    for r, row in enumerate(A):
        if np.all(row >= eps):
            continue
        excess = np.maximum(row - eps, 0.0)
        deficit = np.maximum(eps - row, 0.0).sum()
        out[r] = eps + excess * (1.0 - deficit / excess.sum()) if excess.sum() > 0 else eps
        out[r] /= out[r].sum()
    return Kernel(out)


def random_kernel(d: int, s: int, seed: int, trial: int = 0) -> Kernel:
    """Rows i.i.d. uniform on the simplex (Dirichlet with all parameters 1)."""
    rows = []
    for r in range(1 << d):
        rng = np.random.default_rng(np.random.SeedSequence([seed, trial, r]))
        e = rng.standard_exponential(1 << s)
        rows.append(e / e.sum())
    return Kernel(np.array(rows))


def empirical_kernel(net, n: int, seed: int, key: Sequence[int] = ()) -> Kernel:
    """Row-wise sample frequencies with ``n`` samples per input."""
    rows = [sample(net, to_bits(x, net.d), n, seed, key=(*key, x)) / n for x in range(1 << net.d)]
    return Kernel(np.array(rows))


@dataclass(frozen=True)
class ExperimentRow:
    eps: float
    alpha: float
    bound: float
    e_avg: float
    e_max: float
    mode: str
    trials: int
    samples_per_input: Optional[int] = None


def _trial_errors(args) -> list[float]:
    from .construct import build_deep

    eps_idx, eps, trials, seed, mode, samples = args
    out = []
    for t in range(trials):
        target = clamp_to_eps(random_kernel(2, 2, seed, t), eps)
        net = build_deep(target, j=2, eps=eps, schedule="overlaid")
        if mode == "exact":
            P = network_kernel(net)
        else:
            P = empirical_kernel(net, samples, seed, key=(eps_idx, t))
        out.append(max_abs_error(P, target))
    return out


def table8(
    trials: int = 500,
    eps_list: Sequence[float] = TABLE_EPS,
    seed: int = 0,
    mode: str = "exact",
    samples_per_input: int = 25_000,
    workers: int = 1,
) -> list[ExperimentRow]:
    """Random targets in Delta_{2,2} through the widest deep network (j = d = 2).

    Targets for trial ``t`` are the same at every eps and clamped to that
    eps.  Rows come back in eps order whatever ``workers`` is.
    """
    from .construct import alpha_for_eps, error_bound

    if trials < 1:
        raise ValueError("trials must be >= 1")
    if mode not in ("exact", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    jobs = [(k, eps, trials, seed, mode, samples_per_input) for k, eps in enumerate(eps_list)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial_errors, jobs))
    else:
        results = [_trial_errors(job) for job in jobs]
    rows = []
    for eps, errs in zip(eps_list, results):
        rows.append(
            ExperimentRow(
                eps=eps,
                alpha=alpha_for_eps(eps, 2),
                bound=error_bound(eps, TABLE_UNITS),
                e_avg=float(np.mean(errs)),
                e_max=float(np.max(errs)),
                mode=mode,
                trials=trials,
                samples_per_input=samples_per_input if mode == "sampled" else None,
            )
        )
    return rows


def format_table(rows: Sequence[ExperimentRow]) -> str:
    lines = [f"{'10eps':>10} {'alpha':>8} {'bound':>8} {'E_avg':>8} {'E_max':>8}"]
    for r in rows:
        lines.append(
            f"{10 * r.eps:>10.5f} {r.alpha:>8.2f} {r.bound:>8.4f} {r.e_avg:>8.4f} {r.e_max:>8.4f}"
        )
    return "\n".join(lines)


def rows_to_json(rows: Sequence[ExperimentRow]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2)


def default_workers() -> int:
    return max(1, min(5, os.cpu_count() or 1))


def convergence_sweep(
    target: Kernel,
    arch: str,
    eps_list: Sequence[float],
    j: int = 0,
    builder_kwargs: Optional[dict] = None,
) -> list[tuple[float, float, float]]:
    """Exact error of a construction at each eps, with its unit-count bound.

    ``arch`` is one of ``shallow-fixed``, ``shallow-trainable`` or ``deep``.
    Returns ``(eps, error, bound)`` triples; the error is measured against
    the target clamped to the same eps.
    """
    from .construct import error_bound

    build = _builder(arch, j, builder_kwargs or {})
    out = []
    for eps in eps_list:
        clamped = clamp_to_eps(target, eps)
        net = build(clamped, eps)
        err = max_abs_error(network_kernel(net), clamped)
        out.append((eps, err, error_bound(eps, net.unit_count)))
    return out


def _builder(arch: str, j: int, kwargs: dict) -> Callable:
    from .construct import build_deep, build_shallow_fixed, build_shallow_trainable

    if arch == "deep":
        return lambda P, eps: build_deep(P, j=j, eps=eps, **kwargs)
    if arch == "shallow-fixed":
        return lambda P, eps: build_shallow_fixed(P, eps, **kwargs)
    if arch == "shallow-trainable":
        return lambda P, eps: build_shallow_trainable(P, eps, **kwargs)
    raise ValueError(f"unknown architecture {arch!r}")
