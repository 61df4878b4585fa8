"""Architecture bookkeeping and necessary conditions for universality."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from ..bitspace import block_exponent


@dataclass(frozen=True)
class ArchPlan:
    d: int
    s: int
    j: int
    b: Optional[int]
    depth_theorem3: Optional[int]
    depth_simplified: int
    depth: int
    width: int
    unit_count: int
    unit_count_simplified: int
    trainable_params: int
    full_params: int
    shallow_fixed_width: int
    shallow_trainable_width: Optional[int]

    def to_dict(self) -> dict:
        return asdict(self)


def _dense_params(widths: Sequence[int]) -> int:
    return sum((n + 1) * m for n, m in zip(widths[:-1], widths[1:]))


def plan(d: int, s: int, j: int) -> ArchPlan:
    """Depth, width and parameter counts of the deep network for (d, s, j).

    Depths count hidden layers.  ``j = d`` saves one layer.  ``depth`` is
    the overlaid-schedule depth when s admits one, else the simplified one.
    """
    if d < 0 or s < 1:
        raise ValueError("need d >= 0 and s >= 1")
    if not 0 <= j <= d:
        raise ValueError(f"j must lie in [0, {d}], got {j}")
    saved = 1 if j == d else 0
    b = block_exponent(s)
    depth_t3 = None if b is None else (1 << (d - j)) * ((1 << (s - b)) + (1 << b) - 1) - saved
    depth_simple = (1 << (d + s - j)) - saved
    depth = depth_simple if depth_t3 is None else depth_t3
    width = (1 << j) * (s + d - j)
    return ArchPlan(
        d=d,
        s=s,
        j=j,
        b=b,
        depth_theorem3=depth_t3,
        depth_simplified=depth_simple,
        depth=depth,
        width=width,
        unit_count=depth * width + s,
        unit_count_simplified=depth_simple * width + s,
        trainable_params=(1 << d) * ((1 << s) - 1),
        full_params=_dense_params([d] + [width] * depth + [s]),
        shallow_fixed_width=((1 << s) - 1) * (1 << (d - 1)) if d >= 1 else (1 << s) - 1,
        shallow_trainable_width=(1 << d) * ((1 << (s - 1)) - 1) if s >= 2 else None,
    )


@dataclass(frozen=True)
class RuleResult:
    rule: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    d: int
    s: int
    hidden_widths: tuple[int, ...]
    param_count: int
    results: tuple[RuleResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def flagged(self) -> list[str]:
        return [r.rule for r in self.results if not r.passed]

    def to_dict(self) -> dict:
        out = asdict(self)
        out["hidden_widths"] = list(self.hidden_widths)
        out["ok"] = self.ok
        return out


def min_last_width(d: int, s: int) -> int:
    if d >= 1:
        return s
    return s - 1 if s % 2 == 0 else s


def validate_arch(
    d: int, s: int, hidden_widths: Sequence[int], param_count: Optional[int] = None
) -> ValidationReport:
    """Necessary conditions for a layered network to approximate all kernels.

    Rules: enough parameters for the dimension of the kernel polytope,
    no hidden layer narrower than min(d, s), and a wide enough last hidden
    layer.  ``param_count`` defaults to the fully connected count.
    """
    widths = tuple(int(w) for w in hidden_widths)
    if any(w < 0 for w in widths):
        raise ValueError("widths must be nonnegative")
    params = _dense_params([d, *widths, s]) if param_count is None else int(param_count)
    need = (1 << d) * ((1 << s) - 1)
    results = [
        RuleResult("param_count", params >= need, f"{params} parameters, need at least {need}"),
    ]
    floor = min(d, s)
    narrow = [k + 1 for k, w in enumerate(widths) if w < floor]
    results.append(
        RuleResult(
            "min_width",
            not narrow,
            f"layers {narrow} narrower than {floor}" if narrow else f"all hidden widths >= {floor}",
        )
    )
    if widths:
        last_need = min_last_width(d, s)
        results.append(
            RuleResult(
                "last_width",
                widths[-1] >= last_need,
                f"last hidden width {widths[-1]}, need at least {last_need}",
            )
        )
    return ValidationReport(d, s, widths, params, tuple(results))
