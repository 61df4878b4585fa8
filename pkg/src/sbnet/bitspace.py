"""Binary vectors, integer encodings and Gray-code schedules.

Bit vectors are plain tuples of 0/1 ints.  The first entry is the least
significant bit, so ``dec((0, 1, 1)) == 6``; kernel rows and columns are
ordered by ascending ``dec``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

BitVec = tuple[int, ...]

# Search budget for partial_codes (number of visited nodes).
SEARCH_BUDGET = 2_000_000
MAX_SEARCH_WIDTH = 6


class CodeSearchError(RuntimeError):
    """No partial code set was found within the search budget."""


def dec(v: Sequence[int]) -> int:
    """Integer with ``v[0]`` as the least significant bit."""
    out = 0
    for i, bit in enumerate(v):
        if bit not in (0, 1):
            raise ValueError(f"not a bit: {bit!r}")
        out |= bit << i
    return out


def to_bits(k: int, n: int) -> BitVec:
    """The ``n``-bit vector whose ``dec`` is ``k``."""
    if n < 0 or not 0 <= k < (1 << n):
        raise ValueError(f"{k} is not representable with {n} bits")
    return tuple((k >> i) & 1 for i in range(n))


def all_states(n: int) -> list[BitVec]:
    """All of {0,1}^n in ascending ``dec`` order."""
    return [to_bits(k, n) for k in range(1 << n)]


def hamming(a: Sequence[int], b: Sequence[int]) -> int:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} != {len(b)}")
    return sum(x != y for x, y in zip(a, b))


def flipped_index(a: Sequence[int], b: Sequence[int]) -> int:
    """0-based position where two Hamming-adjacent vectors differ."""
    diff = [i for i, (x, y) in enumerate(zip(a, b)) if x != y]
    if len(a) != len(b) or len(diff) != 1:
        raise ValueError(f"{tuple(a)} and {tuple(b)} are not Hamming neighbours")
    return diff[0]


def largest_set_index(z: Sequence[int]) -> int:
    """1-based index of the last 1 in ``z``; 0 for the zero vector."""
    for i in range(len(z), 0, -1):
        if z[i - 1]:
            return i
    return 0


def flip(v: Sequence[int], i: int) -> BitVec:
    out = list(v)
    out[i] = 1 - out[i]
    return tuple(out)


def _gray(k: int) -> int:
    return k ^ (k >> 1)


def reflected_gray_code(n: int) -> list[BitVec]:
    """Binary reflected Gray code starting at the zero vector."""
    return [to_bits(_gray(k), n) for k in range(1 << n)]


def sharing_code(s: int) -> list[BitVec]:
    """Full Gray code on {0,1}^s from (1,0,...,0) to the zero vector.

    This is the reflected code traversed backwards with bit order reversed:
    ``gray(2^s - 1)`` has only its top bit set, which becomes entry 1.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    return [tuple(reversed(to_bits(_gray(k), s))) for k in range((1 << s) - 1, -1, -1)]


def is_gray_code(entries: Sequence[Sequence[int]], full: bool = True) -> bool:
    if not entries:
        return False
    n = len(entries[0])
    if any(len(e) != n for e in entries):
        return False
    if any(hamming(a, b) != 1 for a, b in zip(entries, entries[1:])):
        return False
    if len({tuple(e) for e in entries}) != len(entries):
        return False
    return not full or len(entries) == 1 << n


@dataclass(frozen=True)
class PartialCodeSet:
    """``2^b`` Hamming-path sequences that jointly partition {0,1}^m."""

    m: int
    b: int
    codes: tuple[tuple[BitVec, ...], ...]

    @property
    def length(self) -> int:
        return len(self.codes[0]) if self.codes else 0


def block_exponent(m: int) -> int | None:
    """The ``b`` with ``m = 2^(b-1) + b``, or None."""
    b = 1
    while (1 << (b - 1)) + b <= m:
        if (1 << (b - 1)) + b == m:
            return b
        b += 1
    return None


PROPERTIES = ("partition", "shared_prefix", "zero_last", "adjacent_steps", "distinct_switches")


def validate_partial_codes(pcs: PartialCodeSet) -> dict[str, bool]:
    """Check the five structural properties of an overlaid sharing schedule.

    ``shared_prefix`` requires the first vectors of all codes to agree on
    their first ``m - b`` entries (they then differ only in the last ``b``).
    """
    m, b, codes = pcs.m, pcs.b, pcs.codes
    report = dict.fromkeys(PROPERTIES, False)
    if not codes or any(len(c) == 0 for c in codes):
        return report
    L = len(codes[0])
    flat = [tuple(v) for c in codes for v in c]
    shaped = (
        len(codes) == 1 << b
        and all(len(c) == L for c in codes)
        and L == 1 << (m - b)
        and all(len(v) == m for v in flat)
    )
    report["partition"] = shaped and len(set(flat)) == len(flat) == 1 << m
    heads = [tuple(c[0][: m - b]) for c in codes]
    report["shared_prefix"] = len(set(heads)) == 1
    report["zero_last"] = tuple(codes[0][-1]) == (0,) * m
    report["adjacent_steps"] = all(
        len(u) == len(v) and hamming(u, v) == 1 for c in codes for u, v in zip(c, c[1:])
    )
    ok = report["adjacent_steps"] and all(len(c) == L for c in codes)
    if ok:
        for k in range(L - 1):
            switched = [flipped_index(c[k], c[k + 1]) for c in codes]
            for i in range(len(codes)):
                for r in range(i + 1, len(codes)):
                    if switched[i] == switched[r] and hamming(codes[i][k], codes[r][k]) != 1:
                        ok = False
    report["distinct_switches"] = ok
    return report


# Hand-made codes for small widths; m = 2 has the unique anchored pair.
KNOWN_CODES = {
    (2, 1): (((1, 0), (0, 0)), ((1, 1), (0, 1))),
}


def partial_codes(m: int, b: int | None = None, budget: int = SEARCH_BUDGET) -> PartialCodeSet:
    """A validated set of ``2^b`` partial codes on {0,1}^m.

    The first vectors of the codes are ``(1,0,...,0) + u`` for every suffix
    ``u`` of length ``b``; this anchors ``(1,0,...,0)`` as a starting state,
    which the deep construction relies on.
    """
    if b is None:
        b = block_exponent(m)
    if b is None or b < 1 or (1 << (b - 1)) + b != m:
        raise ValueError(f"m={m} is not of the form 2^(b-1) + b")
    if m > MAX_SEARCH_WIDTH:
        raise CodeSearchError(f"m={m} exceeds the search limit {MAX_SEARCH_WIDTH}")
    if (m, b) in KNOWN_CODES:
        return PartialCodeSet(m, b, KNOWN_CODES[(m, b)])
    codes = _search(m, b, budget)
    pcs = PartialCodeSet(m, b, codes)
    assert all(validate_partial_codes(pcs).values())
    return pcs


def _search(m: int, b: int, budget: int) -> tuple[tuple[BitVec, ...], ...]:
    prefix = (1,) + (0,) * (m - b - 1)
    heads = [prefix + u for u in reflected_gray_code(b)]
    n_codes, L = len(heads), 1 << (m - b)
    zero = (0,) * m
    if zero in heads:
        raise CodeSearchError("zero vector cannot be a starting state")
    paths = [[h] for h in heads]
    used = set(heads)
    visits = 0

    def extend(k: int, i: int, switched: list[int]) -> bool:
        # Extend code i from position k-1 to k, then recurse.
        nonlocal visits
        visits += 1
        if visits > budget:
            raise CodeSearchError(f"no partial code set for m={m} within {budget} nodes")
        if i == n_codes:
            if k + 1 == L:
                return any(p[-1] == zero for p in paths)
            return extend(k + 1, 0, [])
        cur = paths[i][k - 1]
        for bit in range(m):
            nxt = flip(cur, bit)
            if nxt in used:
                continue
            if nxt == zero and k != L - 1:
                continue
            if any(
                switched[r] == bit and hamming(paths[r][k - 1], cur) != 1 for r in range(i)
            ):
                continue
            used.add(nxt)
            paths[i].append(nxt)
            switched.append(bit)
            if extend(k, i + 1, switched):
                return True
            switched.pop()
            paths[i].pop()
            used.discard(nxt)
        return False

    if not extend(1, 0, []):
        raise CodeSearchError(f"no partial code set exists for m={m} with anchored heads")
    first = next(i for i, p in enumerate(paths) if p[-1] == zero)
    order = [first] + [i for i in range(n_codes) if i != first]
    return tuple(tuple(paths[i]) for i in order)


def iter_states(n: int) -> Iterator[BitVec]:
    for k in range(1 << n):
        yield to_bits(k, n)
