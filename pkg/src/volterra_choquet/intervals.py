"""Finite unions of disjoint closed subintervals of [0, 1].

This is the set class every capacity in the package is evaluated on:
superlevel sets of piecewise functions, intersected with integration
windows, always land here.  Degenerate parts [a, a] are kept (length 0)
so that superlevel sets at peak values stay representable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Parts closer than this are merged on construction; keeps floating-point
# constructions (e.g. superlevel crossings) stable.
MERGE_GAP = 1e-12

# Endpoints may drift outside [0, 1] by this much before being clamped.
_CLAMP_EPS = 1e-12


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted, pairwise-disjoint closed intervals inside [0, 1].

    Immutable; construct via :func:`interval_union` (or ``from_parts``),
    which normalizes arbitrary input parts.  The empty union is
    ``IntervalUnion(())`` and is distinct from any union with parts.
    """

    parts: tuple[tuple[float, float], ...]

    @staticmethod
    def empty() -> "IntervalUnion":
        return _EMPTY

    @staticmethod
    def full() -> "IntervalUnion":
        return _FULL

    @staticmethod
    def from_parts(parts: Iterable[Sequence[float]]) -> "IntervalUnion":
        return interval_union(parts)

    @property
    def is_empty(self) -> bool:
        return not self.parts

    def length(self) -> float:
        """Total Lebesgue length, 0 for the empty union."""
        return float(sum(hi - lo for lo, hi in self.parts))

    def contains_point(self, t: float) -> bool:
        return any(lo <= t <= hi for lo, hi in self.parts)

    def is_subset_of(self, other: "IntervalUnion") -> bool:
        return all(
            any(olo <= lo and hi <= ohi for olo, ohi in other.parts)
            for lo, hi in self.parts
        )

    def bounds_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """The (lows, highs) of all parts as float arrays."""
        if not self.parts:
            return np.empty(0), np.empty(0)
        arr = np.asarray(self.parts, dtype=float)
        return arr[:, 0], arr[:, 1]

    def __str__(self) -> str:
        if not self.parts:
            return "{}"
        return "{" + ", ".join(f"[{lo:g}, {hi:g}]" for lo, hi in self.parts) + "}"


def interval_union(parts: Iterable[Sequence[float]]) -> IntervalUnion:
    """Normalize raw (lo, hi) pairs into a valid :class:`IntervalUnion`.

    Sorts the parts, merges overlapping/adjacent ones (gap < ``MERGE_GAP``)
    and validates that everything lies in [0, 1].

    Raises:
        ValueError: if a part has lo > hi or falls outside [0, 1].
    """
    cleaned: list[tuple[float, float]] = []
    for part in parts:
        lo, hi = float(part[0]), float(part[1])
        if hi < lo:
            raise ValueError(f"interval part has lo > hi: ({lo}, {hi})")
        # Tolerate tiny numeric drift at the domain boundary.
        if lo < -_CLAMP_EPS or hi > 1.0 + _CLAMP_EPS:
            raise ValueError(f"interval part outside [0, 1]: ({lo}, {hi})")
        lo = min(max(lo, 0.0), 1.0)
        hi = min(max(hi, 0.0), 1.0)
        cleaned.append((lo, hi))
    if not cleaned:
        return _EMPTY

    cleaned.sort()
    merged: list[list[float]] = [list(cleaned[0])]
    for lo, hi in cleaned[1:]:
        if lo - merged[-1][1] < MERGE_GAP:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return IntervalUnion(tuple((lo, hi) for lo, hi in merged))


def length(u: IntervalUnion) -> float:
    return u.length()


def intersect(u: IntervalUnion, v: IntervalUnion) -> IntervalUnion:
    """Set intersection, normalized.  Commutative and associative."""
    if u.is_empty or v.is_empty:
        return _EMPTY
    out: list[tuple[float, float]] = []
    i = j = 0
    while i < len(u.parts) and j < len(v.parts):
        alo, ahi = u.parts[i]
        blo, bhi = v.parts[j]
        lo, hi = max(alo, blo), min(ahi, bhi)
        if lo <= hi:
            out.append((lo, hi))
        # advance whichever part ends first
        if ahi < bhi:
            i += 1
        else:
            j += 1
    return interval_union(out)


def union(u: IntervalUnion, v: IntervalUnion) -> IntervalUnion:
    """Set union, normalized with the same construction rules."""
    return interval_union(list(u.parts) + list(v.parts))


_EMPTY = IntervalUnion(())
_FULL = IntervalUnion(((0.0, 1.0),))
