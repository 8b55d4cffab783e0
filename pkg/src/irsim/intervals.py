"""Timelines as sorted lists of disjoint half-open ``(start, end)`` intervals."""

from __future__ import annotations

import bisect
from typing import Iterable

Timeline = list[tuple[float, float]]


def normalize(intervals: Iterable[tuple[float, float]]) -> Timeline:
    """Sort, drop empty intervals and merge overlapping or touching ones."""
    out: Timeline = []
    for a, b in sorted(intervals):
        if b <= a:
            continue
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return out


def union(*timelines: Iterable[tuple[float, float]]) -> Timeline:
    return normalize(iv for tl in timelines for iv in tl)


def intersection(x: Timeline, y: Timeline) -> Timeline:
    out: Timeline = []
    i = j = 0
    while i < len(x) and j < len(y):
        a = max(x[i][0], y[j][0])
        b = min(x[i][1], y[j][1])
        if a < b:
            out.append((a, b))
        if x[i][1] < y[j][1]:
            i += 1
        else:
            j += 1
    return out


def contains(timeline: Timeline, t: float) -> bool:
    i = bisect.bisect_right(timeline, (t, float("inf"))) - 1
    return i >= 0 and timeline[i][0] <= t < timeline[i][1]


def total_length(timeline: Timeline) -> float:
    return sum(b - a for a, b in timeline)


def breakpoints(*timelines: Timeline) -> list[float]:
    return sorted({t for tl in timelines for iv in tl for t in iv})
