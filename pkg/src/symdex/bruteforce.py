"""Independent brute-force references for finite point sets.

These deliberately avoid the set-expression machinery: plain dicts and
loops only, so they can cross-check the main implementations without
sharing code paths with them.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .vectors import NormKind

Point = dict[int, Fraction]


def _norm(entries: Point, kind: NormKind) -> Fraction:
    values = [abs(x) for x in entries.values() if x != 0]
    if kind is NormKind.SUP:
        return max(values, default=Fraction(0))
    if kind is NormKind.SUM:
        return sum(values, Fraction(0))
    return sum((x * x for x in values), Fraction(0))


def _sub(a: Point, b: Point) -> Point:
    out = dict(a)
    for i, x in b.items():
        q = out.get(i, Fraction(0)) - x
        if q == 0:
            out.pop(i, None)
        else:
            out[i] = q
    return out


def _add(a: Point, b: Point) -> Point:
    out = dict(a)
    for i, x in b.items():
        q = out.get(i, Fraction(0)) + x
        if q == 0:
            out.pop(i, None)
        else:
            out[i] = q
    return out


def _key(p: Point) -> tuple:
    return tuple(sorted((i, x) for i, x in p.items() if x != 0))


def brute_diameter(points: list[Point], kind: NormKind) -> Fraction:
    best = Fraction(0)
    for a, b in combinations(points, 2):
        d = _norm(_sub(a, b), kind)
        if d > best:
            best = d
    return best


def brute_symmetrized(points: list[Point], witnesses: list[Point]) -> list[Point]:
    """All d with w + d and w - d in the point set, for every witness."""
    keys = {_key(p) for p in points}
    out = []
    seen = set()
    for p in points:
        d = _sub(p, witnesses[0])
        k = _key(d)
        if k in seen:
            continue
        seen.add(k)
        if all(
            _key(_add(w, d)) in keys and _key(_sub(w, d)) in keys for w in witnesses
        ):
            out.append(dict(k))
    return out


def brute_delta_upper(points: list[Point], n: int, kind: NormKind) -> Fraction:
    """Exact delta_n of a finite set by full witness-subset enumeration."""
    best = None
    for size in range(1, n + 1):
        for witnesses in combinations(points, size):
            sym = brute_symmetrized(points, list(witnesses))
            value = brute_diameter(sym, kind) / (4 if kind is NormKind.EUCLID else 2)
            if best is None or value < best:
                best = value
    if best is None:
        raise ValueError("need n >= 1 and a nonempty point set")
    return best


def brute_delta1_zero_witness(points: list[Point], kind: NormKind) -> Point | None:
    """A witness whose symmetrized set is exactly the origin, if any."""
    for w in points:
        sym = brute_symmetrized(points, [w])
        if len(sym) == 1 and not sym[0]:
            return w
    return None
