"""Certified symmetrization indexes and covering-number proxy bounds.

delta_0 of a set is half its diameter; delta_N is the smallest delta_0
over all symmetrizations with N witnesses. Upper bounds come from
witness searches and are always replayable; lower bounds come from
certificate families (fresh coordinates for boxes, fresh series indices
for sign-sum sets) that answer any witness-list challenge with an
explicit direction. When no family applies the lower bound is a
certified zero, distinguishable by its kind tag.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .errors import BudgetExceeded, InvalidInput, SymdexError, WitnessNotMember
from .sets import (
    AbsConvHull,
    BoundPair,
    Box,
    FinitePoints,
    Intersect,
    Negate,
    SetExpr,
    SignSums,
    Symmetrized,
    Translate,
    contains,
    diameter,
    free_direction,
    reduced,
    symmetrize,
)
from .series import SignMode
from .vectors import (
    NormKind,
    SparseVec,
    ZERO,
    as_length,
    half_length,
    norm,
    unit,
)


@dataclass(frozen=True)
class LowerCertificate:
    """Replayable lower-bound evidence for a delta index.

    ``value`` is in the carried norm convention (squared for EUCLID);
    ``plain_value`` is a rational lower bound in plain length units.
    ``uniform`` marks certificates that answer witness lists of every
    length, which is what makes them carry over to delta-infinity.
    ``conditional`` marks certificates whose challenge replay needs
    spare room in the model (a fresh series index); such values hold for
    the unbounded-horizon reading but not for every witness list of the
    finite model, so aggregate bounds downgrade them to zero.
    """

    kind: str
    value: Fraction
    plain_value: Fraction
    uniform: bool
    data: dict = field(default_factory=dict)
    conditional: bool = False

    @property
    def unconditional_value(self) -> Fraction:
        return Fraction(0) if self.conditional else self.value

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "value": str(self.value),
            "plain_value": str(self.plain_value),
            "uniform": self.uniform,
            "conditional": self.conditional,
            "data": self.data,
        }


ZERO_CERT = LowerCertificate("none", Fraction(0), Fraction(0), True)


@dataclass
class DeltaResult:
    N: int
    bound: BoundPair
    upper_witnesses: tuple[SparseVec, ...] = ()
    lower_certificate: Optional[LowerCertificate] = None

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "bound": self.bound.to_json(),
            "upper_witnesses": [w.to_json() for w in self.upper_witnesses],
            "lower_certificate": None
            if self.lower_certificate is None
            else self.lower_certificate.to_json(),
        }


@dataclass(frozen=True)
class SearchStrategy:
    """Witness-list search plan over a finite member pool."""

    kind: str  # "exhaustive" | "greedy" | "beam"
    pool: tuple[SparseVec, ...]
    restarts: int = 1
    width: int = 4

    @classmethod
    def exhaustive(cls, pool: Sequence[SparseVec]) -> "SearchStrategy":
        return cls("exhaustive", tuple(pool))

    @classmethod
    def greedy(cls, pool: Sequence[SparseVec], restarts: int = 1) -> "SearchStrategy":
        return cls("greedy", tuple(pool), restarts=restarts)

    @classmethod
    def beam(cls, pool: Sequence[SparseVec], width: int = 4) -> "SearchStrategy":
        return cls("beam", tuple(pool), width=width)

    @classmethod
    def parse(cls, kind: str, pool: Sequence[SparseVec], restarts: int = 1, width: int = 4):
        kind = kind.strip().lower()
        if kind not in ("exhaustive", "greedy", "beam"):
            raise InvalidInput(f"unknown search strategy {kind!r}")
        return cls(kind, tuple(pool), restarts=restarts, width=width)


def default_pool(expr: SetExpr) -> tuple[SparseVec, ...]:
    """A small deterministic witness pool of members of the set."""
    flat = reduced(expr)
    if isinstance(flat, Box):
        pool = {ZERO}
        for i, r in flat.overrides:
            if r > 0:
                pool.add(unit(i, r))
                pool.add(unit(i, -r))
        return tuple(sorted(pool, key=lambda p: p.sort_key()))
    if isinstance(flat, FinitePoints):
        return flat.points
    if isinstance(flat, SignSums):
        pool = set()
        if flat.mode is SignMode.SUBSETS:
            pool.add(ZERO)
        acc = ZERO
        for t in flat.terms:
            acc = acc + t
            pool.add(acc)
        return tuple(sorted(pool, key=lambda p: p.sort_key()))
    if isinstance(flat, AbsConvHull):
        pool = {ZERO}
        for p in flat.points:
            pool.add(p)
            pool.add(-p)
        return tuple(sorted(pool, key=lambda p: p.sort_key()))
    if isinstance(flat, Translate):
        return tuple(p + flat.by for p in default_pool(flat.base))
    if isinstance(flat, Negate):
        return tuple(-p for p in default_pool(flat.base))
    if isinstance(flat, Intersect):
        return tuple(p for p in default_pool(flat.parts[0]) if contains(flat, p))
    if isinstance(flat, Symmetrized):
        pool = [ZERO]
        return tuple(pool)
    raise InvalidInput(f"unknown set expression {type(flat).__name__}")


def delta0(expr: SetExpr, kind: NormKind, seed: int = 0) -> BoundPair:
    """Half the diameter, exactness preserved."""
    return diameter(expr, kind, seed=seed).half(kind)


def _delta_of(expr: SetExpr, witnesses: Sequence[SparseVec], kind: NormKind, seed: int) -> BoundPair:
    return delta0(symmetrize(expr, witnesses), kind, seed=seed)


def _score(bound: BoundPair) -> Fraction:
    if bound.upper is None:
        raise SymdexError("witness search needs a finite diameter upper bound")
    return bound.upper


def _witness_key(ws: Sequence[SparseVec]) -> tuple:
    keys = tuple(w.sort_key() for w in sorted(ws, key=lambda w: w.sort_key()))
    return (len(keys), keys)


def delta_upper(
    expr: SetExpr,
    N: int,
    strategy: SearchStrategy,
    kind: NormKind,
    seed: int = 0,
) -> DeltaResult:
    """Best (smallest) certified delta_0 over searched witness lists.

    Witness lists are treated as sets of size at most N: repeating a
    witness never shrinks the intersection further. Exhaustive search
    over the full point set of a finite set is exact.
    """
    if N < 1:
        raise InvalidInput("delta_upper needs N >= 1")
    pool = []
    seen = set()
    for p in strategy.pool:
        if p in seen:
            continue
        seen.add(p)
        if not contains(expr, p):
            raise WitnessNotMember(f"pool member {p!r} is not in the set")
        pool.append(p)
    pool.sort(key=lambda p: p.sort_key())
    if not pool:
        raise InvalidInput("witness pool is empty")

    best_bound: Optional[BoundPair] = None
    best_ws: tuple[SparseVec, ...] = ()

    def consider(ws: Sequence[SparseVec]) -> Fraction:
        nonlocal best_bound, best_ws
        bound = _delta_of(expr, ws, kind, seed)
        score = _score(bound)
        if (
            best_bound is None
            or score < best_bound.upper
            or (score == best_bound.upper and _witness_key(ws) < _witness_key(best_ws))
        ):
            best_bound = bound
            best_ws = tuple(sorted(ws, key=lambda w: w.sort_key()))
        return score

    if strategy.kind == "exhaustive":
        for size in range(1, min(N, len(pool)) + 1):
            for ws in combinations(pool, size):
                consider(ws)
    elif strategy.kind == "greedy":
        restarts = max(1, strategy.restarts)
        for restart in range(restarts):
            current: list[SparseVec] = []
            if restart > 0:
                current.append(pool[(restart - 1) % len(pool)])
                consider(current)
            while len(current) < N:
                best_step = None
                for p in pool:
                    if p in current:
                        continue
                    score = consider(current + [p])
                    key = (score, p.sort_key())
                    if best_step is None or key < best_step[0]:
                        best_step = (key, p)
                if best_step is None:
                    break
                current.append(best_step[1])
    elif strategy.kind == "beam":
        width = max(1, strategy.width)
        states: list[tuple[SparseVec, ...]] = [()]
        for _ in range(N):
            scored = []
            seen_states = set()
            for state in states:
                for p in pool:
                    if p in state:
                        continue
                    ws = tuple(sorted(state + (p,), key=lambda w: w.sort_key()))
                    if ws in seen_states:
                        continue
                    seen_states.add(ws)
                    scored.append((consider(ws), _witness_key(ws), ws))
            if not scored:
                break
            scored.sort(key=lambda t: (t[0], t[1]))
            states = [ws for _, _, ws in scored[:width]]
    else:
        raise InvalidInput(f"unknown strategy kind {strategy.kind!r}")

    assert best_bound is not None
    return DeltaResult(
        N=N,
        bound=BoundPair(Fraction(0), best_bound.upper, upper_witness=best_bound.to_json()),
        upper_witnesses=best_ws,
        lower_certificate=None,
    )


def delta_lower(expr: SetExpr, N: int, kind: NormKind) -> DeltaResult:
    """Certified lower bound for delta_N via a free-direction family.

    The certificate answers any witness-list challenge (of any length,
    when ``uniform``) with a direction of at least the certified norm;
    see :func:`challenge_lower`. Sets outside the known families get a
    certified zero with kind "none".
    """
    if N < 0:
        raise InvalidInput("delta_lower needs N >= 0")
    cert = _lower_certificate(reduced(expr), kind)
    return DeltaResult(
        N=N,
        bound=BoundPair(cert.value, None),
        upper_witnesses=(),
        lower_certificate=cert,
    )


def _lower_certificate(flat: SetExpr, kind: NormKind) -> LowerCertificate:
    if isinstance(flat, Box):
        r = flat.default_radius
        if r == 0:
            return LowerCertificate("none", Fraction(0), Fraction(0), True)
        return LowerCertificate(
            "fresh_coordinate",
            as_length(r, kind),
            r,
            True,
            {"radius": str(r)},
        )
    if isinstance(flat, FinitePoints):
        return LowerCertificate("finite_extreme", Fraction(0), Fraction(0), True)
    if isinstance(flat, SignSums):
        if flat.mode is not SignMode.SUBSETS:
            return LowerCertificate(
                "none", Fraction(0), Fraction(0), True, {"reason": "prefix_mode"}
            )
        norms = [norm(t, kind) for t in flat.terms if not t.is_zero]
        if not norms:
            return LowerCertificate("none", Fraction(0), Fraction(0), True)
        value = min(norms)
        plain = _plain_lower(value, kind)
        return LowerCertificate(
            "fresh_series_index",
            value,
            plain,
            True,
            {"requires_fresh_index": True, "horizon": flat.horizon},
            conditional=True,
        )
    if isinstance(flat, (Translate, Negate)):
        return _lower_certificate(flat.base, kind)
    if isinstance(flat, Symmetrized):
        # flattening failed; only the trivial bound is certified
        return LowerCertificate("none", Fraction(0), Fraction(0), True)
    if isinstance(flat, (AbsConvHull, Intersect)):
        return LowerCertificate("none", Fraction(0), Fraction(0), True)
    raise InvalidInput(f"unknown set expression {type(flat).__name__}")


def _plain_lower(value: Fraction, kind: NormKind) -> Fraction:
    """Rational plain-length lower bound of a carried magnitude."""
    if kind is not NormKind.EUCLID:
        return value
    if value == 0:
        return Fraction(0)
    # floor of sqrt(value) with denominator 10^6
    import math

    scale = 10 ** 6
    num = value.numerator * scale * scale
    den = value.denominator
    root = math.isqrt(num // den)
    return Fraction(root, scale)


def challenge_lower(
    cert: LowerCertificate,
    expr: SetExpr,
    witnesses: Sequence[SparseVec],
    kind: NormKind,
) -> SparseVec:
    """Replay a lower certificate against a concrete witness list.

    Produces a direction d with w + d and w - d members for every
    witness and norm at least the certified value, or raises.
    """
    d = free_direction(expr, witnesses, kind)
    if d is None:
        raise SymdexError("lower certificate challenge found no direction")
    if norm(d, kind) < cert.value:
        raise SymdexError("lower certificate challenge produced a short direction")
    return d


def delta_curve(
    expr: SetExpr,
    N_max: int,
    strategy: SearchStrategy,
    kind: NormKind,
    seed: int = 0,
) -> list[DeltaResult]:
    """Delta results for N = 0..N_max; upper bounds are non-increasing.

    Monotonicity is enforced by witness inheritance: the best witness
    list found for N carries over to N+1. Lower bounds are certified
    independently for every N.
    """
    if N_max < 0:
        raise InvalidInput("N_max must be nonnegative")
    base = delta0(expr, kind, seed=seed)
    results = [
        DeltaResult(
            N=0,
            bound=base,
            upper_witnesses=(),
            lower_certificate=LowerCertificate(
                "diameter", base.lower if base.lower is not None else Fraction(0),
                _plain_lower(base.lower or Fraction(0), kind), False
            ),
        )
    ]
    prev_upper = base.upper
    prev_ws: tuple[SparseVec, ...] = ()
    for n in range(1, N_max + 1):
        up = delta_upper(expr, n, strategy, kind, seed=seed)
        upper = up.bound.upper
        ws = up.upper_witnesses
        if prev_upper is not None and n > 1 and (upper is None or upper > prev_upper):
            upper = prev_upper
            ws = prev_ws
        low = delta_lower(expr, n, kind)
        lower_value = low.lower_certificate.unconditional_value
        if upper is not None and lower_value > upper:
            raise SymdexError(
                f"delta sandwich violated at N={n}: lower {lower_value} > upper {upper}"
            )
        results.append(
            DeltaResult(
                N=n,
                bound=BoundPair(
                    lower_value,
                    upper,
                    lower_witness=low.lower_certificate.to_json(),
                    upper_witness=up.bound.upper_witness,
                ),
                upper_witnesses=ws,
                lower_certificate=low.lower_certificate,
            )
        )
        prev_upper, prev_ws = upper, ws
    return results


def delta_infinity_bounds(
    expr: SetExpr,
    N_max: int,
    strategy: SearchStrategy,
    kind: NormKind,
    seed: int = 0,
) -> BoundPair:
    """Bounds for the limit index: a uniform lower certificate is valid
    for every N, and any upper bound at finite N bounds the limit."""
    low = delta_lower(expr, N_max, kind)
    cert = low.lower_certificate
    lower = cert.unconditional_value if cert.uniform else Fraction(0)
    up = delta_upper(expr, N_max, strategy, kind, seed=seed)
    return BoundPair(
        lower,
        up.bound.upper,
        lower_witness=low.lower_certificate.to_json(),
        upper_witness=[w.to_json() for w in up.upper_witnesses],
    )


# ---------------------------------------------------------------------------
# covering and separation proxies


def kcenter_radius(
    points: Sequence[SparseVec],
    k: int,
    exact: bool,
    kind: NormKind,
    budget: int = 100_000,
) -> BoundPair:
    """Smallest radius of k balls centered at chosen points covering all.

    Exact by enumeration of center subsets when requested and small;
    otherwise the farthest-first greedy value with its 2-approximation
    interval. Euclidean radii are carried squared (so the greedy lower
    end is a quarter of the greedy value).
    """
    pts = list(points)
    if not pts:
        raise InvalidInput("kcenter needs at least one point")
    if k < 1:
        raise InvalidInput("kcenter needs k >= 1")
    if k >= len(pts):
        return BoundPair(Fraction(0), Fraction(0))
    pts.sort(key=lambda p: p.sort_key())

    def covering_radius(centers: Sequence[SparseVec]) -> Fraction:
        return max(min(norm(p - c, kind) for c in centers) for p in pts)

    if exact:
        total = 1
        n = len(pts)
        for j in range(k):
            total = total * (n - j) // (j + 1)
        if total > budget:
            raise BudgetExceeded(f"kcenter exact enumeration of {total} subsets")
        best = None
        best_centers = None
        for centers in combinations(pts, k):
            r = covering_radius(centers)
            if best is None or r < best:
                best, best_centers = r, centers
        return BoundPair(
            best,
            best,
            upper_witness={"centers": [c.to_json() for c in best_centers]},
        )

    centers = [pts[0]]
    while len(centers) < k:
        far = max(pts, key=lambda p: (min(norm(p - c, kind) for c in centers), p.sort_key()))
        centers.append(far)
    r = covering_radius(centers)
    lower = r / 4 if kind is NormKind.EUCLID else r / 2
    return BoundPair(lower, r, upper_witness={"centers": [c.to_json() for c in centers]})


def separation_alpha_lower(
    expr: SetExpr,
    count: int,
    kind: NormKind,
    budget: int = 20_000,
    seed: int = 0,
) -> BoundPair:
    """Half the separation of a constructed family of ``count`` members.

    A family of members with pairwise distance s obstructs coverings by
    balls of radius below s/2 at the family's scale; for boxes with a
    positive default radius the fresh-coordinate walk extends to any
    count, which is what makes the value a genuine covering lower bound.
    May return zero when no construction family applies.
    """
    if count < 2:
        return BoundPair(Fraction(0), None)
    flat = reduced(expr)
    if isinstance(flat, Box) and flat.default_radius > 0:
        r = flat.default_radius
        start = flat.max_override_coord
        coords = [start + j for j in range(1, count + 1)]
        family = []
        for j in range(count):
            entries = {coords[i]: r for i in range(j)}
            entries[coords[j]] = -r
            family.append(SparseVec(entries))
        s = min(norm(a - b, kind) for a, b in combinations(family, 2))
        value = half_length(s, kind)
        return BoundPair(
            value,
            None,
            lower_witness={
                "family": [v.to_json() for v in family],
                "separation": str(s),
            },
        )
    from .sets import enumerate_members, sample_members

    members = enumerate_members(flat, 4096)
    if members is None:
        rng = random.Random(seed)
        members = tuple(sample_members(flat, rng, 32))
    pts = list(members)
    if len(pts) < count:
        return BoundPair(Fraction(0), None)
    total = 1
    for j in range(count):
        total = total * (len(pts) - j) // (j + 1)
    best_family = None
    best_s = Fraction(0)
    if total <= budget:
        for family in combinations(pts, count):
            s = min(norm(a - b, kind) for a, b in combinations(family, 2))
            if s > best_s:
                best_s, best_family = s, family
    else:
        family = [pts[0]]
        while len(family) < count:
            far = max(
                pts,
                key=lambda p: (min(norm(p - c, kind) for c in family), p.sort_key()),
            )
            if far in family:
                break
            family.append(far)
        if len(family) == count:
            best_family = tuple(family)
            best_s = min(norm(a - b, kind) for a, b in combinations(family, 2))
    if best_family is None:
        return BoundPair(Fraction(0), None)
    value = half_length(best_s, kind)
    return BoundPair(
        value,
        None,
        lower_witness={
            "family": [v.to_json() for v in best_family],
            "separation": str(best_s),
        },
    )
