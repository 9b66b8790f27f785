"""Bounded-set expressions with decidable membership and certified bounds.

Every expression denotes a bounded subset of c00. Membership is exact;
quantities that cannot be computed exactly come back as a
:class:`BoundPair` interval whose endpoints are certified (the lower end
by explicit member witnesses, the upper end by a coordinatewise
relaxation or a closed form).

Symmetrized sets -- intersections of (A - x) and (x - A) over witness
points x -- are the central construction. Symmetrizing a box yields a
box again (radii shrink by the witness coordinates), and nested
symmetrizations flatten into a single witness list, so the common
lineages stay in closed form.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Optional, Sequence

from . import exactlp
from .errors import (
    BudgetExceeded,
    DepthExceeded,
    InvalidInput,
    SymdexError,
    UnboundedDiameter,
    WitnessNotMember,
)
from .series import SeriesSpec, SignMode
from .vectors import (
    ZERO,
    Functional,
    NormKind,
    ScalarLike,
    SparseVec,
    as_scalar,
    double_length,
    dual_pair,
    format_scalar,
    linear_combination,
    norm,
    unit,
)

DEFAULT_ENUM_BUDGET = 200_000
DEFAULT_NODE_BUDGET = 200_000


# ---------------------------------------------------------------------------
# certified intervals


@dataclass(frozen=True)
class BoundPair:
    """Certified interval for a nonnegative quantity.

    ``upper=None`` means unbounded above; ``lower=None`` means no finite
    certified lower bound (rare, only for degenerate intersections).
    Witness payloads are JSON-ready data that replays the bound through
    membership checks and exact arithmetic alone.
    """

    lower: Optional[Fraction]
    upper: Optional[Fraction]
    lower_witness: object = None
    upper_witness: object = None

    def __post_init__(self):
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise InvalidInput(f"bound pair out of order: {self.lower} > {self.upper}")

    @property
    def exact(self) -> bool:
        return self.lower is not None and self.lower == self.upper

    def scale(self, factor: Fraction) -> "BoundPair":
        lo = None if self.lower is None else self.lower * factor
        hi = None if self.upper is None else self.upper * factor
        return BoundPair(lo, hi, self.lower_witness, self.upper_witness)

    def half(self, kind: NormKind) -> "BoundPair":
        """Halve a carried magnitude (squares divide by four)."""
        return self.scale(Fraction(1, 4) if kind is NormKind.EUCLID else Fraction(1, 2))

    def to_json(self) -> dict:
        return {
            "lower": None if self.lower is None else format_scalar(self.lower),
            "upper": None if self.upper is None else format_scalar(self.upper),
            "lower_witness": self.lower_witness,
            "upper_witness": self.upper_witness,
        }


# ---------------------------------------------------------------------------
# expression variants


@dataclass(frozen=True)
class Box:
    """{v : |v_i| <= r_i for all i} with r_i = override or default radius.

    Diagonal-operator images of the unit ball are exactly these boxes;
    the reciprocal of the smallest positive radius plays the role of the
    inverse-operator norm. Overrides equal to the default are dropped so
    equal sets compare equal.
    """

    default_radius: Fraction
    overrides: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self):
        default = as_scalar(self.default_radius)
        if default < 0:
            raise InvalidInput("box radius must be nonnegative")
        cleaned = {}
        pairs = self.overrides.items() if isinstance(self.overrides, dict) else self.overrides
        for coord, radius in pairs:
            if not isinstance(coord, int) or coord < 1:
                raise InvalidInput(f"bad box coordinate {coord!r}")
            r = as_scalar(radius)
            if r < 0:
                raise InvalidInput("box radius must be nonnegative")
            if r != default:
                cleaned[coord] = r
        object.__setattr__(self, "default_radius", default)
        object.__setattr__(self, "overrides", tuple(sorted(cleaned.items())))

    def radius(self, coord: int) -> Fraction:
        for i, r in self.overrides:
            if i == coord:
                return r
        return self.default_radius

    def override_map(self) -> dict[int, Fraction]:
        return dict(self.overrides)

    @property
    def max_override_coord(self) -> int:
        return self.overrides[-1][0] if self.overrides else 0

    def diagonal_inverse_norm(self) -> Optional[Fraction]:
        """Norm of the inverse of the diagonal operator whose unit-ball
        image this box is: the reciprocal of the smallest radius. None
        when some radius is zero (the operator is not invertible)."""
        smallest = min([self.default_radius] + [r for _, r in self.overrides])
        return None if smallest == 0 else Fraction(1) / smallest


@dataclass(frozen=True)
class FinitePoints:
    points: tuple[SparseVec, ...]

    def __post_init__(self):
        pts = tuple(sorted(set(self.points), key=lambda p: p.sort_key()))
        if not pts:
            raise InvalidInput("finite point set must be nonempty")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class SignSums:
    """Sign sums of a series: prefixes with all signs, or signed subsets.

    The subset mode contains the empty sum, so it always holds the zero
    vector. ``node_budget`` caps the membership search; exceeding it
    raises :class:`DepthExceeded` rather than approximating.
    """

    series: SeriesSpec
    mode: SignMode
    horizon: int
    node_budget: int = DEFAULT_NODE_BUDGET

    def __post_init__(self):
        if not (1 <= self.horizon <= self.series.horizon):
            raise InvalidInput(
                f"horizon {self.horizon} outside series length {self.series.horizon}"
            )

    @property
    def terms(self) -> tuple[SparseVec, ...]:
        return self.series.terms[: self.horizon]


@dataclass(frozen=True)
class Translate:
    base: "SetExpr"
    by: SparseVec


@dataclass(frozen=True)
class Negate:
    base: "SetExpr"


@dataclass(frozen=True)
class Intersect:
    parts: tuple["SetExpr", ...]

    def __post_init__(self):
        if not self.parts:
            raise InvalidInput("intersection needs at least one part")
        object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class Symmetrized:
    """Intersection of (base - x) and (x - base) over the witness list."""

    base: "SetExpr"
    witnesses: tuple[SparseVec, ...]

    def __post_init__(self):
        ws = tuple(sorted(set(self.witnesses), key=lambda w: w.sort_key()))
        if not ws:
            raise InvalidInput("symmetrized set needs at least one witness")
        object.__setattr__(self, "witnesses", ws)


@dataclass(frozen=True)
class AbsConvHull:
    """Absolutely convex hull of finitely many points."""

    points: tuple[SparseVec, ...]

    def __post_init__(self):
        pts = tuple(sorted(set(self.points), key=lambda p: p.sort_key()))
        if not pts:
            raise InvalidInput("hull needs at least one generator")
        object.__setattr__(self, "points", pts)


SetExpr = (
    Box | FinitePoints | SignSums | Translate | Negate | Intersect | Symmetrized | AbsConvHull
)


# ---------------------------------------------------------------------------
# JSON forms


def set_to_json(expr: SetExpr) -> dict:
    if isinstance(expr, Box):
        return {
            "type": "box",
            "default_radius": format_scalar(expr.default_radius),
            "overrides": {str(i): format_scalar(r) for i, r in expr.overrides},
        }
    if isinstance(expr, FinitePoints):
        return {"type": "finite", "points": [p.to_json() for p in expr.points]}
    if isinstance(expr, SignSums):
        out = {
            "type": "sign_sums",
            "mode": expr.mode.value,
            "horizon": expr.horizon,
            "series": expr.series.to_json(),
        }
        if expr.node_budget != DEFAULT_NODE_BUDGET:
            out["node_budget"] = expr.node_budget
        return out
    if isinstance(expr, Translate):
        return {"type": "translate", "base": set_to_json(expr.base), "by": expr.by.to_json()}
    if isinstance(expr, Negate):
        return {"type": "negate", "base": set_to_json(expr.base)}
    if isinstance(expr, Intersect):
        return {"type": "intersect", "parts": [set_to_json(p) for p in expr.parts]}
    if isinstance(expr, Symmetrized):
        return {
            "type": "symmetrized",
            "base": set_to_json(expr.base),
            "witnesses": [w.to_json() for w in expr.witnesses],
        }
    if isinstance(expr, AbsConvHull):
        return {"type": "abs_conv_hull", "points": [p.to_json() for p in expr.points]}
    raise InvalidInput(f"unknown set expression {type(expr).__name__}")


def set_from_json(obj) -> SetExpr:
    if not isinstance(obj, dict) or "type" not in obj:
        raise InvalidInput("set JSON must be an object with a 'type' tag")
    tag = obj["type"]
    try:
        if tag == "box":
            overrides = {
                int(k): as_scalar(v) for k, v in obj.get("overrides", {}).items()
            }
            return Box(as_scalar(obj["default_radius"]), tuple(overrides.items()))
        if tag == "finite":
            return FinitePoints(tuple(SparseVec.from_json(p) for p in obj["points"]))
        if tag == "sign_sums":
            series = SeriesSpec.from_json(obj["series"])
            return SignSums(
                series=series,
                mode=SignMode.parse(obj["mode"]),
                horizon=int(obj["horizon"]),
                node_budget=int(obj.get("node_budget", DEFAULT_NODE_BUDGET)),
            )
        if tag == "translate":
            return Translate(set_from_json(obj["base"]), SparseVec.from_json(obj["by"]))
        if tag == "negate":
            return Negate(set_from_json(obj["base"]))
        if tag == "intersect":
            return Intersect(tuple(set_from_json(p) for p in obj["parts"]))
        if tag == "symmetrized":
            base = set_from_json(obj["base"])
            witnesses = tuple(SparseVec.from_json(w) for w in obj["witnesses"])
            for w in witnesses:
                if not contains(base, w):
                    raise WitnessNotMember(f"witness {w!r} is not a member of the base set")
            return Symmetrized(base, witnesses)
        if tag == "abs_conv_hull":
            return AbsConvHull(tuple(SparseVec.from_json(p) for p in obj["points"]))
    except KeyError as exc:
        raise InvalidInput(f"set JSON missing field {exc}") from None
    raise InvalidInput(f"unknown set type {tag!r}")


# ---------------------------------------------------------------------------
# membership


def contains(expr: SetExpr, v: SparseVec) -> bool:
    """Exact membership test."""
    if isinstance(expr, Box):
        return all(abs(x) <= expr.radius(i) for i, x in v.items())
    if isinstance(expr, FinitePoints):
        return v in expr.points
    if isinstance(expr, SignSums):
        return _signsum_contains(expr, v)
    if isinstance(expr, Translate):
        return contains(expr.base, v - expr.by)
    if isinstance(expr, Negate):
        return contains(expr.base, -v)
    if isinstance(expr, Intersect):
        return all(contains(p, v) for p in expr.parts)
    if isinstance(expr, Symmetrized):
        return all(
            contains(expr.base, w + v) and contains(expr.base, w - v)
            for w in expr.witnesses
        )
    if isinstance(expr, AbsConvHull):
        return _hull_contains(expr.points, v)
    raise InvalidInput(f"unknown set expression {type(expr).__name__}")


def _signsum_coeffs(expr: SignSums, v: SparseVec) -> Optional[list[Fraction]]:
    """Unique term coefficients of ``v``, when term supports are disjoint.

    Returns None when the series has overlapping supports or ``v`` does
    not decompose over the terms at all.
    """
    if not expr.series.disjoint_supports():
        return None
    coeffs: list[Fraction] = []
    covered: set[int] = set()
    for t in expr.terms:
        if t.is_zero:
            coeffs.append(Fraction(0))
            continue
        i0, x0 = next(iter(t.items()))
        c = v.get(i0) / x0
        for i, x in t.items():
            if v.get(i) != c * x:
                return None
            covered.add(i)
        coeffs.append(c)
    if any(i not in covered for i in v.support):
        return None
    return coeffs


def _signsum_contains(expr: SignSums, v: SparseVec) -> bool:
    coeffs = _signsum_coeffs(expr, v)
    if coeffs is not None:
        allowed = (Fraction(-1), Fraction(0), Fraction(1))
        if any(c not in allowed for c in coeffs):
            return False
        if expr.mode is SignMode.SUBSETS:
            return True
        # prefixes: every nonzero term up to the last used index must carry +-1
        last = 0
        for n, (c, t) in enumerate(zip(coeffs, expr.terms), start=1):
            if c != 0:
                last = n
        cut = max(last, 1)
        return all(
            c != 0 or t.is_zero for c, t in zip(coeffs[:cut], expr.terms[:cut])
        )

    # bounded search with coordinatewise pruning
    terms = expr.terms
    h = len(terms)
    suffix: list[dict[int, Fraction]] = [dict() for _ in range(h + 1)]
    for n in range(h - 1, -1, -1):
        acc = dict(suffix[n + 1])
        for i, x in terms[n].items():
            acc[i] = acc.get(i, Fraction(0)) + abs(x)
        suffix[n] = acc
    budget = expr.node_budget
    nodes = 0

    def viable(residual: dict[int, Fraction], k: int) -> bool:
        bound = suffix[k]
        return all(abs(x) <= bound.get(i, Fraction(0)) for i, x in residual.items())

    def step(residual: dict[int, Fraction], coeff: Fraction, term: SparseVec):
        out = dict(residual)
        for i, x in term.items():
            q = out.get(i, Fraction(0)) - coeff * x
            if q == 0:
                out.pop(i, None)
            else:
                out[i] = q
        return out

    prefix_mode = expr.mode is SignMode.PREFIXES

    def search(residual: dict[int, Fraction], k: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise DepthExceeded(f"sign-sum membership search exceeded {budget} nodes")
        if prefix_mode:
            if k >= 1 and not residual:
                return True
            if k == h:
                return False
            if not viable(residual, k):
                return False
            for c in (Fraction(1), Fraction(-1)):
                if search(step(residual, c, terms[k]), k + 1):
                    return True
            return False
        if not residual:
            return True
        if k == h or not viable(residual, k):
            return False
        for c in (Fraction(1), Fraction(-1), Fraction(0)):
            if search(step(residual, c, terms[k]), k + 1):
                return True
        return False

    return search(dict(v.items()), 0)


def _hull_contains(points: Sequence[SparseVec], v: SparseVec) -> bool:
    coords = sorted({i for p in points for i in p.support} | set(v.support))
    k = len(points)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for i in coords:
        rows.append(
            [p.get(i) for p in points]
            + [-p.get(i) for p in points]
            + [Fraction(0)]
        )
        rhs.append(v.get(i))
    rows.append([Fraction(1)] * (2 * k) + [Fraction(1)])
    rhs.append(Fraction(1))
    return exactlp.feasible_point(rows, rhs) is not None


# ---------------------------------------------------------------------------
# symmetrization (with eager flattening)


def symmetrize(expr: SetExpr, witnesses: Iterable[SparseVec]) -> SetExpr:
    """The symmetrized set of ``expr`` with respect to the witness list.

    Boxes (also translated/negated/nested symmetrized boxes) flatten to a
    closed-form box. An empty witness list returns the set unchanged.
    """
    ws = sorted(set(witnesses), key=lambda w: w.sort_key())
    if not ws:
        return expr
    for w in ws:
        if not contains(expr, w):
            raise WitnessNotMember(f"witness {w!r} is not a member of the set")
    return _symmetrize_reduce(expr, ws)


def _symmetrize_reduce(expr: SetExpr, ws: list[SparseVec]) -> SetExpr:
    if isinstance(expr, Box):
        coords = sorted({i for w in ws for i in w.support})
        overrides = expr.override_map()
        for i in coords:
            base_r = expr.radius(i)
            shrunk = min(base_r - abs(w.get(i)) for w in ws)
            overrides[i] = max(shrunk, Fraction(0))
        return Box(expr.default_radius, tuple(overrides.items()))
    if isinstance(expr, Translate):
        return _symmetrize_reduce(expr.base, [w - expr.by for w in ws])
    if isinstance(expr, Negate):
        return _symmetrize_reduce(expr.base, [-w for w in ws])
    if isinstance(expr, Symmetrized):
        merged = {v + w for v in expr.witnesses for w in ws}
        merged |= {v - w for v in expr.witnesses for w in ws}
        return _symmetrize_reduce(expr.base, sorted(merged, key=lambda u: u.sort_key()))
    if isinstance(expr, Intersect):
        return Intersect(tuple(_symmetrize_reduce(p, ws) for p in expr.parts))
    return Symmetrized(expr, tuple(ws))


def reduced(expr: SetExpr) -> SetExpr:
    """Recursively flatten symmetrized nodes that have closed forms."""
    if isinstance(expr, Symmetrized):
        return _symmetrize_reduce(reduced(expr.base), list(expr.witnesses))
    if isinstance(expr, Translate):
        return Translate(reduced(expr.base), expr.by)
    if isinstance(expr, Negate):
        return Negate(reduced(expr.base))
    if isinstance(expr, Intersect):
        return Intersect(tuple(reduced(p) for p in expr.parts))
    return expr


# ---------------------------------------------------------------------------
# enumeration and sampling

_ENUM_CACHE: dict[tuple, Optional[tuple[SparseVec, ...]]] = {}


def enumerate_members(expr: SetExpr, budget: int = DEFAULT_ENUM_BUDGET) -> Optional[tuple[SparseVec, ...]]:
    """All members of an enumerable expression, or None when it is not.

    Enumerability: finite point sets, sign sums within the budget, and
    translates / negations / intersections / symmetrizations thereof.
    """
    key = (expr, budget)
    if key in _ENUM_CACHE:
        return _ENUM_CACHE[key]
    result = _enumerate_members_raw(expr, budget)
    _ENUM_CACHE[key] = result
    return result


def _enumerate_members_raw(expr: SetExpr, budget: int) -> Optional[tuple[SparseVec, ...]]:
    if isinstance(expr, FinitePoints):
        return expr.points
    if isinstance(expr, Box):
        if expr.default_radius == 0 and all(r == 0 for _, r in expr.overrides):
            return (ZERO,)
        return None
    if isinstance(expr, SignSums):
        terms = expr.terms
        h = len(terms)
        count = 3 ** h if expr.mode is SignMode.SUBSETS else 2 ** (h + 1) - 2
        if count > budget:
            return None
        values: set[SparseVec] = set()
        if expr.mode is SignMode.SUBSETS:
            for coeffs in product((1, -1, 0), repeat=h):
                values.add(linear_comb(coeffs, terms))
        else:
            for m in range(1, h + 1):
                for signs in product((1, -1), repeat=m):
                    values.add(linear_comb(signs, terms[:m]))
        return tuple(sorted(values, key=lambda p: p.sort_key()))
    if isinstance(expr, Translate):
        base = enumerate_members(expr.base, budget)
        if base is None:
            return None
        return tuple(sorted({p + expr.by for p in base}, key=lambda p: p.sort_key()))
    if isinstance(expr, Negate):
        base = enumerate_members(expr.base, budget)
        if base is None:
            return None
        return tuple(sorted({-p for p in base}, key=lambda p: p.sort_key()))
    if isinstance(expr, Intersect):
        for part in expr.parts:
            base = enumerate_members(part, budget)
            if base is not None:
                keep = tuple(p for p in base if contains(expr, p))
                return keep
        return None
    if isinstance(expr, Symmetrized):
        base = enumerate_members(expr.base, budget)
        if base is None:
            return None
        pool = set(base)
        w0 = expr.witnesses[0]
        members = []
        for p in base:
            d = p - w0
            if all((w + d) in pool and (w - d) in pool for w in expr.witnesses):
                members.append(d)
        return tuple(sorted(members, key=lambda p: p.sort_key()))
    if isinstance(expr, AbsConvHull):
        return None
    raise InvalidInput(f"unknown set expression {type(expr).__name__}")


def linear_comb(coeffs: Sequence[ScalarLike], terms: Sequence[SparseVec]) -> SparseVec:
    return linear_combination(zip(coeffs, terms))


def sample_members(expr: SetExpr, rng: random.Random, count: int = 16) -> list[SparseVec]:
    """Deterministic member probes (given the caller's seeded rng)."""
    found: list[SparseVec] = []
    seen: set[SparseVec] = set()

    def push(v: SparseVec) -> None:
        if v not in seen and contains(expr, v):
            seen.add(v)
            found.append(v)

    push(ZERO)
    members = enumerate_members(expr, 4096)
    if members is not None:
        pool = list(members)
        for _ in range(min(count, len(pool))):
            push(pool[rng.randrange(len(pool))])
        return found

    for _ in range(count * 4):
        if len(found) >= count:
            break
        cand = _sample_candidate(expr, rng)
        if cand is not None:
            push(cand)
    return found


def _sample_candidate(expr: SetExpr, rng: random.Random) -> Optional[SparseVec]:
    if isinstance(expr, Box):
        coords = [i for i, _ in expr.overrides]
        top = expr.max_override_coord
        coords.extend(range(top + 1, top + 4))
        chosen = rng.sample(coords, k=min(len(coords), rng.randint(1, 3)))
        entries = {}
        for i in sorted(chosen):
            r = expr.radius(i)
            entries[i] = r * Fraction(rng.randint(-4, 4), 4)
        return SparseVec(entries)
    if isinstance(expr, SignSums):
        coeffs: list[int]
        if expr.mode is SignMode.SUBSETS:
            coeffs = [rng.choice((-1, 0, 1)) for _ in expr.terms]
        else:
            m = rng.randint(1, expr.horizon)
            coeffs = [rng.choice((-1, 1)) for _ in range(m)]
        return linear_comb(coeffs, expr.terms[: len(coeffs)])
    if isinstance(expr, AbsConvHull):
        weights = [rng.randint(-3, 3) for _ in expr.points]
        total = sum(abs(w) for w in weights)
        if total == 0:
            return ZERO
        return linear_comb([Fraction(w, total) for w in weights], expr.points)
    if isinstance(expr, Translate):
        cand = _sample_candidate(expr.base, rng)
        return None if cand is None else cand + expr.by
    if isinstance(expr, Negate):
        cand = _sample_candidate(expr.base, rng)
        return None if cand is None else -cand
    if isinstance(expr, Intersect):
        return _sample_candidate(expr.parts[0], rng)
    if isinstance(expr, Symmetrized):
        cand = _sample_candidate(expr.base, rng)
        return None if cand is None else cand - expr.witnesses[0]
    if isinstance(expr, FinitePoints):
        return expr.points[rng.randrange(len(expr.points))]
    return None


# ---------------------------------------------------------------------------
# functional suprema


def sup_functional(f: Functional, expr: SetExpr) -> BoundPair:
    """Certified interval for sup of the functional over the set.

    Exact (lower == upper) for boxes, finite sets, sign sums, hulls,
    their translates/negations, and hull-based symmetrized sets.
    """
    if isinstance(expr, Box):
        value = sum((abs(x) * expr.radius(i) for i, x in f.items()), Fraction(0))
        return BoundPair(value, value, upper_witness={"rule": "box"})
    if isinstance(expr, FinitePoints):
        best = None
        arg = None
        for p in expr.points:
            v = dual_pair(f, p)
            if best is None or v > best:
                best, arg = v, p
        return BoundPair(best, best, lower_witness={"point": arg.to_json()})
    if isinstance(expr, SignSums):
        value = sum((abs(dual_pair(f, t)) for t in expr.terms), Fraction(0))
        return BoundPair(value, value, upper_witness={"rule": "column_sums"})
    if isinstance(expr, Translate):
        inner = sup_functional(f, expr.base)
        shift = dual_pair(f, expr.by)
        lo = None if inner.lower is None else inner.lower + shift
        hi = None if inner.upper is None else inner.upper + shift
        return BoundPair(lo, hi, inner.lower_witness, inner.upper_witness)
    if isinstance(expr, Negate):
        return sup_functional(-f, expr.base)
    if isinstance(expr, AbsConvHull):
        value = max(abs(dual_pair(f, p)) for p in expr.points)
        return BoundPair(value, value, upper_witness={"rule": "generator_max"})
    if isinstance(expr, Intersect):
        uppers = [sup_functional(f, p).upper for p in expr.parts]
        finite = [u for u in uppers if u is not None]
        upper = min(finite) if finite else None
        rng = random.Random(17)
        values = [dual_pair(f, v) for v in sample_members(expr, rng)]
        lower = max(values) if values else None
        if lower is not None and upper is not None and lower > upper:
            raise SymdexError("intersection sup certificates are inconsistent")
        return BoundPair(lower, upper)
    if isinstance(expr, Symmetrized):
        flat = reduced(expr)
        if not isinstance(flat, Symmetrized):
            return sup_functional(f, flat)
        if isinstance(flat.base, AbsConvHull):
            value, arg = _symmetrized_hull_max(
                flat.base.points, flat.witnesses, dict(f.items())
            )
            return BoundPair(value, value, lower_witness={"point": arg.to_json()})
        sup_base = sup_functional(f, flat.base).upper
        inf_base = sup_functional(-f, flat.base).upper  # = -inf(f, base)
        upper = None
        for w in flat.witnesses:
            val = dual_pair(f, w)
            cands = []
            if sup_base is not None:
                cands.append(sup_base - val)
            if inf_base is not None:
                cands.append(inf_base + val)
            for c in cands:
                if upper is None or c < upper:
                    upper = c
        rng = random.Random(17)
        lower = Fraction(0)  # zero always belongs to a symmetrized set
        for v in sample_members(flat, rng):
            value = dual_pair(f, v)
            if value > lower:
                lower = value
        if upper is not None and lower > upper:
            raise SymdexError("symmetrized sup certificates are inconsistent")
        return BoundPair(lower, upper)
    raise InvalidInput(f"unknown set expression {type(expr).__name__}")


def _abs_coordinate_sup(expr: SetExpr, coord: int) -> Fraction:
    """Upper bound (exact where possible) on sup |v_coord| over the set."""
    plus = sup_functional(unit(coord), expr).upper
    minus = sup_functional(-unit(coord), expr).upper
    if plus is None or minus is None:
        raise UnboundedDiameter(f"coordinate {coord} is unbounded")
    return max(plus, minus)


def _fresh_abs_sup(expr: SetExpr) -> Fraction:
    """Abs coordinate sup at any coordinate beyond every relevant support."""
    if isinstance(expr, Box):
        return expr.default_radius
    if isinstance(expr, (FinitePoints, SignSums, AbsConvHull)):
        return Fraction(0)
    if isinstance(expr, (Translate, Negate)):
        return _fresh_abs_sup(expr.base)
    if isinstance(expr, Intersect):
        return min(_fresh_abs_sup(p) for p in expr.parts)
    if isinstance(expr, Symmetrized):
        return _fresh_abs_sup(expr.base)
    raise InvalidInput(f"unknown set expression {type(expr).__name__}")


def relevant_coords(expr: SetExpr) -> set[int]:
    """Coordinates on which the expression differs from its fresh behaviour."""
    if isinstance(expr, Box):
        return {i for i, _ in expr.overrides}
    if isinstance(expr, FinitePoints):
        return {i for p in expr.points for i in p.support}
    if isinstance(expr, SignSums):
        return {i for t in expr.terms for i in t.support}
    if isinstance(expr, AbsConvHull):
        return {i for p in expr.points for i in p.support}
    if isinstance(expr, Translate):
        return relevant_coords(expr.base) | set(expr.by.support)
    if isinstance(expr, Negate):
        return relevant_coords(expr.base)
    if isinstance(expr, Intersect):
        out: set[int] = set()
        for p in expr.parts:
            out |= relevant_coords(p)
        return out
    if isinstance(expr, Symmetrized):
        out = relevant_coords(expr.base)
        for w in expr.witnesses:
            out |= set(w.support)
        return out
    raise InvalidInput(f"unknown set expression {type(expr).__name__}")


def coordinate_relaxation(expr: SetExpr) -> Box:
    """Smallest box certified to contain the (symmetrized) expression.

    Radii come from the base's coordinatewise suprema minus the witness
    coordinates; this is the workhorse upper bound for diameters of
    symmetrized sets without a closed form.
    """
    flat = reduced(expr)
    if isinstance(flat, Box):
        return flat
    if not isinstance(flat, Symmetrized):
        raise InvalidInput("coordinate relaxation expects a symmetrized set")
    base = flat.base
    coords = relevant_coords(flat)
    default = _fresh_abs_sup(base)
    overrides = {}
    for i in sorted(coords):
        cap = _abs_coordinate_sup(base, i)
        r = min(cap - abs(w.get(i)) for w in flat.witnesses)
        overrides[i] = max(r, Fraction(0))
    return Box(default, tuple(overrides.items()))


# ---------------------------------------------------------------------------
# diameters


def diameter(
    expr: SetExpr,
    kind: NormKind,
    seed: int = 0,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> BoundPair:
    """Certified diameter interval (Euclidean values carried squared)."""
    flat = reduced(expr)
    if isinstance(flat, Box):
        return _box_diameter(flat, kind)
    if isinstance(flat, (Translate, Negate)):
        return diameter(flat.base, kind, seed, enum_budget)
    if isinstance(flat, AbsConvHull):
        top = max(norm(p, kind) for p in flat.points)
        arg = max(flat.points, key=lambda p: (norm(p, kind), p.sort_key()))
        value = double_length(top, kind)
        return BoundPair(
            value, value, lower_witness={"pair": [arg.to_json(), (-arg).to_json()]}
        )
    if isinstance(flat, SignSums):
        top, arg = _signsum_max_norm(flat, kind, enum_budget)
        value = double_length(top, kind)
        return BoundPair(
            value, value, lower_witness={"pair": [arg.to_json(), (-arg).to_json()]}
        )
    if isinstance(flat, FinitePoints):
        return _pairwise_diameter(flat.points, kind)
    if isinstance(flat, Intersect):
        members = enumerate_members(flat, enum_budget)
        if members is not None and len(members) <= 2048:
            return _pairwise_diameter(members, kind)
        uppers = []
        for p in flat.parts:
            try:
                d = diameter(p, kind, seed, enum_budget)
            except UnboundedDiameter:
                continue
            if d.upper is not None:
                uppers.append(d.upper)
        if not uppers:
            raise UnboundedDiameter("no part of the intersection is certified bounded")
        rng = random.Random(seed)
        samples = sample_members(flat, rng)
        lower, wit = _best_pair(samples, kind)
        return BoundPair(lower, min(uppers), lower_witness=wit)
    if isinstance(flat, Symmetrized):
        return _symmetrized_diameter(flat, kind, seed, enum_budget)
    raise InvalidInput(f"unknown set expression {type(flat).__name__}")


def _box_diameter(box: Box, kind: NormKind) -> BoundPair:
    radii = [r for _, r in box.overrides]
    if kind is NormKind.SUP:
        top = max([box.default_radius] + radii)
        value = 2 * top
        return BoundPair(value, value, upper_witness={"rule": "box_sup"})
    if box.default_radius > 0:
        raise UnboundedDiameter(
            "box with positive default radius is unbounded in this norm"
        )
    if kind is NormKind.SUM:
        value = 2 * sum(radii, Fraction(0))
        return BoundPair(value, value, upper_witness={"rule": "box_sum"})
    value = 4 * sum((r * r for r in radii), Fraction(0))
    return BoundPair(value, value, upper_witness={"rule": "box_euclid_sq"})


def _pairwise_diameter(points: Sequence[SparseVec], kind: NormKind) -> BoundPair:
    best = Fraction(0)
    wit = None
    pts = list(points)
    for a, b in combinations(pts, 2):
        d = norm(a - b, kind)
        if d > best:
            best = d
            wit = {"pair": [a.to_json(), b.to_json()]}
    if wit is None and pts:
        wit = {"pair": [pts[0].to_json(), pts[0].to_json()]}
    return BoundPair(best, best, lower_witness=wit)


def _best_pair(points: Sequence[SparseVec], kind: NormKind):
    best = Fraction(0)
    wit = None
    pts = list(points)
    for a, b in combinations(pts, 2):
        d = norm(a - b, kind)
        if d > best:
            best = d
            wit = {"pair": [a.to_json(), b.to_json()]}
    return best, wit


def _signsum_max_norm(expr: SignSums, kind: NormKind, enum_budget: int):
    """Exact max norm over the sign-sum set, with an attaining member."""
    terms = expr.terms
    if kind is NormKind.SUP:
        column: dict[int, Fraction] = {}
        for t in terms:
            for i, x in t.items():
                column[i] = column.get(i, Fraction(0)) + abs(x)
        if not column:
            return Fraction(0), ZERO
        coord = max(column, key=lambda i: (column[i], -i))
        signs = [
            1 if t.get(coord) >= 0 else -1 if t.get(coord) != 0 else 0 for t in terms
        ]
        if expr.mode is SignMode.PREFIXES:
            signs = [s if s != 0 else 1 for s in signs]
        return column[coord], linear_comb(signs, terms)
    if expr.series.disjoint_supports():
        total = sum((norm(t, kind) for t in terms), Fraction(0))
        return total, linear_comb([1] * len(terms), terms)
    members = enumerate_members(expr, enum_budget)
    if members is None:
        raise BudgetExceeded("sign-sum enumeration over budget for this norm")
    arg = max(members, key=lambda p: (norm(p, kind), p.sort_key()))
    return norm(arg, kind), arg


def _symmetrized_witness_complement(flat: Symmetrized) -> Optional[list[int]]:
    """Series indices untouched by every witness (disjoint-support series).

    Only valid in subset mode, where the symmetrized set is exactly the
    signed subset sums over these indices; prefix-mode members must stay
    prefixes, which this closed form cannot see.
    """
    base = flat.base
    if (
        not isinstance(base, SignSums)
        or base.mode is not SignMode.SUBSETS
        or not base.series.disjoint_supports()
    ):
        return None
    used: set[int] = set()
    for w in flat.witnesses:
        coeffs = _signsum_coeffs(base, w)
        if coeffs is None:
            return None
        used |= {n for n, c in enumerate(coeffs, start=1) if c != 0}
    return [
        n
        for n, t in enumerate(base.terms, start=1)
        if n not in used and not t.is_zero
    ]


def _symmetrized_diameter(
    flat: Symmetrized, kind: NormKind, seed: int, enum_budget: int
) -> BoundPair:
    base = flat.base
    comp = _symmetrized_witness_complement(flat)
    if comp is not None:
        terms = [base.terms[n - 1] for n in comp]
        if not terms:
            return BoundPair(Fraction(0), Fraction(0), lower_witness={"pair": [{}, {}]})
        if kind is NormKind.SUP:
            top = max(norm(t, kind) for t in terms)
            arg = max(terms, key=lambda t: (norm(t, kind), t.sort_key()))
        else:
            top = sum((norm(t, kind) for t in terms), Fraction(0))
            arg = linear_comb([1] * len(terms), terms)
        value = double_length(top, kind)
        return BoundPair(
            value, value, lower_witness={"pair": [arg.to_json(), (-arg).to_json()]}
        )
    members = enumerate_members(flat, enum_budget)
    if members is not None:
        top = Fraction(0)
        arg = ZERO
        for d in members:
            v = norm(d, kind)
            if v > top:
                top, arg = v, d
        value = double_length(top, kind)
        return BoundPair(
            value, value, lower_witness={"pair": [arg.to_json(), (-arg).to_json()]}
        )
    if isinstance(base, AbsConvHull) and kind in (NormKind.SUP, NormKind.SUM):
        top, arg = _symmetrized_hull_extent(flat, kind)
        value = double_length(top, kind)
        return BoundPair(
            value, value, lower_witness={"pair": [arg.to_json(), (-arg).to_json()]}
        )
    relax = coordinate_relaxation(flat)
    upper = _box_diameter(relax, kind).upper
    rng = random.Random(seed)
    samples = sample_members(flat, rng)
    lower, wit = _best_pair(samples, kind)
    if upper is not None and lower > upper:
        raise SymdexError("symmetrized diameter certificates are inconsistent")
    return BoundPair(lower, upper, lower_witness=wit, upper_witness={"rule": "relaxation"})


# ---------------------------------------------------------------------------
# hull-based symmetrized sets via exact LP


def _symmetrized_hull_max(
    points: Sequence[SparseVec],
    witnesses: Sequence[SparseVec],
    objective: dict[int, Fraction],
):
    """Exact max of a linear objective over a hull-based symmetrized set."""
    coords = sorted(
        {i for p in points for i in p.support}
        | {i for w in witnesses for i in w.support}
        | set(objective)
    )
    if not coords:
        return Fraction(0), ZERO
    idx = {i: pos for pos, i in enumerate(coords)}
    c_count = len(coords)
    k = len(points)
    block = 2 * k + 1
    nvars = 2 * c_count + 2 * len(witnesses) * block
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for wi, w in enumerate(witnesses):
        for si, sgn in enumerate((1, -1)):
            offset = 2 * c_count + (2 * wi + si) * block
            for i in coords:
                row = [Fraction(0)] * nvars
                row[idx[i]] = Fraction(-sgn)
                row[c_count + idx[i]] = Fraction(sgn)
                for j, p in enumerate(points):
                    row[offset + j] = p.get(i)
                    row[offset + k + j] = -p.get(i)
                rows.append(row)
                rhs.append(w.get(i))
            row = [Fraction(0)] * nvars
            for j in range(2 * k):
                row[offset + j] = Fraction(1)
            row[offset + 2 * k] = Fraction(1)
            rows.append(row)
            rhs.append(Fraction(1))
    obj = [Fraction(0)] * nvars
    for i, coeff in objective.items():
        if i in idx:
            obj[idx[i]] = coeff
            obj[c_count + idx[i]] = -coeff
    res = exactlp.solve_lp(obj, rows, rhs)
    if res.status != exactlp.OPTIMAL:
        raise WitnessNotMember("hull symmetrization witnesses are not all members")
    d = SparseVec({coords[c]: res.x[c] - res.x[c_count + c] for c in range(c_count)})
    return res.value, d


def _symmetrized_hull_extent(flat: Symmetrized, kind: NormKind):
    """Exact max norm over a hull-based symmetrized set (SUP/SUM norms)."""
    points = flat.base.points
    coords = sorted(relevant_coords(flat))
    best = Fraction(0)
    arg = ZERO
    if kind is NormKind.SUP:
        for i in coords:
            for sgn in (1, -1):
                value, d = _symmetrized_hull_max(
                    points, flat.witnesses, {i: Fraction(sgn)}
                )
                if value > best:
                    best, arg = value, d
        return best, arg
    if len(coords) > 14:
        raise BudgetExceeded("hull symmetrized diameter needs too many sign patterns")
    for signs in product((1, -1), repeat=len(coords)):
        objective = {i: Fraction(s) for i, s in zip(coords, signs)}
        value, d = _symmetrized_hull_max(points, flat.witnesses, objective)
        if value > best:
            best, arg = value, d
    return best, arg


# ---------------------------------------------------------------------------
# free directions


def free_direction(
    expr: SetExpr,
    witnesses: Sequence[SparseVec],
    kind: NormKind,
    shrink: ScalarLike = 0,
    *,
    floor: int = 0,
) -> Optional[SparseVec]:
    """A direction d with w + d and w - d members for every witness.

    Returns the norm-largest candidate from the variant's deterministic
    family (canonical sign: first nonzero entry positive), or None when
    no nonzero candidate passes. The result replays through membership
    checks alone. ``floor`` restricts candidates to supports strictly
    beyond that coordinate (used to dodge a functional's span).
    """
    shrink_q = as_scalar(shrink)
    if not (0 <= shrink_q < 1):
        raise InvalidInput("shrink must lie in [0, 1)")
    ws = list(witnesses)
    for w in ws:
        if not contains(expr, w):
            raise WitnessNotMember(f"witness {w!r} is not a member of the set")
    d = _free_direction_raw(reduced(expr), ws, kind, shrink_q, floor)
    if d is None or d.is_zero:
        return None
    for w in ws:
        if not (contains(expr, w + d) and contains(expr, w - d)):
            raise SymdexError("free direction failed its membership replay")
    return d


def _canonical_sign(d: SparseVec) -> SparseVec:
    items = list(d.items())
    if items and items[0][1] < 0:
        return -d
    return d


def _free_direction_raw(
    expr: SetExpr, ws: list[SparseVec], kind: NormKind, shrink: Fraction, floor: int
) -> Optional[SparseVec]:
    if isinstance(expr, Box):
        if expr.default_radius == 0:
            return None
        fresh = max(expr.max_override_coord, floor)
        for w in ws:
            fresh = max(fresh, w.max_support)
        scale = (1 - shrink) * expr.default_radius
        return unit(fresh + 1, scale)
    if isinstance(expr, FinitePoints):
        if not ws:
            return None
        pool = set(expr.points)
        best: Optional[SparseVec] = None
        best_key = None
        for p in expr.points:
            d = _canonical_sign(p - ws[0])
            if d.is_zero or (floor and any(i <= floor for i in d.support)):
                continue
            if all((w + d) in pool and (w - d) in pool for w in ws):
                key = (-norm(d, kind), d.sort_key())
                if best_key is None or key < best_key:
                    best, best_key = d, key
        return best
    if isinstance(expr, SignSums):
        used: set[int] = set()
        for w in ws:
            used |= set(w.support)
        candidates = []
        for n, t in enumerate(expr.terms, start=1):
            if t.is_zero or any(i in used or i <= floor for i in t.support):
                continue
            candidates.append((-norm(t, kind), n, t))
        for _, _, t in sorted(candidates, key=lambda c: (c[0], c[1])):
            d = _canonical_sign(t)
            if all(
                contains(expr, w + d) and contains(expr, w - d) for w in ws
            ) and contains(expr, d):
                return d
        return None
    if isinstance(expr, Translate):
        return _free_direction_raw(expr.base, [w - expr.by for w in ws], kind, shrink, floor)
    if isinstance(expr, Negate):
        return _free_direction_raw(expr.base, [-w for w in ws], kind, shrink, floor)
    if isinstance(expr, Symmetrized):
        inner: set[SparseVec] = set()
        if ws:
            for v in expr.witnesses:
                for w in ws:
                    inner.add(v + w)
                    inner.add(v - w)
        else:
            inner = set(expr.witnesses)
        merged = sorted(inner, key=lambda u: u.sort_key())
        return _free_direction_raw(expr.base, merged, kind, shrink, floor)
    if isinstance(expr, Intersect):
        for part in expr.parts:
            d = _free_direction_raw(part, ws, kind, shrink, floor)
            if d is None or d.is_zero:
                continue
            ok = all(
                contains(expr, w + d) and contains(expr, w - d) for w in ws
            )
            if ok and contains(expr, d) and contains(expr, -d):
                return d
        return None
    if isinstance(expr, AbsConvHull):
        return None
    raise InvalidInput(f"unknown set expression {type(expr).__name__}")


# ---------------------------------------------------------------------------
# difference sets (for sign-sum verification)


def difference_set(expr: SetExpr) -> Optional[SetExpr]:
    """Closed form of {a - b : a, b in the set}, where available."""
    flat = reduced(expr)
    if isinstance(flat, Box):
        return Box(
            2 * flat.default_radius,
            tuple((i, 2 * r) for i, r in flat.overrides),
        )
    members = enumerate_members(flat, 4096)
    if members is not None:
        diffs = {a - b for a in members for b in members}
        return FinitePoints(tuple(diffs))
    return None
