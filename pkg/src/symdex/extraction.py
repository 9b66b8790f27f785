"""Constructive routines: sequence extraction, orthogonal functionals,
almost-isometric refinement, dyadic trees and extreme-point analysis.

The extraction loop peels a set by repeated symmetrization: each step
takes the norm-largest free direction of the current set as the next
point, pairs it with a norm-one functional that kills all previous
points and nearly attains its supremum, and symmetrizes at that point.
Everything emitted is a transcript that replays through membership
checks and exact arithmetic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import isqrt
from typing import Optional, Sequence

from . import exactlp
from .errors import (
    ExtractionStalled,
    Inconclusive,
    InvalidInput,
    NoCertificate,
    NotFound,
    SequenceStalled,
    SymdexError,
    TreeStalled,
    WitnessNotMember,
)
from .indexes import SearchStrategy, default_pool, delta0, delta_lower, delta_upper
from .sets import (
    Box,
    FinitePoints,
    SetExpr,
    contains,
    diameter,
    difference_set,
    free_direction,
    reduced,
    sample_members,
    set_from_json,
    set_to_json,
    sup_functional,
    symmetrize,
)
from .vectors import (
    ZERO,
    Functional,
    NormKind,
    ScalarLike,
    SparseVec,
    as_length,
    as_scalar,
    dual_norm,
    dual_pair,
    format_scalar,
    linear_combination,
    norm,
    unit,
)


# ---------------------------------------------------------------------------
# transcripts


@dataclass
class TranscriptStep:
    x: SparseVec
    f: Functional
    set_before: SetExpr  # the set the point was drawn from


@dataclass
class ExtractionTranscript:
    """Full inductive state of a sequence extraction.

    ``delta_lower_at_2N`` is the certified plain-length lower bound for
    the index at 2^N witnesses; it is the constant the basis inequality
    is checked against.
    """

    base_set: SetExpr
    kind: NormKind
    epsilon: Fraction
    eta: Fraction
    x0: SparseVec
    steps: list[TranscriptStep]
    delta_lower_at_2N: Fraction
    final_set: SetExpr

    @property
    def points(self) -> list[SparseVec]:
        return [s.x for s in self.steps]

    def to_json(self) -> dict:
        return {
            "norm": self.kind.value,
            "base": set_to_json(self.base_set),
            "epsilon": format_scalar(self.epsilon),
            "eta": format_scalar(self.eta),
            "x0": self.x0.to_json(),
            "steps": [
                {
                    "x": s.x.to_json(),
                    "f": s.f.to_json(),
                    "A": set_to_json(s.set_before),
                }
                for s in self.steps
            ],
            "delta_lower": format_scalar(self.delta_lower_at_2N),
            "final": set_to_json(self.final_set),
        }

    @classmethod
    def from_json(cls, obj) -> "ExtractionTranscript":
        try:
            steps = [
                TranscriptStep(
                    x=SparseVec.from_json(s["x"]),
                    f=SparseVec.from_json(s["f"]),
                    set_before=set_from_json(s["A"]),
                )
                for s in obj["steps"]
            ]
            return cls(
                base_set=set_from_json(obj["base"]),
                kind=NormKind.parse(obj["norm"]),
                epsilon=as_scalar(obj["epsilon"]),
                eta=as_scalar(obj["eta"]),
                x0=SparseVec.from_json(obj["x0"]),
                steps=steps,
                delta_lower_at_2N=as_scalar(obj["delta_lower"]),
                final_set=set_from_json(obj["final"]),
            )
        except KeyError as exc:
            raise InvalidInput(f"transcript JSON missing field {exc}") from None


def _default_start(expr: SetExpr) -> SparseVec:
    if contains(expr, ZERO):
        return ZERO
    pool = default_pool(expr)
    if not pool:
        raise InvalidInput("no starting point available in the set")
    return pool[0]


# ---------------------------------------------------------------------------
# orthogonal functionals


def _fresh_functional_candidates(
    span: Sequence[SparseVec], d: SparseVec
) -> list[Functional]:
    """Single-coordinate unit functionals supported where the span is not."""
    out = []
    for m, value in d.items():
        if all(v.get(m) == 0 for v in span):
            sign = 1 if value > 0 else -1
            out.append((abs(value), m, unit(m, sign)))
    out.sort(key=lambda t: (-t[0], t[1]))
    return [f for _, _, f in out]


def _dual_ball_lp(
    span: Sequence[SparseVec], objective: SparseVec, kind: NormKind
) -> Optional[Functional]:
    """Maximize f(objective) over the dual unit ball orthogonal to the span.

    Polyhedral dual balls only (sup and sum norms); the result is
    rescaled to dual norm exactly one.
    """
    if kind is NormKind.EUCLID:
        return None
    coords = sorted({i for v in span for i in v.support} | set(objective.support))
    if not coords:
        return None
    c = len(coords)
    idx = {i: pos for pos, i in enumerate(coords)}
    if kind is NormKind.SUP:
        # dual ball is the l1 ball: f = u - w, sum(u + w) + t = 1
        nvars = 2 * c + 1
        rows = [[Fraction(1)] * (2 * c) + [Fraction(1)]]
        rhs = [Fraction(1)]
        for v in span:
            row = [Fraction(0)] * nvars
            for i, x in v.items():
                row[idx[i]] = x
                row[c + idx[i]] = -x
            rows.append(row)
            rhs.append(Fraction(0))
        obj = [Fraction(0)] * nvars
        for i, x in objective.items():
            obj[idx[i]] = x
            obj[c + idx[i]] = -x
        res = exactlp.solve_lp(obj, rows, rhs)
        if res.status != exactlp.OPTIMAL:
            return None
        f = SparseVec({coords[p]: res.x[p] - res.x[c + p] for p in range(c)})
    else:
        # dual ball is the sup ball: f = u - w with u_i + w_i + s_i = 1
        nvars = 3 * c
        rows = []
        rhs = []
        for p in range(c):
            row = [Fraction(0)] * nvars
            row[p] = Fraction(1)
            row[c + p] = Fraction(1)
            row[2 * c + p] = Fraction(1)
            rows.append(row)
            rhs.append(Fraction(1))
        for v in span:
            row = [Fraction(0)] * nvars
            for i, x in v.items():
                row[idx[i]] = x
                row[c + idx[i]] = -x
            rows.append(row)
            rhs.append(Fraction(0))
        obj = [Fraction(0)] * nvars
        for i, x in objective.items():
            obj[idx[i]] = x
            obj[c + idx[i]] = -x
        res = exactlp.solve_lp(obj, rows, rhs)
        if res.status != exactlp.OPTIMAL:
            return None
        f = SparseVec({coords[p]: res.x[p] - res.x[c + p] for p in range(c)})
    dn = dual_norm(f, kind)
    if dn == 0:
        return None
    return f.scale(Fraction(1) / dn)


def orthogonal_functional(
    span: Sequence[SparseVec],
    target: SetExpr,
    lam: ScalarLike,
    kind: NormKind,
    certificate: Optional[SparseVec] = None,
) -> Functional:
    """A norm-one functional vanishing on the span with sup above ``lam``.

    Tries a single fresh coordinate of the certificate direction first,
    then an exact LP over the dual ball restricted to the joint support.
    The certificate direction must be a member of the target set; when
    omitted it is taken from the set's free-direction family.
    """
    lam_q = as_scalar(lam)
    d = certificate
    if d is None:
        span_top = max((v.max_support for v in span), default=0)
        d = free_direction(target, [], kind, floor=span_top)
        if d is None:
            d = free_direction(target, [], kind)
        if d is None:
            raise NoCertificate("no certificate direction available")
    elif not contains(target, d):
        raise WitnessNotMember("certificate direction is not a member of the target set")

    for f in _fresh_functional_candidates(span, d):
        if dual_pair(f, d) > lam_q:
            return f
        sup = sup_functional(f, target)
        if sup.lower is not None and sup.lower > lam_q:
            return f

    f = _dual_ball_lp(span, d, kind)
    if f is not None:
        value = dual_pair(f, d)
        if value > lam_q:
            return f
        sup = sup_functional(f, target)
        if sup.lower is not None and sup.lower > lam_q:
            return f
    if kind is NormKind.EUCLID:
        raise NoCertificate(
            "no fresh coordinate; exact unit functionals in the Euclidean dual "
            "need the sup or sum model"
        )
    raise NoCertificate(f"no functional with sup above {lam_q} was found")


# ---------------------------------------------------------------------------
# sequence extraction


def _choose_step_functional(
    prev: Sequence[SparseVec],
    current: SetExpr,
    x_n: SparseVec,
    eta: Fraction,
    floor_plain: Fraction,
    kind: NormKind,
) -> Optional[Functional]:
    def admissible(f: Functional) -> bool:
        if any(dual_pair(f, x) != 0 for x in prev):
            return False
        value = dual_pair(f, x_n)
        sup = sup_functional(f, current).upper
        if sup is None or not value > sup - eta:
            return False
        return value > floor_plain - 2 * eta

    for f in _fresh_functional_candidates(prev, x_n):
        if admissible(f):
            return f
    f = _dual_ball_lp(prev, x_n, kind)
    if f is not None and admissible(f):
        return f
    return None


def extract_c0_sequence(
    expr: SetExpr,
    epsilon: ScalarLike,
    N: int,
    kind: NormKind,
    x0: Optional[SparseVec] = None,
) -> ExtractionTranscript:
    """Extract N points and functionals witnessing the basis inequality.

    Each set in the lineage is the symmetrization of the previous one at
    the previous point; points are free directions chosen by the
    deterministic rule (lowest fresh coordinate, positive sign), and
    functionals are norm-one, vanish on earlier points, and nearly
    attain their supremum on the current set.

    Raises :class:`ExtractionStalled` (with the partial transcript) when
    no admissible point/functional exists -- the expected outcome on
    sets whose indexes collapse.
    """
    eps = as_scalar(epsilon)
    if eps <= 0:
        raise InvalidInput("epsilon must be positive")
    if N < 1:
        raise InvalidInput("extraction needs N >= 1")
    eta = eps / 3
    start = _default_start(expr) if x0 is None else x0
    if not contains(expr, start):
        raise WitnessNotMember("starting point is not a member of the set")

    current = symmetrize(expr, [start])
    steps: list[TranscriptStep] = []

    def partial() -> ExtractionTranscript:
        n = len(steps)
        floor = delta_lower(expr, 2 ** n, kind).lower_certificate if n else None
        return ExtractionTranscript(
            base_set=expr,
            kind=kind,
            epsilon=eps,
            eta=eta,
            x0=start,
            steps=steps,
            delta_lower_at_2N=floor.plain_value if floor else Fraction(0),
            final_set=current,
        )

    for n in range(1, N + 1):
        x_n = free_direction(current, [], kind)
        if x_n is None or x_n.is_zero:
            raise ExtractionStalled(n, partial(), "no free direction of positive norm")
        floor = delta_lower(expr, 2 ** n, kind).lower_certificate.plain_value
        f_n = _choose_step_functional(
            [s.x for s in steps], current, x_n, eta, floor, kind
        )
        if f_n is None:
            raise ExtractionStalled(n, partial(), "no admissible functional")
        steps.append(TranscriptStep(x=x_n, f=f_n, set_before=current))
        current = symmetrize(current, [x_n])

    floor = delta_lower(expr, 2 ** N, kind).lower_certificate.plain_value
    return ExtractionTranscript(
        base_set=expr,
        kind=kind,
        epsilon=eps,
        eta=eta,
        x0=start,
        steps=steps,
        delta_lower_at_2N=floor,
        final_set=current,
    )


def _box_shifted_inclusion(inner: Box, shift: SparseVec, outer: Box) -> bool:
    """Exact check that shift +- inner is contained in outer (boxes)."""
    coords = {i for i, _ in inner.overrides} | {i for i, _ in outer.overrides}
    coords |= set(shift.support)
    if inner.default_radius > outer.default_radius:
        return False
    return all(
        abs(shift.get(i)) + inner.radius(i) <= outer.radius(i) for i in coords
    )


def validate_transcript(t: ExtractionTranscript, seed: int = 0, probes: int = 8) -> dict:
    """Re-check every transcript condition; exact where closed forms allow.

    Returns a report with per-step results and the verification level
    achieved for the sampled conditions.
    """
    rng = random.Random(seed)
    report: dict = {"ok": True, "steps": []}

    for n, step in enumerate(t.steps, start=1):
        entry: dict = {"n": n}
        entry["unit_norm"] = dual_norm(step.f, t.kind) == 1
        if not entry["unit_norm"]:
            report["ok"] = False
        entry["orthogonal"] = all(
            dual_pair(step.f, t.steps[k].x) == 0 for k in range(n - 1)
        )
        if not entry["orthogonal"]:
            report["ok"] = False
        entry["member"] = contains(step.set_before, step.x)
        if not entry["member"]:
            report["ok"] = False

        value = dual_pair(step.f, step.x)
        sup = sup_functional(step.f, step.set_before).upper
        entry["near_sup"] = sup is not None and value > sup - t.eta
        if not entry["near_sup"]:
            report["ok"] = False
        floor = delta_lower(t.base_set, 2 ** n, t.kind).lower_certificate.plain_value
        entry["above_index_floor"] = value > floor - 2 * t.eta
        if not entry["above_index_floor"]:
            report["ok"] = False

        nxt = t.steps[n].set_before if n < len(t.steps) else t.final_set
        # condition (a): prev_x +- (this set) inside the previous set
        prev_expr = t.base_set if n == 1 else t.steps[n - 2].set_before
        shift = t.x0 if n == 1 else t.steps[n - 2].x
        inner = reduced(step.set_before)
        outer = reduced(prev_expr)
        if isinstance(inner, Box) and isinstance(outer, Box):
            entry["nested"] = _box_shifted_inclusion(inner, shift, outer)
            entry["nested_level"] = "exact"
        else:
            ok = True
            for z in sample_members(step.set_before, rng, probes):
                if not (contains(prev_expr, shift + z) and contains(prev_expr, shift - z)):
                    ok = False
                    break
            entry["nested"] = ok
            entry["nested_level"] = "sampled"
        if not entry["nested"]:
            report["ok"] = False

        # condition (d): the functional is small on the next set
        nxt_flat = reduced(nxt)
        if isinstance(nxt_flat, Box):
            cap = sum(
                (abs(x) * nxt_flat.radius(i) for i, x in step.f.items()), Fraction(0)
            )
            entry["small_on_next"] = cap < t.eta
            entry["small_on_next_level"] = "exact"
        else:
            entry["small_on_next"] = all(
                abs(dual_pair(step.f, z)) < t.eta
                for z in sample_members(nxt, rng, probes)
            )
            entry["small_on_next_level"] = "sampled"
        if not entry["small_on_next"]:
            report["ok"] = False

        report["steps"].append(entry)
    return report


def verify_basis_inequality(
    t: ExtractionTranscript, coefficients: Sequence[ScalarLike]
) -> tuple[Fraction, Fraction]:
    """Margins of the two-sided norm estimate for a coefficient vector.

    Returns (lower_margin, upper_margin); both nonnegative when the
    inequality holds. Negative margins are returned as they are, never
    clamped. Euclidean margins are in the squared convention.
    """
    lams = [as_scalar(c) for c in coefficients]
    if len(lams) > len(t.steps):
        raise InvalidInput("more coefficients than transcript steps")
    combo = linear_combination(zip(lams, (s.x for s in t.steps)))
    peak = max((abs(c) for c in lams), default=Fraction(0))
    d0_upper = delta0(t.base_set, t.kind).upper
    if d0_upper is None:
        raise InvalidInput("base set has no certified diameter upper bound")
    floor = t.delta_lower_at_2N - t.epsilon
    if t.kind is NormKind.EUCLID:
        nrm_sq = norm(combo, t.kind)
        lower_scale = max(floor, Fraction(0)) * peak
        lower_margin = nrm_sq - lower_scale * lower_scale
        upper_margin = d0_upper * peak * peak - nrm_sq
        return lower_margin, upper_margin
    nrm = norm(combo, t.kind)
    lower_margin = nrm - floor * peak
    upper_margin = d0_upper * peak - nrm
    return lower_margin, upper_margin


# ---------------------------------------------------------------------------
# almost isometric refinement


def refine_almost_isometric(
    expr: SetExpr,
    epsilon: ScalarLike,
    strategy: SearchStrategy,
    N_max: int,
    kind: NormKind,
    seed: int = 0,
) -> SetExpr:
    """A symmetrization whose delta_0 is within (1+epsilon) of the limit index.

    Searches witness lists of growing length until the certified
    delta_0 upper bound meets (1+epsilon) times the certified limit
    lower bound; the result is the flattened symmetrized set, ready for
    extraction. Raises :class:`NotFound` with the best ratio achieved
    when the search exhausts.
    """
    eps = as_scalar(epsilon)
    if eps <= 0:
        raise InvalidInput("epsilon must be positive")
    low = delta_lower(expr, 1, kind).lower_certificate
    if low.unconditional_value <= 0 or not low.uniform:
        raise InvalidInput("refinement needs a positive unconditional lower certificate")
    factor = (1 + eps) * (1 + eps) if kind is NormKind.EUCLID else (1 + eps)
    target = factor * low.value
    best = None
    for n in range(1, N_max + 1):
        up = delta_upper(expr, n, strategy, kind, seed=seed)
        upper = up.bound.upper
        if upper is None:
            continue
        ratio = upper / low.value
        if best is None or ratio < best[0]:
            best = (ratio, up)
        if upper <= target:
            return symmetrize(expr, up.upper_witnesses)
    raise NotFound(
        f"no witness list within N_max={N_max} met the ratio target",
        best=None if best is None else {
            "ratio": format_scalar(best[0]),
            "witnesses": [w.to_json() for w in best[1].upper_witnesses],
        },
    )


# ---------------------------------------------------------------------------
# dyadic trees


@dataclass
class EpsTree:
    """Heap-shaped point system with exact midpoint law.

    ``nodes[k]`` holds node k+1 in heap numbering: node n has children
    2n and 2n+1. ``sep`` is the exact minimum sibling separation in the
    carried norm convention.
    """

    nodes: tuple[SparseVec, ...]
    epsilon: Fraction
    sep: Fraction
    kind: NormKind

    def node(self, n: int) -> SparseVec:
        return self.nodes[n - 1]

    @property
    def depth(self) -> int:
        return (len(self.nodes) + 1).bit_length() - 1

    @property
    def internal_count(self) -> int:
        return (len(self.nodes) + 1) // 2 - 1

    def to_json(self) -> dict:
        return {
            "nodes": [v.to_json() for v in self.nodes],
            "epsilon": format_scalar(self.epsilon),
            "sep": format_scalar(self.sep),
            "norm": self.kind.value,
        }


def build_eps_tree(
    expr: SetExpr,
    epsilon: ScalarLike,
    depth: int,
    kind: NormKind,
    x0: Optional[SparseVec] = None,
) -> EpsTree:
    """Grow a dyadic tree of the given depth (levels) inside the set.

    Node n splits along a free direction u of norm at least epsilon:
    children are x_n - u and x_n + u, so the midpoint law is exact and
    siblings are at least 2*epsilon apart. Raises :class:`TreeStalled`
    at the first node without such a direction.
    """
    eps = as_scalar(epsilon)
    if eps <= 0:
        raise InvalidInput("epsilon must be positive")
    if depth < 1:
        raise InvalidInput("depth must be at least 1")
    total = 2 ** depth - 1
    internal = 2 ** (depth - 1) - 1
    arr: list[Optional[SparseVec]] = [None] * (total + 1)
    root = _default_start(expr) if x0 is None else x0
    if not contains(expr, root):
        raise WitnessNotMember("tree root is not a member of the set")
    arr[1] = root
    threshold = as_length(eps, kind)
    for n in range(1, internal + 1):
        u = free_direction(expr, [arr[n]], kind)
        if u is None or norm(u, kind) < threshold:
            partial = tuple(v for v in arr[1:] if v is not None)
            raise TreeStalled(n, partial)
        arr[2 * n] = arr[n] - u
        arr[2 * n + 1] = arr[n] + u
    if internal:
        sep = min(
            norm(arr[2 * n + 1] - arr[2 * n], kind) for n in range(1, internal + 1)
        )
    else:
        sep = Fraction(0)
    return EpsTree(nodes=tuple(arr[1:]), epsilon=eps, sep=sep, kind=kind)


# ---------------------------------------------------------------------------
# one-sided sequences


def one_sided_sequence(
    expr: SetExpr,
    epsilon: ScalarLike,
    steps: int,
    kind: NormKind,
    x0: Optional[SparseVec] = None,
) -> list[SparseVec]:
    """Vectors of norm >= epsilon whose sign sums stay in the difference set.

    Growth keeps a doubling family inside the set: each new vector
    translates the whole family back into the set. All sign patterns
    are verified against the difference set (exactly when it has a
    closed form) for up to 16 steps, sampled beyond.
    """
    eps = as_scalar(epsilon)
    if eps <= 0:
        raise InvalidInput("epsilon must be positive")
    if steps < 1:
        raise InvalidInput("steps must be at least 1")
    start = _default_start(expr) if x0 is None else x0
    if not contains(expr, start):
        raise WitnessNotMember("starting point is not a member of the set")
    family: list[SparseVec] = [start]
    out: list[SparseVec] = []
    threshold = as_length(eps, kind)
    for n in range(1, steps + 1):
        d = _fat_direction(reduced(expr), family, threshold, kind)
        if d is None:
            raise SequenceStalled(n, out)
        for member in family:
            if not contains(expr, member + d):
                raise SymdexError("one-sided direction failed its membership replay")
        out.append(d)
        family = sorted(set(family) | {m + d for m in family}, key=lambda v: v.sort_key())

    _verify_sign_sums(expr, out, kind)
    return out


def _fat_direction(
    flat: SetExpr, family: list[SparseVec], threshold: Fraction, kind: NormKind
) -> Optional[SparseVec]:
    """A direction d with member + d in the set for the whole family."""
    if isinstance(flat, Box):
        if flat.default_radius == 0:
            return None
        floor = flat.max_override_coord
        for member in family:
            floor = max(floor, member.max_support)
        d = unit(floor + 1, flat.default_radius)
        return d if norm(d, kind) >= threshold else None
    if isinstance(flat, FinitePoints):
        pool = set(flat.points)
        best = None
        best_key = None
        for p in flat.points:
            d = p - family[0]
            if d.is_zero or norm(d, kind) < threshold:
                continue
            if all((m + d) in pool for m in family):
                key = (-norm(d, kind), d.sort_key())
                if best_key is None or key < best_key:
                    best, best_key = d, key
        return best
    from .sets import SignSums

    if isinstance(flat, SignSums):
        used: set[int] = set()
        for member in family:
            used |= set(member.support)
        for t in flat.terms:
            if t.is_zero or any(i in used for i in t.support):
                continue
            if norm(t, kind) < threshold:
                continue
            if all(contains(flat, m + t) for m in family):
                return t
        return None
    return None


def _verify_sign_sums(expr: SetExpr, xs: list[SparseVec], kind: NormKind) -> None:
    from itertools import product as _product

    diff = difference_set(expr)
    cap = diameter(expr, kind).upper if diff is None else None
    patterns = _product((1, -1), repeat=len(xs)) if len(xs) <= 16 else None
    if patterns is None:
        rng = random.Random(7)
        patterns = (
            tuple(rng.choice((1, -1)) for _ in xs) for _ in range(4096)
        )
    for signs in patterns:
        running = ZERO
        for sign, x in zip(signs, xs):
            running = running + x.scale(sign)
            if diff is not None:
                if not contains(diff, running):
                    raise SymdexError("a partial sign sum left the difference set")
            elif cap is not None and norm(running, kind) > cap:
                raise SymdexError("a partial sign sum exceeded the diameter bound")


# ---------------------------------------------------------------------------
# extreme points


def eps_extreme(
    expr: SetExpr, x: SparseVec, epsilon: ScalarLike, kind: NormKind, seed: int = 0
) -> bool:
    """Whether the symmetrized set at x has diameter below 2*epsilon."""
    eps = as_scalar(epsilon)
    if eps <= 0:
        raise InvalidInput("epsilon must be positive")
    if not contains(expr, x):
        raise WitnessNotMember("the point is not a member of the set")
    bound = diameter(symmetrize(expr, [x]), kind, seed=seed)
    threshold = as_length(2 * eps, kind)
    if bound.upper is not None and bound.upper < threshold:
        return True
    if bound.lower is not None and bound.lower >= threshold:
        return False
    raise Inconclusive(
        f"diameter interval [{bound.lower}, {bound.upper}] straddles {threshold}"
    )


# -- exact arithmetic in Q[sqrt(s)] for the segment analysis ----------------


@dataclass(frozen=True)
class _Surd:
    """Value a + b*sqrt(s) with rational a, b and positive rational s."""

    a: Fraction
    b: Fraction
    s: Fraction


_Value = Fraction | _Surd


def _sign(q: Fraction) -> int:
    return (q > 0) - (q < 0)


def _surd_sign(a: Fraction, b: Fraction, s: Fraction) -> int:
    if b == 0:
        return _sign(a)
    if a == 0:
        return _sign(b)
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    lhs = a * a
    rhs = b * b * s
    if lhs == rhs:
        return 0
    return _sign(a) if lhs > rhs else _sign(b)


def _value_cmp_rational(v: _Value, r: Fraction) -> int:
    if isinstance(v, Fraction):
        return _sign(v - r)
    return _surd_sign(v.a - r, v.b, v.s)


def _value_cmp(v: _Value, w: _Value) -> int:
    if isinstance(v, Fraction) and isinstance(w, Fraction):
        return _sign(v - w)
    if isinstance(v, Fraction):
        return -_value_cmp_rational(w, v)
    if isinstance(w, Fraction):
        return _value_cmp_rational(v, w)
    if v.s == w.s:
        return _surd_sign(v.a - w.a, v.b - w.b, v.s)
    # sign of (v.a - w.a + v.b sqrt(s1)) - w.b sqrt(s2), two squarings
    sa = _surd_sign(v.a - w.a, v.b, v.s)
    sb = _sign(w.b)
    if sa == 0 and sb == 0:
        return 0
    if sa >= 0 and sb <= 0:
        return 1
    if sa <= 0 and sb >= 0:
        return -1
    u = v.a - w.a
    asq_rat = u * u + v.b * v.b * v.s - w.b * w.b * w.s
    asq_surd = 2 * u * v.b
    c = _surd_sign(asq_rat, asq_surd, v.s)
    return c if sa > 0 else -c


def _sqrt_upper(s: Fraction) -> Fraction:
    """A rational upper bound on sqrt(s)."""
    n, d = s.numerator, s.denominator
    return Fraction(isqrt(n * d) + 1, d)


def _make_value(a: Fraction, b: Fraction, s: Fraction) -> _Value:
    """a + b*sqrt(s), simplified to a rational when it is one."""
    if b == 0:
        return a
    rn, rd = isqrt(s.numerator), isqrt(s.denominator)
    if rn * rn == s.numerator and rd * rd == s.denominator:
        return a + b * Fraction(rn, rd)
    return _Surd(a, b, s)


def _value_lower_rational(v: _Value, iterations: int = 200) -> Fraction:
    """A certified rational lower bound of a nonnegative value."""
    if isinstance(v, Fraction):
        return v
    if _value_cmp_rational(v, Fraction(0)) <= 0:
        return Fraction(0)
    hi = v.a + abs(v.b) * _sqrt_upper(v.s)
    lo = Fraction(0)
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if _value_cmp_rational(v, mid) > 0:
            lo = mid
        else:
            hi = mid
        if lo > 0 and (hi - lo) < Fraction(1, 10 ** 12):
            break
    return lo


def _segment_portion_distance(
    x: SparseVec, a1: SparseVec, a2: SparseVec, eps: Fraction, kind: NormKind
) -> Optional[_Value]:
    """Distance from x to the middle portion of the segment [a1, a2].

    The middle portion keeps the points at distance >= eps from both
    endpoints; None when it is empty. The result is in the carried norm
    convention; Euclidean boundary values live in Q[sqrt(s)].
    """
    m = a1 - a2
    if m.is_zero:
        return None
    c = x - a2  # distance target: ||c - lambda*m||
    if kind is NormKind.EUCLID:
        a_coef = norm(m, kind)  # squared length
        if 4 * eps * eps > a_coef:
            return None
        b_coef = dual_pair(c, m)
        c_coef = norm(c, kind)
        lam_star = b_coef / a_coef
        above_lo = lam_star > 0 and lam_star * lam_star * a_coef >= eps * eps
        below_hi = (1 - lam_star) > 0 and (1 - lam_star) ** 2 * a_coef >= eps * eps
        if above_lo and below_hi:
            return c_coef - b_coef * b_coef / a_coef
        if not above_lo:
            return _make_value(c_coef + eps * eps, -2 * b_coef * eps / a_coef, a_coef)
        return _make_value(
            c_coef - 2 * b_coef + a_coef + eps * eps,
            2 * eps * (b_coef - a_coef) / a_coef,
            a_coef,
        )
    length = norm(m, kind)
    if length < 2 * eps:
        return None
    lo = eps / length
    hi = 1 - lo
    coords = sorted(set(c.support) | set(m.support))
    candidates = {lo, hi}
    for i in coords:
        mi = m.get(i)
        if mi != 0:
            candidates.add(c.get(i) / mi)
    if kind is NormKind.SUP:
        for i, j in combinations(coords, 2):
            ci, cj = c.get(i), c.get(j)
            mi, mj = m.get(i), m.get(j)
            if mi - mj != 0:
                candidates.add((ci - cj) / (mi - mj))
            if mi + mj != 0:
                candidates.add((ci + cj) / (mi + mj))
    best = None
    for lam in sorted(candidates):
        if lam < lo or lam > hi:
            continue
        value = norm(c - m.scale(lam), kind)
        if best is None or value < best:
            best = value
    return best


def eps_strong_extreme(
    expr: FinitePoints, x: SparseVec, epsilon: ScalarLike, kind: NormKind
) -> tuple[bool, Fraction]:
    """Segment-avoidance test with the largest admissible closeness bound.

    Decides whether some delta > 0 keeps every near-x segment point
    within epsilon of one of its endpoints, by exact minimization of the
    distance from x to each pair's middle segment portion. The returned
    delta is that minimum (a certified rational lower bound of it when
    the Euclidean minimum is irrational); (True, 1) when no pair has a
    middle portion at all.
    """
    eps = as_scalar(epsilon)
    if eps <= 0:
        raise InvalidInput("epsilon must be positive")
    if not isinstance(expr, FinitePoints):
        raise InvalidInput("strong extreme analysis needs a finite point set")
    if not contains(expr, x):
        raise WitnessNotMember("the point is not a member of the set")
    values: list[_Value] = []
    for a1, a2 in combinations(expr.points, 2):
        v = _segment_portion_distance(x, a1, a2, eps, kind)
        if v is not None:
            values.append(v)
    if not values:
        return True, Fraction(1)
    best = values[0]
    for v in values[1:]:
        if _value_cmp(v, best) < 0:
            best = v
    if _value_cmp_rational(best, Fraction(0)) <= 0:
        return False, Fraction(0)
    return True, _value_lower_rational(best)
