import random
from fractions import Fraction as F

import pytest

from symdex import (
    AbsConvHull,
    Box,
    FinitePoints,
    NormKind,
    SearchStrategy,
    SeriesSpec,
    SignMode,
    SignSums,
    SparseVec,
    ZERO,
    challenge_lower,
    default_pool,
    delta0,
    delta_curve,
    delta_infinity_bounds,
    delta_lower,
    delta_upper,
    kcenter_radius,
    separation_alpha_lower,
    symmetrize,
    unit,
)
from symdex.bruteforce import brute_delta_upper, brute_delta1_zero_witness
from util import ALL_NORMS, as_dicts, random_finite_points, random_point

TRIANGLE = FinitePoints((ZERO, unit(1), unit(2)))


def exhaustive(expr):
    return SearchStrategy.exhaustive(default_pool(expr))


def test_delta0_examples():
    assert delta0(Box(F(1)), NormKind.SUP).upper == 1
    assert delta0(Box(F(1), ((1, F(2)),)), NormKind.SUP).upper == 2
    assert delta0(FinitePoints((ZERO, unit(1))), NormKind.SUP).upper == F(1, 2)


def test_delta_upper_triangle_is_zero():
    res = delta_upper(TRIANGLE, 1, exhaustive(TRIANGLE), NormKind.SUP)
    assert res.bound.upper == 0
    sym = symmetrize(TRIANGLE, res.upper_witnesses)
    assert delta0(sym, NormKind.SUP).upper == 0


def test_delta_upper_box_stays_one():
    box = Box(F(1))
    for strategy in ("exhaustive", "greedy", "beam"):
        s = SearchStrategy.parse(strategy, default_pool(box))
        res = delta_upper(box, 3, s, NormKind.SUP)
        assert res.bound.upper == 1


def test_delta_upper_hull_pins_generator():
    hull = AbsConvHull(tuple(unit(i, s) for i in range(1, 5) for s in (1, -1)))
    res = delta_upper(hull, 1, SearchStrategy.exhaustive(default_pool(hull)), NormKind.SUM)
    assert res.bound.upper == 0


def test_delta_lower_examples():
    assert delta_lower(Box(F(1)), 5, NormKind.SUP).bound.lower == 1
    assert delta_lower(Box(F(1), ((1, F(2)),)), 3, NormKind.SUP).bound.lower == 1
    assert delta_lower(TRIANGLE, 1, NormKind.SUP).bound.lower == 0
    cert = delta_lower(TRIANGLE, 1, NormKind.SUP).lower_certificate
    assert cert.kind == "finite_extreme"  # certified zero, not unknown


def test_delta_lower_challenge_replay():
    box = Box(F(1))
    cert = delta_lower(box, 2, NormKind.SUP).lower_certificate
    witnesses = [unit(1, F(1, 2)), SparseVec({2: F(-1, 3), 5: 1})]
    d = challenge_lower(cert, box, witnesses, NormKind.SUP)
    assert d is not None


def test_delta_curve_box_with_override():
    box = Box(F(1), ((1, F(2)),))
    curve = delta_curve(box, 3, exhaustive(box), NormKind.SUP)
    values = [(r.bound.lower, r.bound.upper) for r in curve]
    assert values == [(2, 2), (1, 1), (1, 1), (1, 1)]


def test_delta_curve_triangle():
    curve = delta_curve(TRIANGLE, 2, exhaustive(TRIANGLE), NormKind.SUP)
    assert (curve[0].bound.lower, curve[0].bound.upper) == (F(1, 2), F(1, 2))
    assert curve[1].bound.upper == 0
    assert curve[2].bound.upper == 0


def test_delta_curve_plain_box_all_ones():
    box = Box(F(1))
    curve = delta_curve(box, 4, exhaustive(box), NormKind.SUP)
    assert all(r.bound.lower == 1 and r.bound.upper == 1 for r in curve)


def test_delta_infinity_examples():
    box = Box(F(1))
    bound = delta_infinity_bounds(box, 4, exhaustive(box), NormKind.SUP)
    assert (bound.lower, bound.upper) == (1, 1)
    tri = delta_infinity_bounds(TRIANGLE, 2, exhaustive(TRIANGLE), NormKind.SUP)
    assert (tri.lower, tri.upper) == (0, 0)
    over = Box(F(1), ((1, F(2)),))
    b2 = delta_infinity_bounds(over, 2, exhaustive(over), NormKind.SUP)
    assert (b2.lower, b2.upper) == (1, 1)


def test_curve_monotone_uppers_random_sets():
    rng = random.Random(11)
    for _ in range(10):
        pts = random_finite_points(rng, max_points=6, dim=3)
        for kind in ALL_NORMS:
            curve = delta_curve(pts, 3, exhaustive(pts), kind, seed=3)
            uppers = [r.bound.upper for r in curve]
            assert all(a >= b for a, b in zip(uppers, uppers[1:]))
            for r in curve:
                if r.bound.lower is not None and r.bound.upper is not None:
                    assert r.bound.lower <= r.bound.upper


def test_exhaustive_matches_brute_oracle():
    rng = random.Random(23)
    for _ in range(25):
        pts = random_finite_points(rng, max_points=6, dim=3)
        dicts = as_dicts(pts)
        for kind in ALL_NORMS:
            for n in (1, 2, 3):
                ours = delta_upper(pts, n, exhaustive(pts), kind).bound.upper
                assert ours == brute_delta_upper(dicts, n, kind)


def test_delta1_zero_on_every_finite_set():
    rng = random.Random(37)
    for _ in range(40):
        pts = random_finite_points(rng)
        for kind in ALL_NORMS:
            res = delta_upper(pts, 1, exhaustive(pts), kind)
            assert res.bound.upper == 0
            assert brute_delta1_zero_witness(as_dicts(pts), kind) is not None


def test_kcenter_examples():
    pts = [ZERO, unit(1), unit(1, 2)]
    bound = kcenter_radius(pts, 1, True, NormKind.SUP)
    assert bound.exact and bound.upper == 1
    assert kcenter_radius(pts, 3, True, NormKind.SUP).upper == 0
    quad = [unit(1), -unit(1), unit(2), -unit(2)]
    assert kcenter_radius(quad, 2, True, NormKind.SUP).upper == 1


def test_kcenter_greedy_interval():
    pts = [ZERO, unit(1), unit(1, 2), unit(2, 3)]
    bound = kcenter_radius(pts, 2, False, NormKind.SUP)
    assert bound.lower == bound.upper / 2
    exact = kcenter_radius(pts, 2, True, NormKind.SUP)
    assert bound.lower <= exact.upper <= bound.upper


def test_separation_examples():
    bound = separation_alpha_lower(Box(F(1)), 5, NormKind.SUP)
    assert bound.lower == 1
    family = bound.lower_witness["family"]
    assert len(family) == 5
    two = separation_alpha_lower(FinitePoints((ZERO, unit(1))), 2, NormKind.SUP)
    assert two.lower == F(1, 2)
    assert separation_alpha_lower(Box(F(1)), 1, NormKind.SUP).lower == 0


def test_separation_consistency_with_index_floor():
    # covering obstruction of a symmetrized box is never below the
    # fresh-coordinate floor of the doubled witness count
    rng = random.Random(4)
    box = Box(F(1))
    for _ in range(6):
        n = rng.randint(1, 4)
        ws = []
        for _ in range(n):
            v = random_point(rng, dim=3)
            peak = max((abs(x) for _, x in v.items()), default=F(0))
            ws.append(v if peak <= 1 else v.scale(F(1, 2) / peak))
        sym = symmetrize(box, ws)
        alpha = separation_alpha_lower(sym, 5, NormKind.SUP)
        floor = delta_lower(box, 2 * n, NormKind.SUP)
        assert alpha.lower >= floor.bound.lower == 1


def test_sign_sum_lower_certificate():
    series = SeriesSpec(tuple(unit(n) for n in range(1, 9)), NormKind.SUP, "canonical")
    expr = SignSums(series, SignMode.SUBSETS, 8)
    res = delta_lower(expr, 3, NormKind.SUP)
    assert res.bound.lower == 1
    assert res.lower_certificate.kind == "fresh_series_index"


def test_sign_sum_curve_downgrades_conditional_floor():
    # a witness using the whole horizon collapses the finite model, so the
    # curve may not carry the fresh-index floor unconditionally
    series = SeriesSpec(tuple(unit(n) for n in range(1, 5)), NormKind.SUP, "canonical")
    expr = SignSums(series, SignMode.SUBSETS, 4)
    curve = delta_curve(expr, 1, exhaustive(expr), NormKind.SUP)
    assert curve[1].bound.upper == 0  # full-prefix witness pins everything
    assert curve[1].bound.lower == 0
    cert = curve[1].lower_certificate
    assert cert.conditional and cert.value == 1


def test_greedy_and_beam_never_beat_exhaustive():
    rng = random.Random(77)
    for _ in range(10):
        pts = random_finite_points(rng, max_points=6, dim=3)
        pool = pts.points
        for kind in ALL_NORMS:
            exact = delta_upper(pts, 2, SearchStrategy.exhaustive(pool), kind).bound.upper
            greedy = delta_upper(pts, 2, SearchStrategy.greedy(pool, restarts=2), kind).bound.upper
            beam = delta_upper(pts, 2, SearchStrategy.beam(pool, width=3), kind).bound.upper
            assert greedy >= exact and beam >= exact


def test_sandwich_property():
    rng = random.Random(123)
    for _ in range(10):
        pts = random_finite_points(rng, max_points=5, dim=3)
        for kind in ALL_NORMS:
            for n in (1, 2):
                low = delta_lower(pts, n, kind).lower_certificate.unconditional_value
                up = delta_upper(pts, n, SearchStrategy.exhaustive(pts.points), kind).bound.upper
                assert low <= up
    box = Box(F(1))
    for n in (1, 3):
        low = delta_lower(box, n, NormKind.SUP).lower_certificate.unconditional_value
        up = delta_upper(box, n, exhaustive(box), NormKind.SUP).bound.upper
        assert low <= up


def test_kcenter_budget_exceeded():
    from symdex import BudgetExceeded

    pts = [unit(i) for i in range(1, 12)]
    with pytest.raises(BudgetExceeded):
        kcenter_radius(pts, 5, True, NormKind.SUP, budget=10)


def test_kcenter_greedy_within_factor_two():
    rng = random.Random(45)
    for _ in range(15):
        pts = [random_point(rng, dim=3) for _ in range(rng.randint(3, 7))]
        for kind in ALL_NORMS:
            k = rng.randint(1, 2)
            greedy = kcenter_radius(pts, k, False, kind)
            exact = kcenter_radius(pts, k, True, kind)
            assert greedy.lower <= exact.upper <= greedy.upper
