"""Acceptance suite: one test per release criterion, exact tolerances.

Each test prints a single PASS line (run with `pytest -s` to see them).
Tolerances are zero unless a criterion states otherwise; runtime caps
are asserted with a monotonic clock.
"""

import json
import random
import time
from fractions import Fraction as F

import pytest

from symdex import (
    Box,
    NormKind,
    NotAchievable,
    SearchStrategy,
    SeriesSpec,
    brute_tail_sup,
    build_eps_tree,
    default_pool,
    delta_lower,
    delta_curve,
    delta_upper,
    eps_extreme,
    eps_strong_extreme,
    extract_c0_sequence,
    norm,
    refine_almost_isometric,
    separation_alpha_lower,
    symmetrize,
    unconditional_tail_bound,
    unit,
    verify_basis_inequality,
)
from symdex.bruteforce import brute_delta_upper
from symdex.cli import EXIT_OK, main, verify_replay
from util import ALL_NORMS, as_dicts, random_finite_points, random_point

UNIT_BOX = Box(F(1))
OVERRIDE_BOX = Box(F(1), ((1, F(2)),))


def _seeded_coefficients(count, length, seed=2024):
    rng = random.Random(seed)
    return [
        [F(rng.randint(-1000, 1000), rng.randint(1, 1000)) for _ in range(length)]
        for _ in range(count)
    ]


def _criterion_sets(seed=515, count=200):
    rng = random.Random(seed)
    return [random_finite_points(rng, max_points=8, dim=4) for _ in range(count)]


def test_criterion_1_basis_inequality_reproduction():
    start = time.monotonic()
    transcript = extract_c0_sequence(UNIT_BOX, F(1, 10), 4, NormKind.SUP)
    for coeffs in _seeded_coefficients(1000, 4):
        lower_margin, upper_margin = verify_basis_inequality(transcript, coeffs)
        assert lower_margin >= 0
        assert upper_margin == 0
    elapsed = time.monotonic() - start
    assert elapsed < 5.0
    print(f"\n[criterion 1] PASS basis inequality: 1000 vectors, {elapsed:.2f}s")


def test_criterion_2_characterization_dichotomy():
    start = time.monotonic()
    curve = delta_curve(
        UNIT_BOX, 8, SearchStrategy.exhaustive(default_pool(UNIT_BOX)), NormKind.SUP
    )
    assert len(curve) == 9
    for res in curve:
        assert res.bound.lower == 1 and res.bound.upper == 1
    for points in _criterion_sets():
        for kind in ALL_NORMS:
            res = delta_upper(points, 1, SearchStrategy.exhaustive(points.points), kind)
            assert res.bound.upper == 0
    elapsed = time.monotonic() - start
    assert elapsed < 60.0
    print(f"\n[criterion 2] PASS dichotomy: box curve all ones, 200 finite sets, {elapsed:.2f}s")


def test_criterion_3_oracle_equivalence():
    sets = _criterion_sets()
    for points in sets:
        dicts = as_dicts(points)
        for kind in ALL_NORMS:
            ours = delta_upper(
                points, 1, SearchStrategy.exhaustive(points.points), kind
            ).bound.upper
            assert ours == brute_delta_upper(dicts, 1, kind)
    for points in sets[:30]:
        dicts = as_dicts(points)
        for kind in ALL_NORMS:
            for n in (2, 3):
                ours = delta_upper(
                    points, n, SearchStrategy.exhaustive(points.points), kind
                ).bound.upper
                assert ours == brute_delta_upper(dicts, n, kind)
    print("\n[criterion 3] PASS oracle equivalence on all criterion-2 sets")


def test_criterion_4_almost_isometric_refinement():
    strategy = SearchStrategy.exhaustive(default_pool(OVERRIDE_BOX))
    refined = refine_almost_isometric(OVERRIDE_BOX, F(1, 10), strategy, 4, NormKind.SUP)
    assert refined == Box(F(1), ((1, F(0)),))
    limit_lower = delta_lower(OVERRIDE_BOX, 8, NormKind.SUP).bound.lower
    from symdex import delta0

    assert delta0(refined, NormKind.SUP).upper == 1 == limit_lower

    base_transcript = extract_c0_sequence(UNIT_BOX, F(1, 10), 4, NormKind.SUP)
    refined_transcript = extract_c0_sequence(refined, F(1, 10), 4, NormKind.SUP)
    for coeffs in _seeded_coefficients(200, 4):
        assert verify_basis_inequality(refined_transcript, coeffs) == verify_basis_inequality(
            base_transcript, coeffs
        )
    print("\n[criterion 4] PASS refinement: ratio 1 and matching extraction margins")


def test_criterion_5_tail_bound_harness():
    start = time.monotonic()
    horizon = 10
    geometric = SeriesSpec(
        tuple(unit(n, F(1, 2 ** n)) for n in range(1, horizon + 1)),
        NormKind.SUM,
        "geometric",
    )
    tail = unconditional_tail_bound(geometric, F(1, 8))
    assert tail.M == 3
    tail_sup = brute_tail_sup(geometric, tail.M + 1, horizon)
    assert tail_sup == F(1, 2 ** 3) - F(1, 2 ** horizon)
    assert tail_sup <= F(1, 8)

    canonical = SeriesSpec(
        tuple(unit(n) for n in range(1, horizon + 1)), NormKind.SUP, "canonical"
    )
    with pytest.raises(NotAchievable) as exc:
        unconditional_tail_bound(canonical, F(1, 2))
    cert = exc.value.lower_certificate
    assert cert is not None and cert.kind == "fresh_series_index" and cert.value >= 1
    elapsed = time.monotonic() - start
    assert elapsed < 10.0
    print(f"\n[criterion 5] PASS tail harness: M=3 and certified refusal, {elapsed:.2f}s")


def test_criterion_6_tree_laws():
    tree = build_eps_tree(UNIT_BOX, 1, 5, NormKind.SUP)
    assert tree.internal_count == 15
    for n in range(1, 16):
        left, right = tree.node(2 * n), tree.node(2 * n + 1)
        assert (left + right).scale(F(1, 2)) == tree.node(n)
        assert norm(right - left, NormKind.SUP) == 2
    assert tree.sep == 2
    print("\n[criterion 6] PASS tree laws: 15 exact midpoints, separation 2")


def test_criterion_7_extreme_point_lattice():
    rng = random.Random(909)
    eps_grid = [F(1, 4), F(1, 2), F(1)]
    tiny = F(1, 1000000)
    for points in _criterion_sets():
        for kind in ALL_NORMS:
            eps = eps_grid[rng.randrange(len(eps_grid))]
            for x in points.points:
                strong, _ = eps_strong_extreme(points, x, eps, kind)
                if strong:
                    assert eps_extreme(points, x, eps, kind)
            assert any(eps_extreme(points, x, tiny, kind) for x in points.points)
    print("\n[criterion 7] PASS extreme lattice: strong implies plain, zero counterexamples")


def test_criterion_8_covering_bound_consistency():
    rng = random.Random(321)
    for _ in range(20):
        n = rng.randint(1, 4)
        witnesses = []
        for _ in range(n):
            v = random_point(rng, dim=3)
            peak = max((abs(x) for _, x in v.items()), default=F(0))
            witnesses.append(v if peak <= 1 else v.scale(F(1, 2) / peak))
        sym = symmetrize(UNIT_BOX, witnesses)
        alpha = separation_alpha_lower(sym, 5, NormKind.SUP)
        floor = delta_lower(UNIT_BOX, 2 * n, NormKind.SUP).bound.lower
        assert alpha.lower >= floor
        assert alpha.lower == 1 and floor == 1
    print("\n[criterion 8] PASS covering consistency: both sides exactly 1 on 20 witness lists")


def test_criterion_9_cli_determinism(tmp_path):
    box_override = {"type": "box", "default_radius": "1", "overrides": {"1": "2"}}
    plain_box = {"type": "box", "default_radius": "1", "overrides": {}}
    geometric = {
        "norm": "sum",
        "label": "geometric",
        "terms": [{str(n): f"1/{2 ** n}"} for n in range(1, 11)],
    }
    canonical = {
        "norm": "sup",
        "label": "canonical",
        "terms": [{str(n): "1"} for n in range(1, 11)],
    }
    extreme_envelope = {
        "set": {"type": "finite", "points": [{}, {"1": "1"}, {"2": "1"}]},
        "norm": "sup",
        "point": {"1": "1"},
    }
    inputs = {
        "box_override.json": box_override,
        "plain_box.json": plain_box,
        "geometric.json": geometric,
        "canonical.json": canonical,
        "extreme.json": extreme_envelope,
    }
    for name, obj in inputs.items():
        (tmp_path / name).write_text(json.dumps(obj))

    requests = [
        ["delta", "--in", str(tmp_path / "box_override.json"), "--format", "csv", "--n", "3"],
        ["extract", "--in", str(tmp_path / "plain_box.json"), "--epsilon", "1/10", "--n", "4"],
        ["refine", "--in", str(tmp_path / "box_override.json"), "--epsilon", "1/10", "--n", "4"],
        ["tree", "--in", str(tmp_path / "plain_box.json"), "--epsilon", "1", "--depth", "5"],
        ["series", "--in", str(tmp_path / "geometric.json"), "--epsilon", "1/8"],
        ["series", "--in", str(tmp_path / "canonical.json"), "--epsilon", "1/2"],
        ["extreme", "--in", str(tmp_path / "extreme.json"), "--epsilon", "1/1000000"],
        ["one_sided", "--in", str(tmp_path / "plain_box.json"), "--epsilon", "1", "--n", "4"],
    ]
    for pos, argv in enumerate(requests):
        first = tmp_path / f"first_{pos}.out"
        second = tmp_path / f"second_{pos}.out"
        assert main(argv + ["--out", str(first), "--seed", "0"]) == EXIT_OK
        assert main(argv + ["--out", str(second), "--seed", "0"]) == EXIT_OK
        assert first.read_bytes() == second.read_bytes()
        if "csv" not in argv:
            report = json.loads(first.read_text())
            assert verify_replay(report) == []
            verdict = tmp_path / f"verdict_{pos}.json"
            assert main(["oracle", "--in", str(first), "--out", str(verdict)]) == EXIT_OK
    print("\n[criterion 9] PASS determinism: byte-identical reports, oracle replays clean")
