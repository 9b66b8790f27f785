"""Shared strategies and seeded generators for the test suite."""

import random
from fractions import Fraction

import hypothesis.strategies as st

from symdex import FinitePoints, NormKind, SparseVec

ALL_NORMS = (NormKind.SUP, NormKind.SUM, NormKind.EUCLID)

small_fractions = st.fractions(min_value=-3, max_value=3, max_denominator=6)
coords = st.integers(min_value=1, max_value=5)
sparse_vecs = st.dictionaries(coords, small_fractions, max_size=4).map(SparseVec)
norm_kinds = st.sampled_from(ALL_NORMS)
finite_sets = st.lists(sparse_vecs, min_size=1, max_size=6).map(
    lambda pts: FinitePoints(tuple(pts))
)


def random_point(rng: random.Random, dim: int = 4) -> SparseVec:
    support = rng.sample(range(1, dim + 1), k=rng.randint(0, dim))
    return SparseVec(
        {i: Fraction(rng.randint(-8, 8), rng.randint(1, 4)) for i in support}
    )


def random_finite_points(
    rng: random.Random, max_points: int = 8, dim: int = 4
) -> FinitePoints:
    count = rng.randint(1, max_points)
    return FinitePoints(tuple(random_point(rng, dim) for _ in range(count)))


def as_dicts(expr: FinitePoints) -> list[dict[int, Fraction]]:
    return [dict(p.items()) for p in expr.points]
