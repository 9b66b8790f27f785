from fractions import Fraction as F

import pytest
from hypothesis import given

from symdex import (
    InvalidInput,
    NormKind,
    SparseVec,
    ZERO,
    as_length,
    as_scalar,
    dual_norm,
    dual_pair,
    linear_combination,
    norm,
    unit,
)
from util import norm_kinds, sparse_vecs


def test_linear_combination_cancellation():
    assert linear_combination([(1, unit(1)), (-1, unit(1))]) == ZERO


def test_linear_combination_disjoint():
    assert linear_combination([(2, unit(1)), (3, unit(2))]) == SparseVec({1: 2, 2: 3})


def test_linear_combination_scalar_multiple():
    v = SparseVec({1: 1, 2: 4})
    assert linear_combination([(F(1, 2), v)]) == SparseVec({1: F(1, 2), 2: 2})


@pytest.mark.parametrize(
    "kind,expected",
    [(NormKind.SUM, F(7)), (NormKind.SUP, F(4)), (NormKind.EUCLID, F(25))],
)
def test_norm_examples(kind, expected):
    assert norm(SparseVec({1: 3, 2: -4}), kind) == expected


def test_dual_pair_examples():
    assert dual_pair(unit(1), unit(1)) == 1
    assert dual_pair(unit(1), unit(2)) == 0
    assert dual_pair(SparseVec({1: F(1, 2), 3: -1}), SparseVec({1: 4, 3: 2})) == 0


def test_dual_norm_examples():
    f = SparseVec({1: F(1, 2), 2: F(1, 2)})
    assert dual_norm(f, NormKind.SUP) == 1
    assert dual_norm(f, NormKind.SUM) == F(1, 2)
    assert dual_norm(ZERO, NormKind.SUP) == 0


def test_canonical_form_drops_zeros_and_accumulates():
    v = SparseVec([(1, F(1, 2)), (1, F(-1, 2)), (2, 3)])
    assert v == SparseVec({2: 3})
    assert v.support == (2,)
    assert v.max_support == 2


def test_bad_coordinates_rejected():
    with pytest.raises(InvalidInput):
        SparseVec({0: 1})
    with pytest.raises(InvalidInput):
        SparseVec({-3: 1})


def test_json_roundtrip():
    v = SparseVec({1: F(1, 2), 7: -3})
    assert v.to_json() == {"1": "1/2", "7": "-3"}
    assert SparseVec.from_json(v.to_json()) == v


@given(sparse_vecs, sparse_vecs)
def test_triangle_inequality_sup_sum(u, v):
    for kind in (NormKind.SUP, NormKind.SUM):
        assert norm(u + v, kind) <= norm(u, kind) + norm(v, kind)


@given(sparse_vecs, sparse_vecs)
def test_cauchy_schwarz_squared(u, v):
    # rational-safe Euclidean triangle inequality: <u,v>^2 <= |u|^2 |v|^2
    pairing = dual_pair(u, v)
    assert pairing * pairing <= norm(u, NormKind.EUCLID) * norm(v, NormKind.EUCLID)


@given(sparse_vecs, sparse_vecs, norm_kinds)
def test_hoelder(f, v, kind):
    pairing = dual_pair(f, v)
    if kind is NormKind.EUCLID:
        assert pairing * pairing <= dual_norm(f, kind) * norm(v, kind)
    else:
        assert abs(pairing) <= dual_norm(f, kind) * norm(v, kind)


@given(sparse_vecs, sparse_vecs, sparse_vecs)
def test_linear_combination_associative_commutative(u, v, w):
    assert (u + v) + w == u + (v + w)
    assert u + v == v + u
    assert linear_combination([(1, u), (1, v)]) == u + v


@given(sparse_vecs)
def test_negation_and_scaling(v):
    assert v + (-v) == ZERO
    assert v.scale(2) == v + v
    assert v.scale(0) == ZERO


def test_as_length_squares_euclid():
    assert as_length(F(3, 2), NormKind.EUCLID) == F(9, 4)
    assert as_length(F(3, 2), NormKind.SUP) == F(3, 2)
    with pytest.raises(InvalidInput):
        as_length(F(-1), NormKind.SUP)


def test_as_scalar_parses_strings():
    assert as_scalar("1/2") == F(1, 2)
    assert as_scalar("-3") == F(-3)
    with pytest.raises(InvalidInput):
        as_scalar("seven")
