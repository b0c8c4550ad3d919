import itertools

import numpy as np
import pytest

from branekit.errors import ShapeMismatch
from branekit.twovector import (
    DimMatrix,
    TwoVectorObject,
    certificate_matrix,
    identity,
    is_equivalence,
)


def test_apply_identity_and_zero():
    v = TwoVectorObject((3, 1))
    assert identity(2).apply(v) == v
    assert DimMatrix([[0, 0], [0, 0]]).apply(v) == TwoVectorObject((0, 0))


def test_apply_example():
    v = TwoVectorObject((3, 1))
    assert DimMatrix([[1, 1], [0, 2]]).apply(v) == TwoVectorObject((4, 2))


def test_apply_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        DimMatrix([[1, 1]]).apply(TwoVectorObject((1, 2, 3)))


def test_compose_examples():
    a = DimMatrix([[1, 1], [1, 2]])
    assert identity(2).compose(a) == a
    assert a.compose(DimMatrix([[2], [1]])) == DimMatrix([[3], [4]])


def test_compose_apply_associativity():
    rng = np.random.default_rng(0)
    for _ in range(25):
        a = DimMatrix(rng.integers(0, 4, size=(3, 2)))
        b = DimMatrix(rng.integers(0, 4, size=(2, 4)))
        v = TwoVectorObject(tuple(rng.integers(0, 4, size=4)))
        assert a.compose(b).apply(v) == a.apply(b.apply(v))


def test_equivalences_n2():
    for entries in ([[1, 0], [0, 1]], [[0, 1], [1, 0]]):
        res = is_equivalence(DimMatrix(entries))
        assert res.ok
        inv = certificate_matrix(res, 2)
        assert DimMatrix(entries).compose(inv) == identity(2)
        assert inv.compose(DimMatrix(entries)) == identity(2)


def test_unimodular_but_not_equivalence():
    for k in range(1, 6):
        a = DimMatrix([[1, 1], [k - 1, k]])
        assert round(np.linalg.det(a.entries)) == 1
        res = is_equivalence(a)
        assert not res.ok
        assert "delta" in res.obstruction


def test_nonsquare_rejected():
    res = is_equivalence(DimMatrix([[1, 0, 0], [0, 1, 0]]))
    assert not res.ok and res.obstruction == "NonSquare"


def test_accepted_matrices_have_unimodular_det():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(1, 5))
        a = DimMatrix(rng.integers(0, 3, size=(n, n)))
        res = is_equivalence(a)
        if res.ok:
            assert round(abs(np.linalg.det(a.entries))) == 1


def test_exhaustive_n2_entries_up_to_3():
    # brute-force oracle: search all candidate inverses with entries <= 3
    def brute_force_invertible(m):
        for binv in itertools.product(range(4), repeat=4):
            b = np.array(binv).reshape(2, 2)
            if (m @ b == np.eye(2)).all() and (b @ m == np.eye(2)).all():
                return True
        return False

    accepted = []
    for entries in itertools.product(range(4), repeat=4):
        m = np.array(entries).reshape(2, 2)
        res = is_equivalence(DimMatrix(m))
        assert res.ok == brute_force_invertible(m), m
        if res.ok:
            accepted.append(m.tolist())
    assert sorted(accepted) == [[[0, 1], [1, 0]], [[1, 0], [0, 1]]]


def test_duplicate_column_support_obstruction():
    res = is_equivalence(DimMatrix([[1, 0], [1, 0]]))
    assert not res.ok
    assert "column 0" in res.obstruction or "delta" in res.obstruction
