"""Type algebra: table cases and the order/meet lemmas."""

import pytest
from hypothesis import given, strategies as st

from generators import all_types, hypothesis_types
from monoref.lang import (
    BOOL,
    DYN,
    INT,
    ArrowT,
    BoolC,
    CastError,
    Fst,
    IntC,
    IsZero,
    PairT,
    RefT,
    SUCC,
    ground,
    is_static,
    lesseq,
    meet,
    typeof_const,
    typeof_opr,
)

types = hypothesis_types()


def test_lesseq_table():
    assert lesseq(INT, DYN)
    assert not lesseq(DYN, INT)
    assert lesseq(RefT(INT), RefT(DYN))
    assert lesseq(DYN, DYN)
    assert lesseq(PairT(INT, DYN), PairT(DYN, DYN))
    assert not lesseq(PairT(INT, INT), ArrowT(INT, INT))
    # arrows are covariant in both positions under this order
    assert lesseq(ArrowT(INT, BOOL), ArrowT(DYN, DYN))
    assert not lesseq(ArrowT(DYN, BOOL), ArrowT(INT, BOOL))


def test_meet_table():
    assert meet(DYN, ArrowT(INT, BOOL)) == ArrowT(INT, BOOL)
    assert meet(RefT(DYN), RefT(INT)) == RefT(INT)
    assert meet(PairT(DYN, BOOL), PairT(INT, DYN)) == PairT(INT, BOOL)
    with pytest.raises(CastError):
        meet(INT, BOOL)
    with pytest.raises(CastError):
        meet(RefT(INT), ArrowT(INT, INT))
    with pytest.raises(CastError):
        meet(PairT(INT, INT), PairT(INT, BOOL))


def test_is_static_table():
    assert not is_static(DYN)
    assert is_static(ArrowT(INT, BOOL))
    assert not is_static(RefT(DYN))
    assert not is_static(PairT(INT, PairT(BOOL, DYN)))


def test_ground_table():
    assert ground(ArrowT(INT, BOOL)) == ArrowT(DYN, DYN)
    assert ground(INT) == INT
    assert ground(RefT(PairT(INT, BOOL))) == RefT(DYN)
    assert ground(DYN) == DYN
    assert ground(PairT(RefT(INT), DYN)) == PairT(DYN, DYN)


def test_typeof_const():
    assert typeof_const(IntC(4)) == INT
    assert typeof_const(BoolC(True)) == BOOL
    assert typeof_const(IntC(-3)) == INT


def test_typeof_opr():
    assert typeof_opr(SUCC) == ArrowT(INT, INT)
    assert typeof_opr(IsZero()) == ArrowT(INT, BOOL)
    assert typeof_opr(Fst(INT, BOOL)) == ArrowT(PairT(INT, BOOL), INT)


def test_reflexivity_exhaustive():
    for a in all_types(3):
        assert lesseq(a, a)


def test_transitivity_exhaustive_depth2():
    universe = all_types(2)
    for a in universe:
        for b in universe:
            if not lesseq(a, b):
                continue
            for c in universe:
                if lesseq(b, c):
                    assert lesseq(a, c)


def test_static_least_dynamic_exhaustive():
    universe = all_types(3)
    for a in universe:
        if not is_static(a):
            continue
        for b in universe:
            if lesseq(b, a):
                assert a == b


def test_meet_lemmas_exhaustive():
    universe = all_types(3)
    for i, a in enumerate(universe):
        for b in universe[i:]:
            try:
                m1 = meet(a, b)
            except CastError:
                m1 = None
            try:
                m2 = meet(b, a)
            except CastError:
                m2 = None
            assert m1 == m2  # symmetric definedness and result
            if m1 is not None:
                assert lesseq(m1, a) and lesseq(m1, b)


def test_meet_idempotent_exhaustive():
    for a in all_types(3):
        assert meet(a, a) == a


@given(types)
def test_reflexivity_random(a):
    assert lesseq(a, a)


@given(types, types, types)
def test_transitivity_random(a, b, c):
    if lesseq(a, b) and lesseq(b, c):
        assert lesseq(a, c)


@given(types, types)
def test_meet_random(a, b):
    try:
        m = meet(a, b)
    except CastError:
        with pytest.raises(CastError):
            meet(b, a)
        return
    assert meet(b, a) == m
    assert lesseq(m, a) and lesseq(m, b)


@given(types, types)
def test_static_least_dynamic_random(a, b):
    if is_static(a) and lesseq(b, a):
        assert a == b


@given(types)
def test_ground_is_upper_approximation(a):
    assert lesseq(a, ground(a))
