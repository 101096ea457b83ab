from fractions import Fraction

import pytest

from dglevels.errors import PresentationError, WindowTooSmall, ZeroModule
from dglevels.field import QQ, GF2
from dglevels.graded import (
    CochainComplex,
    DegreeWindow,
    GradedVectorSpace,
    amplitude,
    cohomology,
    cohomology_in_degree,
    dims_from_text,
)


def two_step(field, mat):
    space = GradedVectorSpace(field, {0: [f"a{i}" for i in range(len(mat[0]))],
                                      1: [f"b{i}" for i in range(len(mat))]})
    return CochainComplex(space, {0: mat})


def test_zero_differential_dims():
    space = GradedVectorSpace(QQ, {0: ["a"], 3: ["b"]})
    cx = CochainComplex(space, {})
    dims, reps = cohomology(cx)
    assert dims == {0: 1, 3: 1}
    assert reps[0] == [(Fraction(1),)]


def test_identity_complex_is_acyclic():
    cx = two_step(QQ, [[Fraction(1)]])
    dims, _ = cohomology(cx)
    assert dims == {}


def test_d_squared_enforced_at_construction():
    space = GradedVectorSpace(QQ, {0: ["a"], 1: ["b"], 2: ["c"]})
    with pytest.raises(PresentationError):
        CochainComplex(space, {0: [[Fraction(1)]], 1: [[Fraction(1)]]})


def test_cohomology_over_f2():
    # d(a0) = b0 + b1, d(a1) = b0 + b1: kernel a0 + a1, image rank 1.
    cx = two_step(GF2, [[1, 1], [1, 1]])
    dims, reps = cohomology(cx)
    assert dims == {0: 1, 1: 1}
    assert reps[0] == [(1, 1)]


def test_representatives_complement_coboundaries():
    # 0 -> K^2 -d-> K^2 -> 0 with rank-1 d: H^1 is 1-dimensional.
    cx = two_step(QQ, [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(0)]])
    dims, reps = cohomology(cx)
    assert dims == {0: 1, 1: 1}
    assert len(reps[1]) == 1


def test_certification_respects_truncation():
    space = GradedVectorSpace(QQ, {0: ["a"], 1: ["b"]})
    cx = CochainComplex(space, {}, truncated_above=2)
    assert cohomology_in_degree(cx, 0) == 1
    with pytest.raises(WindowTooSmall):
        cohomology_in_degree(cx, 1)
    with pytest.raises(WindowTooSmall):
        cohomology_in_degree(cx, 2)


def test_enlarging_window_is_stable():
    space = GradedVectorSpace(QQ, {0: ["a"], 4: ["b"]})
    cx = CochainComplex(space, {})
    small = cohomology(cx, DegreeWindow(0, 4))[0]
    large = cohomology(cx, DegreeWindow(-8, 12))[0]
    for n, d in small.items():
        assert large.get(n) == d


def test_basis_order_invariance():
    m1 = two_step(QQ, [[Fraction(1), Fraction(2)], [Fraction(0), Fraction(0)]])
    m2 = two_step(QQ, [[Fraction(2), Fraction(1)], [Fraction(0), Fraction(0)]])
    assert cohomology(m1)[0] == cohomology(m2)[0]


def test_amplitude_of_sphere_pattern():
    assert amplitude({0: 1, 7: 1}) == 7


def test_amplitude_molecule_grid():
    # Amplitude of the two-class pattern {-m(d-1)+l, d+l} is (m+1)d - m.
    for d in range(2, 7):
        for m in range(0, 6):
            for l in range(0, 11):
                dims = {-m * (d - 1) + l: 1, d + l: 1}
                assert amplitude(dims) == (m + 1) * d - m
    # At m = 2l - 1 this specializes to 2ld - 2l + 1.
    for d in (3, 4):
        for l in (1, 2, 3):
            m = 2 * l - 1
            assert (m + 1) * d - m == 2 * l * d - 2 * l + 1


def test_amplitude_single_degree_and_zero():
    assert amplitude({5: 2}) == 0
    with pytest.raises(ZeroModule):
        amplitude({})


def test_dims_from_text():
    assert dims_from_text("0:1,5:1,7:2") == {0: 1, 5: 1, 7: 2}
