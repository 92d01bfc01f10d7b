from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masslin.linalg import (
    LinearSolution,
    det,
    dot,
    identity,
    in_row_span,
    integer_kernel_basis,
    invert,
    mat_mul,
    mat_vec,
    nullspace,
    primitive,
    rank,
    rref,
    solve_linear,
    solve_square,
    transpose,
    unimodular_inverse,
    vec,
)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=12)


def small_matrix(rows, cols):
    return st.lists(
        st.lists(rationals, min_size=cols, max_size=cols),
        min_size=rows,
        max_size=rows,
    )


class TestPrimitive:
    def test_divides_by_gcd(self):
        assert primitive((2, 4, -6)) == (1, 2, -3)

    def test_single_axis(self):
        assert primitive((0, 0, 5)) == (0, 0, 1)

    def test_already_primitive(self):
        assert primitive((1, 0, 1, -1)) == (1, 0, 1, -1)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            primitive((0, 0, 0))

    def test_non_integer_rejected(self):
        with pytest.raises(ValueError):
            primitive((Fraction(1, 2), 1))


class TestRank:
    def test_identity(self):
        assert rank(identity(3)) == 3

    def test_zero(self):
        assert rank([[0, 0], [0, 0]]) == 0

    def test_simplex_bundle_fiber_conormals(self):
        # four vectors in R^4 satisfying one relation: -e1,-e2,-e3,e1+e2+e3
        rows = [
            (-1, 0, 0, 0),
            (0, -1, 0, 0),
            (0, 0, -1, 0),
            (1, 1, 1, 0),
        ]
        assert rank(rows) == 3


class TestSolveLinear:
    def test_identity_case(self):
        sol = solve_linear(identity(2), (Fraction(1, 2), 0))
        assert sol.solution == (Fraction(1, 2), Fraction(0))
        assert sol.nullspace == ()

    def test_underdetermined(self):
        sol = solve_linear([[1, 1]], (0,))
        assert sol.solution == (Fraction(0), Fraction(0))
        assert sol.nullspace == ((Fraction(-1), Fraction(1)),)

    def test_infeasible(self):
        assert solve_linear([[1, 1], [1, 1]], (0, 1)) is None

    def test_codimension_one_span(self):
        # conormals of a 4-d example with facets 1,2 removed: their span
        # has codimension 1, i.e. the transpose kernel is 1-dimensional
        rows = [
            (0, 0, -1, 0),
            (1, 1, 1, 0),
            (0, 0, 0, -1),
            (-1, -1, 0, 1),
        ]
        assert rank(rows) == 3
        assert len(nullspace(transpose(rows))) == 1

    @given(small_matrix(3, 3), st.lists(rationals, min_size=3, max_size=3))
    @settings(max_examples=60)
    def test_round_trip(self, A, b):
        sol = solve_linear(A, b)
        if sol is None:
            assert rank(A) < rank([row + [bi] for row, bi in zip(A, b)])
            return
        assert list(mat_vec(A, sol.solution)) == [Fraction(x) for x in b]
        for v in sol.nullspace:
            assert all(x == 0 for x in mat_vec(A, v))
        combined = sol.solution
        for v in sol.nullspace:
            combined = tuple(a + 2 * b_ for a, b_ in zip(combined, v))
        assert list(mat_vec(A, combined)) == [Fraction(x) for x in b]


class TestDetInvert:
    def test_det_identity(self):
        assert det(identity(4)) == 1

    def test_det_swap(self):
        assert det([[0, 1], [1, 0]]) == -1

    def test_det_singular(self):
        assert det([[1, 2], [2, 4]]) == 0

    @given(small_matrix(3, 3))
    @settings(max_examples=40)
    def test_invert_round_trip(self, A):
        inv = invert(A)
        if det(A) == 0:
            assert inv is None
        else:
            assert mat_mul(A, inv) == identity(3)

    def test_solve_square(self):
        assert solve_square([[2, 0], [0, 4]], (1, 1)) == (
            Fraction(1, 2),
            Fraction(1, 4),
        )
        assert solve_square([[1, 1], [2, 2]], (1, 2)) is None


class TestNullspace:
    def test_reduced_echelon_convention(self):
        basis = nullspace([[1, 2, 3]])
        assert basis == (
            (Fraction(-2), Fraction(1), Fraction(0)),
            (Fraction(-3), Fraction(0), Fraction(1)),
        )

    def test_empty_matrix_needs_ncols(self):
        assert nullspace([], 2) == (
            (Fraction(1), Fraction(0)),
            (Fraction(0), Fraction(1)),
        )

    @given(small_matrix(2, 4))
    @settings(max_examples=40)
    def test_dimension_formula(self, A):
        assert len(nullspace(A)) == 4 - rank(A)


class TestIntegerKernel:
    def test_simple_relation(self):
        basis = integer_kernel_basis([(1, 1, 0)], 3)
        assert len(basis) == 2
        for v in basis:
            assert v[0] + v[1] == 0

    def test_saturation(self):
        # kernel of (2, -2) over Z is generated by (1, 1), not (2, 2)
        basis = integer_kernel_basis([(2, -2)], 2)
        assert len(basis) == 1
        assert basis[0] in ((1, 1), (-1, -1))

    def test_full_rank_trivial_kernel(self):
        assert integer_kernel_basis(identity(3), 3) == []

    @given(
        st.lists(
            st.lists(st.integers(-6, 6), min_size=4, max_size=4),
            min_size=2,
            max_size=3,
        )
    )
    @settings(max_examples=60)
    def test_basis_spans_kernel(self, rows):
        basis = integer_kernel_basis(rows, 4)
        assert len(basis) == 4 - rank(rows)
        for v in basis:
            assert all(x == 0 for x in mat_vec(rows, v))
        # vectors form a lattice basis: as a matrix they have full rank
        if basis:
            assert rank(basis) == len(basis)


class TestUnimodular:
    def test_inverse_is_integer(self):
        U = [(1, 1), (0, 1)]
        assert unimodular_inverse(U) == ((1, -1), (0, 1))

    def test_singular_rejected(self):
        with pytest.raises(ValueError):
            unimodular_inverse([(1, 1), (1, 1)])


class TestSpanMembership:
    def test_in_span(self):
        assert in_row_span([(1, 0, 0), (0, 1, 0)], (3, -2, 0))

    def test_not_in_span(self):
        assert not in_row_span([(1, 0, 0), (0, 1, 0)], (0, 0, 1))


@given(rationals, rationals, rationals)
def test_field_axioms_spotcheck(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c


@given(st.lists(rationals, min_size=3, max_size=3), st.lists(rationals, min_size=3, max_size=3))
def test_dot_symmetry(u, v):
    assert dot(u, v) == dot(v, u)
