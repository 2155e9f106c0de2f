"""Tests for exact rational linear algebra and the exact simplex solver."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmotpoly.errors import InvalidInputError
from mmotpoly.exact import (
    LpResult,
    RationalMatrix,
    lp_solve,
    rank,
    rational,
    rational_str,
    solve_integer_columns,
    solve_square_system,
)

F = Fraction

# The 3x10 marginal-constraint matrix for three marginals on three sites,
# columns ordered [111, 222, 333, 112, 113, 122, 223, 133, 233, 123].
CONSTRAINTS_3X10 = RationalMatrix.from_rows(
    [
        [1, 0, 0, "2/3", "2/3", "1/3", 0, "1/3", 0, "1/3"],
        [0, 1, 0, "1/3", 0, "2/3", "2/3", 0, "1/3", "1/3"],
        [0, 0, 1, 0, "1/3", 0, "1/3", "2/3", "2/3", "1/3"],
    ]
)


class TestRationalParsing:
    def test_parse_forms(self):
        assert rational("3/4") == F(3, 4)
        assert rational("-7/2") == F(-7, 2)
        assert rational("5") == F(5)
        assert rational(2) == F(2)
        assert rational(F(1, 3)) == F(1, 3)

    def test_roundtrip(self):
        for q in [F(0), F(11, 16), F(-2, 3), F(4)]:
            assert rational(rational_str(q)) == q

    def test_integer_renders_without_slash(self):
        assert rational_str(F(4, 2)) == "2"
        assert rational_str(F(11, 16)) == "11/16"

    def test_bad_input(self):
        with pytest.raises(InvalidInputError):
            rational("a/b")
        with pytest.raises(InvalidInputError):
            rational("1/0")


class TestRank:
    def test_zero_matrix(self):
        assert rank(RationalMatrix.zeros(3, 4)) == 0

    def test_identity(self):
        for n in (1, 2, 5):
            assert rank(RationalMatrix.identity(n)) == n

    def test_marginal_constraint_matrix(self):
        assert rank(CONSTRAINTS_3X10) == 3

    def test_dependent_rows(self):
        m = RationalMatrix.from_rows([[1, 2], [2, 4], [0, 1]])
        assert rank(m) == 2

    @given(
        st.lists(
            st.lists(
                st.fractions(min_value=-5, max_value=5, max_denominator=6),
                min_size=3,
                max_size=3,
            ),
            min_size=1,
            max_size=4,
        )
    )
    @settings(max_examples=60, deadline=None)
    def test_rank_equals_transpose_rank(self, rows):
        m = RationalMatrix.from_rows(rows)
        assert rank(m) == rank(m.transpose())


class TestSolveSquareSystem:
    def test_identity(self):
        b = (F(1, 3), F(1, 3), F(1, 3))
        assert solve_square_system(RationalMatrix.identity(3), b) == b

    def test_t23_support_columns(self):
        # Columns of the constraint matrix supporting the plan made of 111,
        # 223 and 233 blocks; the coefficients solve to (1/3, 1/3, 1/3).
        cols = RationalMatrix.from_rows(
            [
                [1, 0, 0],
                [0, "2/3", "1/3"],
                [0, "1/3", "2/3"],
            ]
        )
        b = (F(1, 3), F(1, 3), F(1, 3))
        assert solve_square_system(cols, b) == (F(1, 3), F(1, 3), F(1, 3))

    def test_dependent_columns_rejected(self):
        m = RationalMatrix.from_rows([[1, 1], [2, 2]])
        assert solve_square_system(m, (F(1), F(2))) is None

    def test_inconsistent_tall_system(self):
        m = RationalMatrix.from_rows([[1], [1]])
        assert solve_square_system(m, (F(1), F(2))) is None

    def test_tall_consistent_system(self):
        m = RationalMatrix.from_rows([[1], [2]])
        assert solve_square_system(m, (F(1, 2), F(1))) == (F(1, 2),)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            solve_square_system(RationalMatrix.identity(2), (F(1),))

    @given(
        st.lists(
            st.lists(
                st.fractions(min_value=-4, max_value=4, max_denominator=5),
                min_size=3,
                max_size=3,
            ),
            min_size=3,
            max_size=3,
        ),
        st.lists(
            st.fractions(min_value=-4, max_value=4, max_denominator=5),
            min_size=3,
            max_size=3,
        ),
    )
    @settings(max_examples=60, deadline=None)
    def test_solution_substitutes_back(self, rows, x):
        m = RationalMatrix.from_rows(rows)
        b = tuple(sum(row[j] * x[j] for j in range(3)) for row in m.entries)
        sol = solve_square_system(m, b)
        if rank(m) == 3:
            assert sol is not None
            for i, row in enumerate(m.entries):
                assert sum(row[j] * sol[j] for j in range(3)) == b[i]
        else:
            assert sol is None

    def test_integer_fast_path_matches(self):
        cols = [(3, 0, 0), (0, 2, 1), (0, 1, 2)]
        b = [F(1, 3)] * 3
        got = solve_integer_columns(cols, b)
        ref = solve_square_system(
            RationalMatrix.from_rows([[c[r] for c in cols] for r in range(3)]), b
        )
        assert got == ref == (F(1, 9), F(1, 9), F(1, 9))


# Pairwise spring costs at mismatch 3/4 for each constraint-matrix column,
# matching the column order of CONSTRAINTS_3X10.
SPRING_COSTS_3_4 = [
    F(27, 16), F(27, 16), F(27, 16),  # one-site blocks
    F(11, 16), F(59, 16), F(11, 16), F(11, 16), F(59, 16), F(11, 16),  # two-site blocks
    F(27, 16),  # all three sites
]


class TestLpSolve:
    def test_trivial(self):
        res = lp_solve([F(1), F(0)], RationalMatrix.from_rows([[1, 1]]), [F(1)])
        assert res.status == "optimal"
        assert res.value == 0
        assert res.point == (F(0), F(1))

    def test_spring_minimum_over_plan_polytope(self):
        b = [F(1, 3)] * 3
        res = lp_solve(SPRING_COSTS_3_4, CONSTRAINTS_3X10, b)
        assert res.status == "optimal"
        assert res.value == F(11, 16)
        expected = [F(0)] * 10
        expected[3] = F(1, 2)  # the 112 block
        expected[8] = F(1, 2)  # the 233 block
        assert res.point == tuple(expected)

    def test_infeasible(self):
        res = lp_solve([F(1)], RationalMatrix.from_rows([[0]]), [F(1)])
        assert res.status == "infeasible"

    def test_unbounded_with_free_variables(self):
        res = lp_solve(
            [F(1), F(0)],
            RationalMatrix.from_rows([[1, -1]]),
            [F(0)],
            nonneg=False,
        )
        assert res.status == "unbounded"

    def test_free_variable_optimum(self):
        # min x subject to x + y = 1, y = 2 with free variables -> x = -1.
        res = lp_solve(
            [F(1), F(0)],
            RationalMatrix.from_rows([[1, 1], [0, 1]]),
            [F(1), F(2)],
            nonneg=False,
        )
        assert res.status == "optimal"
        assert res.value == F(-1)
        assert res.point == (F(-1), F(2))

    def test_redundant_rows_are_tolerated(self):
        a = RationalMatrix.from_rows([[1, 1], [2, 2]])
        res = lp_solve([F(0), F(1)], a, [F(1), F(2)])
        assert res.status == "optimal"
        assert res.value == 0

    def test_degenerate_problem_terminates(self):
        # Degenerate basic solutions (zero right-hand side) must not cycle.
        a = RationalMatrix.from_rows([[1, -1, 0], [0, 1, -1]])
        res = lp_solve([F(-1), F(0), F(2)], a, [F(0), F(0)])
        assert res.status == "optimal"
        assert res.value == 0

    def test_optimal_point_is_feasible(self):
        b = [F(1, 3)] * 3
        res = lp_solve(SPRING_COSTS_3_4, CONSTRAINTS_3X10, b)
        assert res.point is not None
        for i, row in enumerate(CONSTRAINTS_3X10.entries):
            assert sum(row[j] * res.point[j] for j in range(10)) == b[i]
        assert all(x >= 0 for x in res.point)

    @given(st.permutations(list(range(3))))
    @settings(max_examples=10, deadline=None)
    def test_value_invariant_under_row_permutation(self, perm):
        rows = [CONSTRAINTS_3X10.entries[i] for i in perm]
        b = [F(1, 3)] * 3
        res = lp_solve(SPRING_COSTS_3_4, RationalMatrix(tuple(rows)), b)
        assert res.value == F(11, 16)

    @given(
        st.lists(st.integers(min_value=0, max_value=4), min_size=6, max_size=6),
        st.lists(st.integers(min_value=0, max_value=3), min_size=3, max_size=3),
        st.lists(st.integers(min_value=-3, max_value=3), min_size=3, max_size=3),
    )
    @settings(max_examples=60, deadline=None)
    def test_random_feasible_lp_residual_zero(self, entries, x0, cost):
        a = RationalMatrix.from_rows([entries[:3], entries[3:]])
        b = [
            sum(a.entry(i, j) * x0[j] for j in range(3))
            for i in range(2)
        ]
        res = lp_solve([F(c) for c in cost], a, [F(v) for v in b])
        if res.status == "optimal":
            assert res.point is not None
            for i in range(2):
                assert sum(a.entry(i, j) * res.point[j] for j in range(3)) == b[i]
            assert all(v >= 0 for v in res.point)
            assert res.value <= sum(F(cost[j]) * x0[j] for j in range(3))
        else:
            assert res.status == "unbounded"
