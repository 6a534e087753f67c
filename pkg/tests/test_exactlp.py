"""Rational simplex on problems small enough to solve on paper."""

from fractions import Fraction

import pytest

from tollgate.exactlp import solve_lp


def test_maximize_two_variables():
    # max 3x + 2y s.t. x + y <= 4, x <= 3: optimum at (3, 1).
    res = solve_lp(
        [(3, "x"), (2, "y")],
        [
            ([(1, "x"), (1, "y")], "<=", 4),
            ([(1, "x")], "<=", 3),
        ],
    )
    assert res.status == "optimal"
    assert res.objective == Fraction(11)
    assert res.solution == {"x": Fraction(3), "y": Fraction(1)}


def test_minimize():
    # min x + y s.t. x + 2y >= 4, 3x + y >= 3: optimum at (2/5, 9/5).
    res = solve_lp(
        [(1, "x"), (1, "y")],
        [
            ([(1, "x"), (2, "y")], ">=", 4),
            ([(3, "x"), (1, "y")], ">=", 3),
        ],
        maximize=False,
    )
    assert res.status == "optimal"
    assert res.objective == Fraction(11, 5)
    assert res.solution == {"x": Fraction(2, 5), "y": Fraction(9, 5)}


def test_equality_rows():
    res = solve_lp(
        [(1, "x")],
        [
            ([(1, "x"), (1, "y")], "=", 5),
            ([(1, "y")], ">=", 2),
        ],
    )
    assert res.status == "optimal"
    assert res.objective == Fraction(3)


def test_fractional_answer_is_exact():
    # max x s.t. 3x <= 1 has the optimum exactly 1/3.
    res = solve_lp([(1, "x")], [([(3, "x")], "<=", 1)])
    assert res.objective == Fraction(1, 3)


def test_infeasible():
    res = solve_lp(
        [(1, "x")],
        [
            ([(1, "x")], "<=", 1),
            ([(1, "x")], ">=", 2),
        ],
    )
    assert res.status == "infeasible"
    assert res.objective is None


def test_unbounded():
    res = solve_lp([(1, "x")], [([(1, "y")], "<=", 1)])
    assert res.status == "unbounded"


def test_zero_solution_values_are_filled():
    res = solve_lp([(1, "x")], [([(1, "x"), (1, "y")], "<=", 2)])
    assert res.solution["y"] == 0


def test_degenerate_problem_terminates():
    # Redundant rows meeting at the same vertex must not cycle.
    res = solve_lp(
        [(1, "x"), (1, "y")],
        [
            ([(1, "x"), (1, "y")], "<=", 2),
            ([(2, "x"), (2, "y")], "<=", 4),
            ([(1, "x")], "<=", 2),
            ([(1, "y")], "<=", 2),
        ],
    )
    assert res.status == "optimal"
    assert res.objective == Fraction(2)


def test_agrees_with_float_solver_on_random_lps():
    import random

    from scipy.optimize import linprog

    rng = random.Random(7)
    for trial in range(30):
        n = rng.randint(2, 5)
        names = [f"v{i}" for i in range(n)]
        obj = [(rng.randint(-4, 6), names[i]) for i in range(n)]
        rows = []
        for _ in range(rng.randint(1, 5)):
            terms = [(rng.randint(0, 4), names[i]) for i in range(n)]
            terms = [t for t in terms if t[0]]
            if not terms:
                continue
            rows.append((terms, "<=", rng.randint(1, 12)))
        if not rows:
            continue
        mine = solve_lp(obj, rows)
        c = [-next((co for co, nm in obj if nm == name), 0) for name in names]
        a_ub = [
            [next((co for co, nm in terms if nm == name), 0) for name in names]
            for terms, _, _ in rows
        ]
        b_ub = [rhs for _, _, rhs in rows]
        ref = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(0, None)] * n)
        if mine.status == "optimal":
            assert ref.status == 0
            assert float(mine.objective) == pytest.approx(-ref.fun, abs=1e-7)
        elif mine.status == "unbounded":
            assert ref.status == 3
