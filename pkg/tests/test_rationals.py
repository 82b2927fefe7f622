from fractions import Fraction as F

import numpy as np
import pytest

from errors import DivergentStar, NegativeDenominator, NonUniqueStationary, NotStochastic, ParseError, SingularMatrix
from factories import random_stochastic
from rationals import (
    RationalMatrix, RationalVector, block_diagonal, check_stochastic, format_rational,
    matrix_from_entries, parse_rational, solve_linear, star, stationary_distribution,
)

WORKED_E = matrix_from_entries(5, [(0, 1, F(1, 2)), (1, 2, F(1, 2)), (2, 2, F(1, 2))])
WORKED_ESTAR = RationalMatrix([
    [1, F(1, 2), F(1, 2), 0, 0],
    [0, 1, 1, 0, 0],
    [0, 0, 2, 0, 0],
    [0, 0, 0, 1, 0],
    [0, 0, 0, 0, 1],
])
WORKED_P = RationalMatrix([
    [F(1, 2), 0, 0, F(1, 4), F(1, 4)],
    [0, 0, 0, F(1, 2), F(1, 2)],
    [0, 0, 0, 0, 1],
    [1, 0, 0, 0, 0],
    [1, 0, 0, 0, 0],
])


def random_matrix(rng, rows, cols):
    return RationalMatrix([[F(rng.randint(-6, 6), rng.randint(1, 5)) for _ in range(cols)] for _ in range(rows)])


# --- Formatting ---

def test_format_rational():
    assert format_rational(F(2, 3)) == "2/3"
    assert format_rational(F(4, 2)) == "2"
    assert format_rational(0) == "0"
    assert format_rational(F(-1, 4)) == "-1/4"


def test_parse_rational():
    assert parse_rational("2/3") == F(2, 3)
    assert parse_rational("4/6") == F(2, 3)
    assert parse_rational("-5") == -5
    with pytest.raises(ParseError):
        parse_rational("1/0")
    with pytest.raises(ParseError):
        parse_rational("one half")
    with pytest.raises(NegativeDenominator):
        parse_rational("1/-2", line=7)


def test_entries_are_canonical():
    m = RationalMatrix([[F(2, 4), 3]])
    assert m[0, 0].numerator == 1 and m[0, 0].denominator == 2
    assert isinstance(m[0, 1], F)


def test_entry_access_is_bounded():
    m = RationalMatrix.identity(2)
    with pytest.raises(IndexError):
        m[2, 0]
    with pytest.raises(IndexError):
        RationalVector([1, 2])[2]


def test_matrices_are_read_only():
    m = RationalMatrix.identity(2)
    with pytest.raises(ValueError):
        m.array[0, 0] = F(5)


# --- solve_linear ---

def test_solve_identity():
    assert solve_linear(RationalMatrix.identity(3), RationalMatrix.identity(3)) == RationalMatrix.identity(3)


def test_solve_diagonal():
    x = solve_linear(RationalMatrix([[2, 0], [0, 4]]), RationalMatrix.identity(2))
    assert x == RationalMatrix([[F(1, 2), 0], [0, F(1, 4)]])


def test_solve_needs_row_swap():
    a = RationalMatrix([[0, 1], [1, 0]])
    b = RationalMatrix([[3], [5]])
    assert solve_linear(a, b) == RationalMatrix([[5], [3]])


def test_solve_worked_example_star():
    x = solve_linear(RationalMatrix.identity(5) - WORKED_E, RationalMatrix.identity(5))
    assert x == WORKED_ESTAR
    assert x[2, 2] == 2
    assert x[0, 1] == F(1, 2)


def test_solve_singular():
    with pytest.raises(SingularMatrix):
        solve_linear(RationalMatrix([[1, 2], [2, 4]]), RationalMatrix.identity(2))


def test_solve_random_systems(rng):
    for _ in range(20):
        n = rng.randint(1, 5)
        a = random_matrix(rng, n, n)
        b = random_matrix(rng, n, 2)
        try:
            x = solve_linear(a, b)
        except SingularMatrix:
            continue
        assert a @ x == b


# --- star ---

def test_star_of_zero_is_identity():
    assert star(RationalMatrix.zeros(4)) == RationalMatrix.identity(4)


def test_star_worked_example():
    assert star(WORKED_E) == WORKED_ESTAR


def test_star_times_complement_is_identity():
    e_star = star(WORKED_E)
    assert e_star @ (RationalMatrix.identity(5) - WORKED_E) == RationalMatrix.identity(5)


def test_star_diverges_on_total_loop():
    with pytest.raises(DivergentStar):
        star(RationalMatrix([[1]]))


# --- stationary_distribution ---

def test_stationary_symmetric():
    p = RationalMatrix([[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]])
    assert stationary_distribution(p) == RationalVector([F(1, 2), F(1, 2)])


def test_stationary_worked_example():
    pi = stationary_distribution(WORKED_P)
    assert pi == RationalVector([F(2, 3), 0, 0, F(1, 6), F(1, 6)])
    assert pi @ WORKED_P == pi
    assert pi.total() == 1


def test_stationary_not_unique():
    with pytest.raises(NonUniqueStationary):
        stationary_distribution(RationalMatrix.identity(2))


def test_stationary_rejects_non_stochastic():
    with pytest.raises(NotStochastic):
        stationary_distribution(RationalMatrix([[F(1, 2), F(1, 3)], [0, 1]]))
    with pytest.raises(NotStochastic):
        check_stochastic(RationalMatrix([[F(3, 2), F(-1, 2)], [0, 1]]))


def test_stationary_matches_power_iteration(rng):
    for _ in range(10):
        n = rng.randint(1, 6)
        p = random_stochastic(rng, n)
        pi = stationary_distribution(p)
        assert pi @ p == pi
        assert pi.total() == 1
        limit = np.full(n, 1.0 / n) @ np.linalg.matrix_power(p.to_float(), 10_000)
        assert np.allclose(np.array([float(x) for x in pi]), limit, atol=1e-9, rtol=0)


# --- Exactness ---

def test_products_are_associative(rng):
    for _ in range(10):
        a, b, c = (random_matrix(rng, 3, 3) for _ in range(3))
        assert (a @ b) @ c == a @ (b @ c)
        assert (a + b) + c == a + (b + c)


def test_block_diagonal():
    m = block_diagonal(RationalMatrix([[1]]), RationalMatrix([[2, 3], [4, 5]]))
    assert m == RationalMatrix([[1, 0, 0], [0, 2, 3], [0, 4, 5]])


def test_matrix_from_entries_sums_duplicates():
    m = matrix_from_entries(2, [(0, 1, F(1, 2)), (0, 1, F(1, 2))])
    assert m[0, 1] == 1
