#!/usr/bin/env python
# -*- coding: utf-8 -*-
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from dagcast.simplex import LPNumericalFailure, maximize

TEXTBOOK = ([3, 5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])

# cycles forever under the largest-coefficient rule
DEGENERATE = ([10, -57, -9, -24],
              [[0.5, -5.5, -2.5, 9], [0.5, -1.5, -0.5, 1], [1, 0, 0, 0]],
              [0, 0, 1])


def reference(c, A, b):
    result = linprog(-np.asarray(c, float), A_ub=A, b_ub=b, bounds=(0, None),
                     method="highs")
    assert result.status == 0
    return -result.fun


def test_textbook():
    result = maximize(*TEXTBOOK)
    assert result.objective == pytest.approx(36)
    assert result.x.tolist() == pytest.approx([2, 6])


def test_textbook_exact():
    c, A, b = TEXTBOOK
    result = maximize(c, A, b, exact=True)
    assert result.objective == Fraction(36)
    assert list(result.x) == [Fraction(2), Fraction(6)]


def test_degenerate_terminates():
    result = maximize(*DEGENERATE)
    assert result.objective == pytest.approx(reference(*DEGENERATE))


def test_degenerate_exact():
    c, A, b = DEGENERATE
    A = [[Fraction(x) for x in row] for row in A]
    result = maximize(c, A, b, exact=True)
    assert float(result.objective) == pytest.approx(reference(*DEGENERATE))


@pytest.mark.parametrize("seed", range(20))
def test_random_against_highs(seed):
    rng = np.random.default_rng(seed)
    rows, cols = rng.integers(2, 7), rng.integers(2, 7)
    A = rng.integers(-3, 6, size=(rows, cols)).astype(float)
    b = rng.integers(0, 10, size=rows).astype(float)
    c = rng.integers(-2, 6, size=cols).astype(float)
    # keep the problem bounded
    A = np.vstack([A, np.ones(cols)])
    b = np.append(b, 10.0)

    result = maximize(c, A, b)
    assert result.objective == pytest.approx(reference(c, A, b), abs=1e-7)
    assert np.all(A @ result.x <= b + 1e-7)
    assert np.all(result.x >= -1e-9)


def test_zero_objective():
    result = maximize([0, 0], [[1, 1]], [1])
    assert result.objective == 0
    assert result.pivots == 0


def test_unbounded():
    with pytest.raises(LPNumericalFailure) as info:
        maximize([1, 0], [[-1, 1]], [1])
    assert info.value.status == "unbounded"


def test_pivot_limit():
    with pytest.raises(LPNumericalFailure) as info:
        maximize(*TEXTBOOK, max_pivots=1)
    assert info.value.status == "pivot limit"
    assert info.value.max_coefficient == 5


@pytest.mark.parametrize(
    "c,A,b",
    (
        ([1], [[1]], [-1]),
        ([1, 1], [[1]], [1]),
        ([1], [[1], [1]], [1]),
    ),
)
def test_bad_input(c, A, b):
    with pytest.raises(ValueError):
        maximize(c, A, b)
