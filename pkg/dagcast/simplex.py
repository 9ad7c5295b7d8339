""" Dense tableau simplex for max c.x s.t. A x <= b, x >= 0 with b >= 0.

The all-slack basis is feasible under b >= 0, so a single phase suffices.
Bland's rule picks the entering and leaving variables, which rules out
cycling on degenerate problems. The tableau is either float64 with a
tolerance or an object array of Fractions solved exactly.
"""

import collections
from fractions import Fraction

import numpy as np

from . import config, util
from .errors import ComputeError

LPResult = collections.namedtuple("LPResult", "x objective pivots basis")

_exact = np.frompyfunc(Fraction, 1, 1)


class LPNumericalFailure(ComputeError):
    fields = ("status", "max_coefficient", "min_pivot")


def _tableau(c, A, b, exact):
    A = np.asarray(A, dtype=object if exact else float)
    b = np.asarray(b, dtype=object if exact else float)
    c = np.asarray(c, dtype=object if exact else float)

    if exact:
        A, b, c = _exact(A), _exact(b), _exact(c)

    rows, cols = A.shape

    if b.shape != (rows,) or c.shape != (cols,):
        raise ValueError("shape mismatch: A is %dx%d, b has %s, c has %s"
                         % (rows, cols, b.shape, c.shape))

    if rows and (b < 0).any():
        raise ValueError("right-hand side must be nonnegative")

    dtype = object if exact else float
    T = np.zeros((rows + 1, cols + rows + 1), dtype=dtype)

    if exact:
        T[...] = Fraction(0)

    T[:rows, :cols] = A
    T[:rows, cols:cols + rows] = np.eye(rows, dtype=dtype)
    T[:rows, -1] = b
    T[-1, :cols] = -c
    return T


def maximize(c, A, b, exact=False, tolerance=None, max_pivots=None):
    """ Solve max c.x s.t. A x <= b, x >= 0.

    :param exact: run on Fractions with zero tolerance
    :returns: LPResult with x over the structural columns
    :raises LPNumericalFailure: unbounded problem or pivot cap reached
    """
    eps = 0 if exact else (config.LP_TOLERANCE.get if tolerance is None
                           else tolerance)
    max_pivots = max_pivots or config.LP_MAX_PIVOTS.get
    T = _tableau(c, A, b, exact)
    rows = T.shape[0] - 1
    cols = T.shape[1] - rows - 1
    basis = list(range(cols, cols + rows))
    max_coef = float(np.abs(T[:, :-1]).max()) if T[:, :-1].size else 0.0
    min_pivot = None

    for pivots in range(max_pivots + 1):
        candidates = np.flatnonzero(T[-1, :-1] < -eps)

        if not len(candidates):
            break

        if pivots == max_pivots:
            raise LPNumericalFailure(
                "simplex stopped after %d pivots" % max_pivots,
                status="pivot limit", max_coefficient=max_coef,
                min_pivot=min_pivot)

        j = int(candidates[0])
        column = T[:rows, j]
        positive = np.flatnonzero(column > eps)

        if not len(positive):
            raise LPNumericalFailure("objective is unbounded along column %d"
                                     % j, status="unbounded",
                                     max_coefficient=max_coef,
                                     min_pivot=min_pivot)

        ratios = [T[i, -1] / column[i] for i in positive]
        best = min(ratios)
        ties = [int(i) for i, r in zip(positive, ratios) if r - best <= eps]
        i = min(ties, key=lambda k: basis[k])

        pivot = T[i, j]
        size = abs(float(pivot))
        min_pivot = size if min_pivot is None else min(min_pivot, size)

        T[i] = T[i] / pivot
        factors = T[:, j].copy()
        factors[i] = 0
        T -= np.outer(factors, T[i])
        T[:, j] = 0
        T[i, j] = 1
        basis[i] = j

    x = np.zeros(cols, dtype=T.dtype)

    if exact:
        x[...] = Fraction(0)

    for i, var in enumerate(basis):
        if var < cols:
            x[var] = T[i, -1]

    util.dbg("simplex: %dx%d, %d pivots, objective %s", rows, cols, pivots,
             T[-1, -1])
    return LPResult(x, T[-1, -1], pivots, tuple(basis))
