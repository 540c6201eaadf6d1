"""Small dense simplex over exact rationals.

Float LPs (scipy HiGHS) carry the main load; this solver re-derives
borderline verdicts in exact arithmetic. Problems are desk scale (tens of
variables), so a two-phase tableau with Bland's rule is plenty.
"""

from fractions import Fraction
from typing import NamedTuple

__all__ = ["LPResult", "simplex_max"]


class LPResult(NamedTuple):
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None
    x: tuple[Fraction, ...] | None


def _frac_matrix(rows):
    return [[Fraction(v) for v in row] for row in rows]


def simplex_max(c, A_ub=(), b_ub=(), A_eq=(), b_eq=()):
    """Maximize c.x subject to A_ub x <= b_ub and A_eq x = b_eq, x free.

    Free variables are split into positive parts internally; equalities are
    folded into inequality pairs. Bland's rule guarantees termination.
    """
    c = [Fraction(v) for v in c]
    n = len(c)
    rows = _frac_matrix(A_ub)
    rhs = [Fraction(v) for v in b_ub]
    for row, b in zip(_frac_matrix(A_eq), [Fraction(v) for v in b_eq]):
        rows.append(list(row))
        rhs.append(b)
        rows.append([-v for v in row])
        rhs.append(-b)

    # x = u - v with u, v >= 0.
    split_rows = [[*row, *(-v for v in row)] for row in rows]
    split_c = [*c, *(-v for v in c)]
    res = _simplex_standard(split_c, split_rows, rhs)
    if res.status != "optimal":
        return res
    ux = res.x
    x = tuple(ux[i] - ux[n + i] for i in range(n))
    return LPResult("optimal", res.value, x)


def _simplex_standard(c, A, b):
    """Maximize c.y, A y <= b, y >= 0 via two-phase tableau."""
    m, n = len(A), len(c)
    if m == 0:
        if any(v > 0 for v in c):
            return LPResult("unbounded", None, None)
        return LPResult("optimal", Fraction(0), tuple(Fraction(0) for _ in range(n)))

    # Tableau columns: y (n), slacks (m), artificials (as needed), rhs.
    art_rows = [i for i in range(m) if b[i] < 0]
    n_art = len(art_rows)
    width = n + m + n_art + 1
    T = [[Fraction(0)] * width for _ in range(m)]
    basis = [0] * m
    art_col = {}
    next_art = n + m
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        for j in range(n):
            T[i][j] = sign * A[i][j]
        T[i][n + i] = Fraction(sign)
        T[i][-1] = sign * b[i]
        if sign < 0:
            art_col[i] = next_art
            T[i][next_art] = Fraction(1)
            basis[i] = next_art
            next_art += 1
        else:
            basis[i] = n + i

    if n_art:
        # Phase 1: maximize -sum(artificials); reduced costs against the
        # artificial basis are c_j + sum of artificial rows.
        obj = [Fraction(0)] * width
        for i in art_col:
            for j in range(width):
                obj[j] += T[i][j]
        for i in art_col:
            obj[art_col[i]] -= 1
        status = _pivot_loop(T, basis, obj, width, forbidden=n + m)
        if status != "optimal" or obj[-1] != 0:
            return LPResult("infeasible", None, None)
        # Drive any leftover artificial out of the basis.
        for i in range(m):
            if basis[i] >= n + m:
                piv = next((j for j in range(n + m) if T[i][j] != 0), None)
                if piv is None:
                    continue
                _pivot(T, basis, i, piv)

    obj = [Fraction(0)] * width
    for j in range(n):
        obj[j] = c[j]
    for i in range(m):
        if basis[i] < n and c[basis[i]] != 0:
            coef = c[basis[i]]
            for j in range(width):
                obj[j] -= coef * T[i][j]
    status = _pivot_loop(T, basis, obj, width, forbidden=n + m)
    if status == "unbounded":
        return LPResult("unbounded", None, None)
    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i][-1]
    return LPResult("optimal", -obj[-1], tuple(x))


def _pivot_loop(T, basis, obj, width, forbidden=None):
    limit = width - 1 if forbidden is None else forbidden  # never enter the rhs
    while True:
        enter = next((j for j in range(limit) if obj[j] > 0), None)
        if enter is None:
            return "optimal"
        ratio, leave = None, None
        for i in range(len(T)):
            if T[i][enter] > 0:
                r = T[i][-1] / T[i][enter]
                if ratio is None or r < ratio or (r == ratio and basis[i] < basis[leave]):
                    ratio, leave = r, i
        if leave is None:
            return "unbounded"
        _pivot(T, basis, leave, enter)
        coef = obj[enter]
        for j in range(width):
            obj[j] -= coef * T[leave][j]


def _pivot(T, basis, row, col):
    piv = T[row][col]
    T[row] = [v / piv for v in T[row]]
    for i in range(len(T)):
        if i != row and T[i][col] != 0:
            coef = T[i][col]
            T[i] = [a - coef * b for a, b in zip(T[i], T[row])]
    basis[row] = col
