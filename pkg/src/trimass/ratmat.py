"""Exact linear algebra over the rationals for small stoichiometric matrices.

Matrices are lists of lists of :class:`fractions.Fraction` (or ints, which mix
freely).  Everything here is fraction-free or pivoted Gaussian elimination;
sizes are tiny (n <= 5, m <= 6) so clarity beats asymptotics.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

Rat = Fraction
Vec = List[Fraction]
Mat = List[List[Fraction]]


def frac(x) -> Fraction:
    """Coerce ints, strings like '3/2', and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def mat_copy(a: Sequence[Sequence]) -> Mat:
    return [[frac(v) for v in row] for row in a]


def identity(n: int) -> Mat:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def mat_mul(a: Mat, b: Mat) -> Mat:
    rows, mid, cols = len(a), len(b), len(b[0])
    return [
        [sum((a[i][k] * b[k][j] for k in range(mid)), Fraction(0)) for j in range(cols)]
        for i in range(rows)
    ]


def mat_vec(a: Mat, v: Sequence) -> Vec:
    return [sum((row[k] * frac(v[k]) for k in range(len(v))), Fraction(0)) for row in a]


def transpose(a: Sequence[Sequence]) -> Mat:
    return [list(col) for col in zip(*a)]


def rank(a: Sequence[Sequence]) -> int:
    """Exact rank via Gaussian elimination over Q."""
    m = mat_copy(a)
    if not m:
        return 0
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, rows):
            if m[i][c] != 0:
                f = m[i][c] / m[r][c]
                for j in range(c, cols):
                    m[i][j] -= f * m[r][j]
        r += 1
        if r == rows:
            break
    return r


def nullspace(a: Sequence[Sequence]) -> List[Vec]:
    """Basis of ker(a) as exact rational column vectors."""
    m = mat_copy(a)
    if not m:
        return []
    rows, cols = len(m), len(m[0])
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [vi - f * vr for vi, vr in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for pr, pc in enumerate(pivots):
            v[pc] = -m[pr][fc]
        basis.append(v)
    return basis


def left_nullspace(a: Sequence[Sequence]) -> List[Vec]:
    return nullspace(transpose(a))


def solve(a: Sequence[Sequence], b: Sequence) -> Optional[Vec]:
    """One exact solution of a x = b, or None if inconsistent.

    For underdetermined systems the free variables are set to zero.
    """
    m = mat_copy(a)
    rhs = [frac(v) for v in b]
    rows, cols = len(m), len(m[0])
    pivots: List[Tuple[int, int]] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        rhs[r], rhs[piv] = rhs[piv], rhs[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        rhs[r] *= inv
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [vi - f * vr for vi, vr in zip(m[i], m[r])]
                rhs[i] -= f * rhs[r]
        pivots.append((r, c))
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if rhs[i] != 0:
            return None
    x = [Fraction(0)] * cols
    for pr, pc in pivots:
        x[pc] = rhs[pr]
    return x


def det(a: Sequence[Sequence]) -> Fraction:
    """Exact determinant (square matrices only)."""
    m = mat_copy(a)
    n = len(m)
    sign = 1
    out = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        out *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                for j in range(c, n):
                    m[i][j] -= f * m[c][j]
    return out * sign


def independent_row_pair(a: Sequence[Sequence]) -> Optional[Tuple[int, int]]:
    """First (p, q), p < q, such that rows p and q of `a` are independent."""
    m = mat_copy(a)
    rows = len(m)
    for p in range(rows):
        if all(v == 0 for v in m[p]):
            continue
        for q in range(p + 1, rows):
            if rank([m[p], m[q]]) == 2:
                return (p, q)
    return None


def cross3(u: Sequence, v: Sequence) -> Vec:
    """Cross product of two length-3 rational vectors."""
    u = [frac(x) for x in u]
    v = [frac(x) for x in v]
    return [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]


def fourier_motzkin_feasible(
    constraints: List[Tuple[Vec, Fraction]],
    nvars: int,
) -> Optional[Vec]:
    """Decide feasibility of the system  a . x >= b  by exact elimination.

    `constraints` is a list of (coefficient vector, lower bound).  Returns a
    feasible rational point, or None when the system is infeasible.  Intended
    for the handful of variables that arise from m <= 6 reaction networks;
    the doubling blowup of elimination is a non-issue at this size.
    """
    system = [([frac(c) for c in coefs], frac(rhs)) for coefs, rhs in constraints]
    stack = []  # per eliminated variable: (lower list, upper list) in remaining vars
    for var in range(nvars - 1, -1, -1):
        lowers, uppers, rest = [], [], []
        for coefs, rhs in system:
            c = coefs[var]
            tail = coefs[:var]
            if c > 0:
                # x_var >= (rhs - tail.x)/c
                lowers.append(([t / c for t in tail], rhs / c))
            elif c < 0:
                uppers.append(([t / c for t in tail], rhs / c))
            else:
                rest.append((tail, rhs))
        for lc, lb in lowers:
            for uc, ub in uppers:
                # lower bound expr <= upper bound expr
                coefs = [u - l for l, u in zip(lc, uc)]
                rest.append(([-v for v in coefs], lb - ub))
        stack.append((lowers, uppers))
        system = rest
    for coefs, rhs in system:  # only constant constraints 0 >= rhs remain
        if rhs > 0:
            return None
    # back-substitute, eliminated variables in reverse order
    point: List[Fraction] = []
    for var, (lowers, uppers) in zip(range(nvars), reversed(stack)):
        lo = None
        hi = None
        for lc, lb in lowers:
            val = lb - sum((c * x for c, x in zip(lc, point)), Fraction(0))
            lo = val if lo is None or val > lo else lo
        for uc, ub in uppers:
            val = ub - sum((c * x for c, x in zip(uc, point)), Fraction(0))
            hi = val if hi is None or val < hi else hi
        if lo is None and hi is None:
            x = Fraction(0)
        elif lo is None:
            x = hi
        elif hi is None:
            x = lo
        else:
            x = (lo + hi) / 2
        point.append(x)
    return point
