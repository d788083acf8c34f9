"""Exact integer and rational matrix routines.

Matrices are lists of rows.  Entries are ``int`` or ``Fraction``; nothing in
here touches floating point.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = list[list[int]]
QMatrix = list[list[Fraction]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*a)]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def bilinear(gram: Sequence[Sequence], x: Sequence, y: Sequence) -> int | Fraction:
    """x^T gram y."""
    total = 0
    for i, xi in enumerate(x):
        if xi:
            row = gram[i]
            total += xi * sum(row[j] * yj for j, yj in enumerate(y) if yj)
    return total


def is_symmetric(a: Sequence[Sequence]) -> bool:
    n = len(a)
    return all(len(row) == n for row in a) and all(
        a[i][j] == a[j][i] for i in range(n) for j in range(i + 1, n)
    )


def det(a: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by Bareiss fraction-free elimination."""
    m = [list(row) for row in a]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def inertia(a: Sequence[Sequence]) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric rational matrix.

    Uses symmetric congruence elimination over Q; Sylvester's law makes the
    counts of the resulting diagonal the inertia of ``a``.
    """
    m = [[Fraction(x) for x in row] for row in a]
    n = len(m)
    pos = neg = 0
    active = list(range(n))
    while active:
        k = next((i for i in active if m[i][i] != 0), None)
        if k is None:
            pair = next(
                ((i, j) for i in active for j in active if j != i and m[i][j] != 0),
                None,
            )
            if pair is None:
                break
            i, j = pair
            # row/col i += row/col j makes the diagonal entry 2*m[i][j]
            for t in range(n):
                m[i][t] += m[j][t]
            for t in range(n):
                m[t][i] += m[t][j]
            k = i
        piv = m[k][k]
        if piv > 0:
            pos += 1
        else:
            neg += 1
        active.remove(k)
        for i in active:
            f = m[i][k] / piv
            if f:
                for j in active:
                    m[i][j] -= f * m[k][j]
            m[i][k] = Fraction(0)
        for j in active:
            m[k][j] = Fraction(0)
    return pos, neg, n - pos - neg


def is_positive_definite(a: Sequence[Sequence]) -> bool:
    """Sylvester test via leading pivots of an LDL^T factorisation."""
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    for k in range(n):
        piv = m[k][k]
        if piv <= 0:
            return False
        for i in range(k + 1, n):
            f = m[i][k] / piv
            if f:
                row_k = m[k]
                row_i = m[i]
                for j in range(k + 1, n):
                    row_i[j] -= f * row_k[j]
    return True


def rank(a: Sequence[Sequence]) -> int:
    return len(row_echelon_pivots(a))


def row_echelon_pivots(a: Sequence[Sequence]) -> list[int]:
    """Indices of the rows of ``a`` forming a maximal independent subset (greedy, in order)."""
    basis: list[tuple[int, list[int]]] = []
    chosen = []
    for idx, row in enumerate(a):
        den = common_denominator(row)
        r = [int(x * den) for x in row]
        for col, b in basis:
            if r[col]:
                f, g = b[col], r[col]
                r = [f * x - g * y for x, y in zip(r, b)]
                c = 0
                for x in r:
                    c = gcd(c, x)
                if c > 1:
                    r = [x // c for x in r]
        col = next((c for c, x in enumerate(r) if x), None)
        if col is not None:
            basis.append((col, r))
            chosen.append(idx)
    return chosen


def nullspace(a: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    """Integer basis (rows, each primitive) of the rational kernel {x : a x = 0}."""
    n = len(a[0]) if a else ncols
    m = [[Fraction(x) for x in row] for row in a]
    pivots: list[int] = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    out = []
    for free in (c for c in range(n) if c not in pivots):
        v = [Fraction(0)] * n
        v[free] = Fraction(1)
        for row, c in zip(m, pivots):
            v[c] = -row[free]
        den = common_denominator(v)
        w = [int(x * den) for x in v]
        g = 0
        for x in w:
            g = gcd(g, x)
        out.append([x // g for x in w])
    return out


def inverse(a: Sequence[Sequence]) -> QMatrix:
    """Inverse over Q by Gauss-Jordan; raises ``ValueError`` if singular."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            raise ValueError("singular matrix")
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def scaled_inverse(a: Sequence[Sequence[int]]) -> tuple[int, Matrix]:
    """(d, M) with d = +-det(a) and M = d * a^-1, by fraction-free Gauss-Jordan elimination."""
    n = len(a)
    m = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(a)]
    prev = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        m[k], m[piv] = m[piv], m[k]
        pk = m[k][k]
        rk = m[k]
        for i in range(n):
            if i == k:
                continue
            ri = m[i]
            f = ri[k]
            m[i] = [(pk * x - f * y) // prev for x, y in zip(ri, rk)]
        prev = pk
    return prev, [row[n:] for row in m]


def solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve a x = b for square non-singular ``a``."""
    return mat_vec(inverse(a), b)


def common_denominator(values) -> int:
    d = 1
    for x in values:
        den = Fraction(x).denominator
        d = d * den // gcd(d, den)
    return d


def is_integral(values) -> bool:
    return all(Fraction(x).denominator == 1 for x in values)


def to_int(values) -> list[int]:
    out = []
    for x in values:
        x = Fraction(x)
        if x.denominator != 1:
            raise ValueError(f"non-integral entry {x}")
        out.append(x.numerator)
    return out


def functional_kernel(a: Sequence[int]) -> Matrix:
    """Basis (as rows) of {x in Z^n : a.x = 0}.

    Column operations on the row ``a`` reduce it to (g, 0, ..., 0); the
    accumulated unimodular matrix then carries a kernel basis in its
    columns 1..n-1.
    """
    n = len(a)
    row = list(a)
    u = identity(n)
    while True:
        nz = [i for i in range(n) if row[i] != 0]
        if len(nz) <= 1:
            break
        piv = min(nz, key=lambda i: abs(row[i]))
        for j in nz:
            if j == piv:
                continue
            q = row[j] // row[piv]
            row[j] -= q * row[piv]
            for r in range(n):
                u[r][j] -= q * u[r][piv]
    nz = [i for i in range(n) if row[i] != 0]
    keep = [j for j in range(n) if j not in nz]
    return [[u[r][j] for r in range(n)] for j in keep]


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[list[int], Matrix, Matrix]:
    """Return (diagonal, U, V) with U a V = diag and U, V unimodular.

    Pivots on the entry of minimal absolute value.  The diagonal satisfies
    d_1 | d_2 | ... and is non-negative.
    """
    m = [list(row) for row in a]
    rows, cols = len(m), len(m[0]) if m else 0
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst -= q * row src
        m[dst] = [x - q * y for x, y in zip(m[dst], m[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):  # col dst -= q * col src
        for row in m:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    for t in range(min(rows, cols)):
        while True:
            entries = [(abs(m[i][j]), i, j) for i in range(t, rows)
                       for j in range(t, cols) if m[i][j] != 0]
            if not entries:
                break
            _, pi, pj = min(entries)
            swap_rows(t, pi)
            swap_cols(t, pj)
            piv = m[t][t]
            done = True
            for i in range(t + 1, rows):
                if m[i][t]:
                    add_row(i, t, m[i][t] // piv)
                    if m[i][t]:
                        done = False
            for j in range(t + 1, cols):
                if m[t][j]:
                    add_col(j, t, m[t][j] // piv)
                    if m[t][j]:
                        done = False
            if not done:
                continue
            # enforce divisibility of the remaining block by the pivot
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if m[i][j] % piv), None)
            if bad is None:
                break
            i, _ = bad
            m[t] = [x + y for x, y in zip(m[t], m[i])]
            u[t] = [x + y for x, y in zip(u[t], u[i])]
        if t < rows and t < cols and m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
    diag = [m[i][i] for i in range(min(rows, cols))]
    return diag, u, v
