"""2-roots, 6-roots and constrained short-vector enumeration."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterator, Sequence

from . import linalg
from .lattice import Lattice


@dataclass(frozen=True, order=True)
class Root:
    vec: tuple[int, ...]
    norm: int

    def __neg__(self) -> Root:
        return Root(tuple(-x for x in self.vec), self.norm)


@dataclass(frozen=True)
class EnumConstraint:
    """normal.x == value (``eq``) or normal.x <= value (``le``), plain dot product."""

    normal: tuple[int, ...]
    relation: str
    value: int

    def __post_init__(self):
        if self.relation not in ("eq", "le"):
            raise ValueError(f"unknown relation {self.relation!r}")

    def holds(self, x: Sequence[int]) -> bool:
        s = sum(a * b for a, b in zip(self.normal, x))
        return s == self.value if self.relation == "eq" else s <= self.value


def root_norm_of(L: Lattice, v: Sequence[int]) -> int | None:
    """2 for a 2-root, 6 for a 6-root (v^2 = 6 and v.L in 3Z), otherwise None."""
    n = L.norm(v)
    if n == 2:
        return 2
    if n == 6 and all(x % 3 == 0 for x in linalg.mat_vec(L.gram, v)):
        return 6
    return None


def make_root(L: Lattice, v: Sequence[int]) -> Root:
    k = root_norm_of(L, v)
    if k is None:
        raise ValueError(f"{tuple(v)} is not a root of {L.name}")
    return Root(tuple(v), k)


def _ldl(gram: Sequence[Sequence]) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Q(x) = sum_i d[i] * (x_i + sum_{j>i} mu[i][j] x_j)^2 (upper Cholesky form)."""
    n = len(gram)
    q = [[Fraction(x) for x in row] for row in gram]
    for i in range(n):
        if q[i][i] <= 0:
            raise ValueError("Gram matrix is not positive definite")
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for m in range(k, n):
                q[k][m] -= q[k][i] * q[i][m]
    d = [q[i][i] for i in range(n)]
    mu = [[q[i][j] if j > i else Fraction(0) for j in range(n)] for i in range(n)]
    return d, mu


def _floor_add_sqrt(c: Fraction, s: Fraction) -> int:
    """floor(c + sqrt(s)) exactly, for s >= 0."""
    t = isqrt(s.numerator // s.denominator)
    hi = (c + t).__floor__()
    while (hi + 1 - c) >= 0 and (hi + 1 - c) ** 2 <= s:
        hi += 1
    return hi


def _ceil_sub_sqrt(c: Fraction, s: Fraction) -> int:
    """ceil(c - sqrt(s)) exactly, for s >= 0."""
    t = isqrt(s.numerator // s.denominator)
    lo = (c - t).__ceil__()
    while (c - (lo - 1)) >= 0 and (c - (lo - 1)) ** 2 <= s:
        lo -= 1
    return lo


def _search_order(n: int, constraints: Sequence[EnumConstraint]) -> list[int]:
    touched = [0] * n
    for con in constraints:
        for i, a in enumerate(con.normal):
            if a:
                touched[i] += 1
    return sorted(range(n), key=lambda i: (-touched[i], i))


def iter_vectors(
    gram: Sequence[Sequence],
    target,
    constraints: Sequence[EnumConstraint] = (),
    center: Sequence | None = None,
    order: Sequence[int] | None = None,
) -> Iterator[tuple[int, ...]]:
    """Yield integer x with (x-center)^T gram (x-center) == target and all constraints.

    Depth-first search over coordinates in ``order`` with exact Cholesky
    (LDL^T) bounds.  Constraints are checked as soon as every coordinate in
    their support is fixed; single-coordinate constraints become interval
    bounds, and partially-fixed ``le`` constraints prune whenever the
    unfixed coordinates have a sign-compatible bound.
    """
    n = len(gram)
    target = Fraction(target)
    if target < 0:
        return
    if n == 0:
        if target == 0 and all(c.holds(()) for c in constraints):
            yield ()
        return
    if order is None:
        order = _search_order(n, constraints)
    order = list(order)
    # permute so that position n-1 is searched first
    perm = order[::-1]
    g = [[gram[perm[i]][perm[j]] for j in range(n)] for i in range(n)]
    cen = [Fraction(0)] * n if center is None else [Fraction(center[perm[i]]) for i in range(n)]
    cons = [
        EnumConstraint(tuple(c.normal[perm[i]] for i in range(n)), c.relation, c.value)
        for c in constraints
    ]
    d, mu = _ldl(g)

    lo_b: list[int | None] = [None] * n
    hi_b: list[int | None] = [None] * n
    multi: list[EnumConstraint] = []
    for con in cons:
        sup = [i for i, a in enumerate(con.normal) if a]
        if not sup:
            if not con.holds([0] * n):
                return
            continue
        if len(sup) == 1:
            i = sup[0]
            a = con.normal[i]
            if con.relation == "eq":
                if con.value % a:
                    return
                x = con.value // a
                lo_b[i] = x if lo_b[i] is None else max(lo_b[i], x)
                hi_b[i] = x if hi_b[i] is None else min(hi_b[i], x)
            elif a > 0:
                x = con.value // a
                hi_b[i] = x if hi_b[i] is None else min(hi_b[i], x)
            else:
                x = -((-con.value) // a)  # ceil(value / a)
                lo_b[i] = x if lo_b[i] is None else max(lo_b[i], x)
        else:
            multi.append(con)

    # constraints grouped by the depth at which their support is complete,
    # plus lower-bound slack for pruning before completion
    ready: list[list[EnumConstraint]] = [[] for _ in range(n)]
    partial: list[list[tuple[EnumConstraint, int]]] = [[] for _ in range(n)]
    for con in multi:
        sup = [i for i, a in enumerate(con.normal) if a]
        last = min(sup)  # coordinates are fixed from n-1 downwards
        ready[last].append(con)
        if con.relation == "le":
            for depth in range(last + 1, n):
                # after fixing coordinates >= depth, bound the rest
                rest = [i for i in sup if i < depth]
                ok = all(
                    (con.normal[i] > 0 and lo_b[i] is not None)
                    or (con.normal[i] < 0 and hi_b[i] is not None)
                    for i in rest
                )
                if ok:
                    slack = sum(con.normal[i] * (lo_b[i] if con.normal[i] > 0 else hi_b[i]) for i in rest)
                    partial[depth].append((con, slack))

    x = [0] * n

    def emit():
        res = [0] * n
        for pos in range(n):
            res[perm[pos]] = x[pos]
        return tuple(res)

    def rec(i: int, budget: Fraction):
        c = cen[i] - sum(mu[i][j] * (x[j] - cen[j]) for j in range(i + 1, n))
        s = budget / d[i]
        lo = _ceil_sub_sqrt(c, s)
        hi = _floor_add_sqrt(c, s)
        if lo_b[i] is not None and lo_b[i] > lo:
            lo = lo_b[i]
        if hi_b[i] is not None and hi_b[i] < hi:
            hi = hi_b[i]
        for xi in range(lo, hi + 1):
            x[i] = xi
            rem = budget - d[i] * (xi - c) ** 2
            if rem < 0:
                continue
            bad = False
            for con in ready[i]:
                if not con.holds(x):
                    bad = True
                    break
            if not bad:
                for con, slack in partial[i]:
                    fixed = sum(con.normal[j] * x[j] for j in range(i, n) if con.normal[j])
                    if fixed + slack > con.value:
                        bad = True
                        break
            if bad:
                continue
            if i == 0:
                if rem == 0:
                    yield emit()
            else:
                yield from rec(i - 1, rem)
        x[i] = 0

    yield from rec(n - 1, target)


def iter_orthant_vectors(
    gram: Sequence[Sequence[int]],
    target: int,
    constraints: Sequence[EnumConstraint] = (),
    order: Sequence[int] | None = None,
) -> Iterator[tuple[int, ...]]:
    """Yield integer x >= 0 with x^T gram x == target and all constraints.

    Requires an integer Gram with non-negative entries: then the form
    restricted to the fixed coordinates never exceeds the total, which
    bounds the search far better than the real completion used by
    ``iter_vectors``.  The last coordinate is solved from the quadratic.
    """
    n = len(gram)
    if any(x < 0 for row in gram for x in row):
        raise ValueError("orthant search needs a non-negative Gram matrix")
    if any(gram[i][i] <= 0 for i in range(n)):
        raise ValueError("Gram matrix is not positive definite")
    target = int(target)
    if target < 0:
        return
    if order is None:
        order = sorted(range(n), key=lambda i: (-gram[i][i], i))
    order = list(order)
    ub = [isqrt(target // gram[i][i]) for i in range(n)]
    cons = list(constraints)
    # lowest possible contribution of the coordinates from position t onwards
    neg_tail = []
    for con in cons:
        tail = [0] * (n + 1)
        for t in range(n - 1, -1, -1):
            a = con.normal[order[t]]
            tail[t] = tail[t + 1] + (a * ub[order[t]] if a < 0 else 0)
        neg_tail.append(tail)
    pos_tail = []
    for con in cons:
        tail = [0] * (n + 1)
        for t in range(n - 1, -1, -1):
            a = con.normal[order[t]]
            tail[t] = tail[t + 1] + (a * ub[order[t]] if a > 0 else 0)
        pos_tail.append(tail)
    x = [0] * n
    lin = [0] * n  # lin[j] = sum over fixed i of gram[i][j] x_i
    part = [0] * len(cons)

    def feasible(t: int) -> bool:
        for c, con in enumerate(cons):
            if part[c] + neg_tail[c][t] > con.value:
                return False
            if con.relation == "eq" and part[c] + pos_tail[c][t] < con.value:
                return False
        return True

    def fix(i: int, v: int, sign: int) -> None:
        d = sign * v
        row = gram[i]
        for j in range(n):
            if row[j]:
                lin[j] += d * row[j]
        for c, con in enumerate(cons):
            if con.normal[i]:
                part[c] += d * con.normal[i]

    def rec(t: int, q: int):
        i = order[t]
        a, b = gram[i][i], lin[i]
        rem = target - q
        if t == n - 1:
            # a x^2 + 2 b x == rem, x >= 0
            disc = b * b + a * rem
            if disc < 0:
                return
            r = isqrt(disc)
            if r * r != disc or (r - b) % a:
                return
            v = (r - b) // a
            if v < 0:
                return
            x[i] = v
            fix(i, v, 1)
            ok = all(con.holds(x) for con in cons)
            fix(i, v, -1)
            if ok:
                yield tuple(x)
            x[i] = 0
            return
        # largest v with a v^2 + 2 b v <= rem
        disc = b * b + a * rem
        if disc < 0:
            return
        hi = (isqrt(disc) - b) // a
        for v in range(0, hi + 1):
            x[i] = v
            if v:
                fix(i, v, 1)
            if feasible(t + 1):
                yield from rec(t + 1, q + a * v * v + 2 * b * v)
            if v:
                fix(i, v, -1)
        x[i] = 0

    if n == 0:
        if target == 0 and all(c.holds(()) for c in cons):
            yield ()
        return
    if feasible(0):
        yield from rec(0, 0)


def enumerate_short_vectors(
    gram: Sequence[Sequence],
    target_norm,
    constraints: Sequence[EnumConstraint] = (),
    order: Sequence[int] | None = None,
) -> list[tuple[int, ...]]:
    """All integer v with v^T gram v == target_norm satisfying the constraints, sorted."""
    if not linalg.is_positive_definite(gram):
        raise ValueError("Gram matrix is not positive definite")
    return sorted(iter_vectors(gram, target_norm, constraints, order=order))


def orthogonal_complement_basis(L: Lattice, p: Sequence[int]) -> list[list[int]]:
    """Z-basis (rows) of {x in L : x.p = 0}."""
    return linalg.functional_kernel(linalg.mat_vec(L.gram, p))


def root_sublattice_basis(L: Lattice, k: int) -> list[list[int]]:
    """Z-basis (rows) of the vectors that can be k-roots: all of L for k = 2,
    and {x : x.L in 3Z} for k = 6."""
    if k == 2:
        return linalg.identity(L.rank)
    if k != 6:
        raise ValueError(f"no {k}-roots")
    # U G V = D: G x = 0 mod 3 iff d_i y_i = 0 mod 3 for y = V^-1 x
    diag, _u, v = linalg.smith_normal_form([list(r) for r in L.gram])
    scale = [1 if d % 3 == 0 else 3 for d in diag]
    return [[v[r][i] * scale[i] for r in range(L.rank)] for i in range(L.rank)]


def roots_in_hyperplane(L: Lattice, p: Sequence[int], k: int) -> list[Root]:
    """All k-roots orthogonal to p, for p^2 < 0."""
    if L.norm(p) >= 0:
        raise ValueError("p must have negative square")
    ambient = root_sublattice_basis(L, k)
    coef = linalg.functional_kernel([L.dot(b, p) for b in ambient])
    basis = [[sum(c * b[t] for c, b in zip(row, ambient)) for t in range(L.rank)] for row in coef]
    gk = [[L.dot(a, b) for b in basis] for a in basis]
    out = []
    for y in enumerate_short_vectors(gk, k):
        v = [sum(yi * b[c] for yi, b in zip(y, basis)) for c in range(L.rank)]
        if root_norm_of(L, v) == k:
            out.append(Root(tuple(v), k))
    return sorted(out)


def generic_functional(roots: Sequence[Root]) -> tuple[int, ...]:
    """(1, N, N^2, ...) with N = 1 + max |coordinate|; never vanishes on a non-zero root."""
    if not roots:
        return ()
    big = 1 + max(abs(c) for r in roots for c in r.vec)
    return tuple(big ** i for i in range(len(roots[0].vec)))


def _fval(f: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(f, v))


def simple_root_basis(L: Lattice, roots: Sequence[Root], functional: Sequence[int] | None = None) -> list[Root]:
    """Simple system of a finite root system, positive meaning functional.v < 0.

    A positive root v is decomposable iff some positive x != v has v.x > 0
    and reflection of v in x is still positive; then v = s_x(v) + c x with
    c > 0.  The indecomposable positive roots are returned in lex order.
    """
    if not roots:
        return []
    f = tuple(functional) if functional is not None else None
    if f is None or any(_fval(f, r.vec) == 0 for r in roots):
        f = generic_functional(roots)
        if any(_fval(f, r.vec) == 0 for r in roots):
            raise ValueError("functional vanishes on a root")
    pos = [r for r in roots if _fval(f, r.vec) < 0]
    simple = []
    for v in pos:
        decomposable = False
        for x in pos:
            if x is v:
                continue
            vx = L.dot(v.vec, x.vec)
            if vx <= 0:
                continue
            c = Fraction(2 * vx, x.norm)
            if c.denominator != 1:
                raise ValueError("root system is not crystallographic")
            c = c.numerator
            refl = [a - c * b for a, b in zip(v.vec, x.vec)]
            if _fval(f, refl) < 0:
                decomposable = True
                break
        if not decomposable:
            simple.append(v)
    return sorted(simple)
