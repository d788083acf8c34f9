"""Vinberg's algorithm for the 2/6-root reflection group of a hyperbolic lattice."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
import itertools
from math import gcd
from typing import Iterable, Iterator, Sequence

from . import linalg
from .coxeter import (
    CoxeterGraph,
    SubdiagramClass,
    classify_subdiagram,
    build_coxeter_graph,
    connected_parabolic_sets,
    elliptic_sets_of_size,
    is_elliptic,
    iter_elliptic_sets,
    has_dotted_edge,
    parabolic_sets_of_rank,
)
from .lattice import Lattice, LatticeSpec, Summand, build_lattice, parse_lattice_spec
from .roots import (
    EnumConstraint,
    Root,
    iter_orthant_vectors,
    iter_vectors,
    orthogonal_complement_basis,
    root_norm_of,
    roots_in_hyperplane,
    simple_root_basis,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_LEVEL = 64

# termination criteria, by what they check
ELLIPTIC_EXTENSION = "elliptic-extension"  # Vinberg's finite-volume iff criterion
PARABOLIC_COVER = "parabolic-cover"  # sufficient criterion without Lanner subdiagrams

TERMINATED, EXHAUSTED, RUNNING = "Terminated", "Exhausted", "Running"

# above this many walls the subdiagram census is skipped in favour of the edge walk
COMBINATORIAL_LIMIT = 40


@dataclass
class TerminationReport:
    status: str = RUNNING
    criterion: str | None = None
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status == TERMINATED and self.criterion is None:
            raise ValueError("a terminated run needs a certifying criterion")


@dataclass
class VinbergRun:
    lattice: Lattice
    base_point: tuple[int, ...]
    accepted: list[tuple[Root, Fraction]]
    termination: TerminationReport
    labels: list[str] = field(default_factory=list)
    level0_rank: int = 0

    @property
    def roots(self) -> list[Root]:
        return [r for r, _ in self.accepted]

    def levels(self) -> list[Fraction]:
        return [d for _, d in self.accepted]

    def graph(self) -> CoxeterGraph:
        return build_coxeter_graph(self.lattice, self.roots, self.labels or None)

    def by_level(self) -> dict[Fraction, list[Root]]:
        out: dict[Fraction, list[Root]] = {}
        for r, d in self.accepted:
            out.setdefault(d, []).append(r)
        return out


def level_of(L: Lattice, p: Sequence[int], v: Root) -> Fraction:
    return Fraction(2 * L.dot(p, v.vec) ** 2, v.norm)


def default_base_point(L: Lattice) -> tuple[int, ...]:
    """u1 - u2 of the first U(k) summand, else the first negative diagonal generator."""
    for start, s in L.summand_offsets:
        if s.kind == "U" and s.sign == 1:
            p = [0] * L.rank
            p[start], p[start + 1] = 1, -1
            return tuple(p)
    for start, s in L.summand_offsets:
        if s.kind == "diag":
            for i, e in enumerate(s.entries):
                if e * s.sign < 0:
                    p = [0] * L.rank
                    p[start + i] = 1
                    return tuple(p)
    raise ValueError(f"no preset base point for {L.name}; supply one")


def default_functional(L: Lattice) -> tuple[int, ...]:
    """-1 on every basis vector except -2 on the first vector of each A2 block.

    With it the level-0 simple roots inside A2 are a2 and a1 - a2, and the
    simple roots of the other blocks are their standard bases.
    """
    f = [-1] * L.rank
    for start, s in L.summand_offsets:
        if s.kind == "A" and s.n == 2:
            f[start] = -2
    return tuple(f)


def _divisor(L: Lattice, v: Sequence[int]) -> int:
    g = 0
    for x in linalg.mat_vec(L.gram, v):
        g = gcd(g, x)
    return g


def level_grid(L: Lattice, p: Sequence[int], max_level) -> Iterator[tuple[Fraction, list[tuple[int, int]]]]:
    """Ascending levels d = 2m^2/k with the (k, m) pairs realising them.

    p.v must be a multiple of div(p) = gcd(p.L), and of 3 for 6-roots.
    At equal d the 2-root pair comes first.
    """
    dp = _divisor(L, p)
    step = {2: dp, 6: dp * 3 // gcd(dp, 3)}
    heads = {k: step[k] for k in (2, 6)}
    while True:
        d = min(Fraction(2 * heads[k] ** 2, k) for k in (2, 6))
        if d > max_level:
            return
        pairs = []
        for k in (2, 6):
            if Fraction(2 * heads[k] ** 2, k) == d:
                pairs.append((k, heads[k]))
                heads[k] += step[k]
        yield d, pairs


def pairs_for_level(L: Lattice, p: Sequence[int], d) -> list[tuple[int, int]]:
    d = Fraction(d)
    out = []
    dp = _divisor(L, p)
    for k in (2, 6):
        m2 = d * k / 2
        if m2.denominator != 1:
            continue
        from math import isqrt

        m = isqrt(m2.numerator)
        if m > 0 and m * m == m2.numerator and m % dp == 0 and (k == 2 or m % 3 == 0):
            out.append((k, m))
    if not out:
        raise ValueError(f"{d} is not a level 2m^2/k for this base point")
    return out


class _ConeFrame:
    """Candidate search in coordinates c_j = -(v.w_j) over the level-0 roots w_j.

    Valid when the level-0 roots form a basis of p-perp over Q: then
    v = (m/P) p - sum_j c_j w_j^*, v_perp^2 = c^T M^{-1} c and the
    conditions v.w_j <= 0 read c_j >= 0.
    """

    def __init__(self, L: Lattice, p: Sequence[int], level0: Sequence[Root]):
        self.L = L
        self.p = tuple(p)
        self.P = -L.norm(p)
        self.level0 = list(level0)
        M = [[L.dot(a.vec, b.vec) for b in level0] for a in level0]
        self.minv = linalg.inverse(M)
        n = len(level0)
        self.duals = [
            [sum(self.minv[j][i] * level0[i].vec[c] for i in range(n)) for c in range(L.rank)]
            for j in range(n)
        ]
        self.div = [_divisor(L, w.vec) for w in level0]

    def candidates(self, k: int, m: int, higher: Sequence[Root]) -> list[Root]:
        L, n = self.L, len(self.level0)
        s = [self.div[j] * 3 // gcd(self.div[j], 3) if k == 6 else self.div[j] for j in range(n)]
        A = [[s[i] * s[j] * self.minv[i][j] for j in range(n)] for i in range(n)]
        T = k + Fraction(m * m, self.P)
        den = linalg.common_denominator([x for row in A for x in row] + [T])
        A_int = [[int(x * den) for x in row] for row in A]
        T_int = T * den
        if T_int.denominator != 1:
            return []
        alpha = Fraction(m, self.P)
        cons = []
        for w in higher:
            coef = [-s[j] * L.dot(self.duals[j], w.vec) for j in range(n)]
            rhs = -alpha * L.dot(self.p, w.vec)
            e = linalg.common_denominator(coef + [rhs])
            normal = tuple(int(c * e) for c in coef)
            cons.append(EnumConstraint(normal, "le", (rhs * e).__floor__()))
        base = [alpha * x for x in self.p]
        cols = [[s[j] * x for x in self.duals[j]] for j in range(n)]
        E = linalg.common_denominator(base + [x for col in cols for x in col])
        base_i = [int(x * E) for x in base]
        cols_i = [[int(x * E) for x in col] for col in cols]
        out = []
        for c in iter_orthant_vectors(A_int, int(T_int), cons):
            ev = list(base_i)
            for j, cj in enumerate(c):
                if cj:
                    col = cols_i[j]
                    for t in range(L.rank):
                        ev[t] -= cj * col[t]
            if any(x % E for x in ev):
                continue
            v = tuple(x // E for x in ev)
            if root_norm_of(L, v) == k:
                out.append(Root(v, k))
        return sorted(out)


class _AffineFrame:
    """Fallback search over the coset {v : p.v = -m} = v0 + K, K = p-perp in L."""

    def __init__(self, L: Lattice, p: Sequence[int]):
        self.L = L
        self.p = tuple(p)
        self.a = linalg.mat_vec(L.gram, p)
        self.basis = orthogonal_complement_basis(L, p)
        self.gk = [[L.dot(x, y) for y in self.basis] for x in self.basis]
        self.gk_inv = linalg.inverse(self.gk)

    def _particular(self, value: int) -> list[int] | None:
        # column-reduce the functional a to find x with a.x == value
        n = len(self.a)
        row = list(self.a)
        u = linalg.identity(n)
        while True:
            nz = [i for i in range(n) if row[i]]
            if len(nz) <= 1:
                break
            piv = min(nz, key=lambda i: abs(row[i]))
            for j in nz:
                if j != piv:
                    q = row[j] // row[piv]
                    row[j] -= q * row[piv]
                    for r in range(n):
                        u[r][j] -= q * u[r][piv]
        piv = next(i for i in range(n) if row[i])
        if value % row[piv]:
            return None
        t = value // row[piv]
        return [u[r][piv] * t for r in range(n)]

    def candidates(self, k: int, m: int, accepted: Sequence[Root]) -> list[Root]:
        L = self.L
        v0 = self._particular(-m)
        if v0 is None:
            return []
        h = [L.dot(b, v0) for b in self.basis]
        c = linalg.mat_vec(self.gk_inv, h)
        target = k - L.norm(v0) + sum(ci * hi for ci, hi in zip(c, h))
        center = [-ci for ci in c]
        cons = []
        for w in accepted:
            normal = tuple(L.dot(b, w.vec) for b in self.basis)
            cons.append(EnumConstraint(normal, "le", -L.dot(v0, w.vec)))
        out = []
        for y in iter_vectors(self.gk, target, cons, center=center):
            v = tuple(v0[t] + sum(yi * b[t] for yi, b in zip(y, self.basis)) for t in range(L.rank))
            if root_norm_of(L, v) == k:
                out.append(Root(v, k))
        return sorted(out)


def _frame_for(L: Lattice, p: Sequence[int], accepted: Sequence[Root]):
    level0 = [w for w in accepted if L.dot(p, w.vec) == 0]
    if len(level0) == L.rank - 1 and linalg.rank([w.vec for w in level0]) == L.rank - 1:
        return _ConeFrame(L, p, level0)
    return _AffineFrame(L, p)


def candidates_at_level(L: Lattice, p: Sequence[int], d, accepted: Sequence[Root], frame=None) -> list[Root]:
    """All roots at level d with p.v < 0 and v.w <= 0 for every accepted w.

    2-roots come first, each group in lexicographic order.
    """
    if frame is None:
        frame = _frame_for(L, p, accepted)
    out: list[Root] = []
    for k, m in pairs_for_level(L, p, d):
        if isinstance(frame, _ConeFrame):
            higher = [w for w in accepted if L.dot(p, w.vec) != 0]
            found = frame.candidates(k, m, higher)
        else:
            found = frame.candidates(k, m, accepted)
        out.extend(found)
    return out


# ------------------------------------------------------------- termination

def check_termination(run: VinbergRun, graph: CoxeterGraph | None = None) -> TerminationReport:
    """Certify finite volume of the polyhedron cut out by the accepted walls."""
    L = run.lattice
    G = graph or run.graph()
    n = L.rank - 1
    root_rank = linalg.rank([r.vec for r in G.roots]) if G.size else 0
    detail: dict = {"root_rank": root_rank, "vertices": G.size}
    if root_rank < L.rank:
        detail["reason"] = "walls do not span"
        return TerminationReport(RUNNING, None, detail)

    dotted = has_dotted_edge(G)
    detail["dotted_edges"] = dotted
    start = start_vertex(run)
    if G.size > COMBINATORIAL_LIMIT and start is not None:
        # subset enumeration blows up on large diagrams; walk the edge graph instead
        walk = edge_walk(L, G.roots, start, G)
        detail.update(walk.detail())
        detail["method"] = "edge-walk"
        if not walk.ok:
            return TerminationReport(RUNNING, None, detail)
        return TerminationReport(TERMINATED, ELLIPTIC_EXTENSION, detail)
    return _combinatorial_certificate(G, n, dotted, detail)


def _combinatorial_certificate(G: CoxeterGraph, n: int, dotted: bool, detail: dict) -> TerminationReport:
    detail["method"] = "subdiagram-census"
    if not dotted:
        maximal = parabolic_sets_of_rank(G, n - 1)
        comps = {c for _, cs in maximal for c in cs}
        conn = connected_parabolic_sets(G)
        uncovered = [sorted(s) for s, _ in conn if s not in comps]
        detail["connected_parabolic"] = len(conn)
        detail["maximal_parabolic"] = [
            [sorted(c) for c in cs] for _, cs in maximal
        ]
        if not uncovered:
            return TerminationReport(TERMINATED, PARABOLIC_COVER, detail)
        detail["uncovered_parabolic"] = uncovered[:5]

    ok, info = _elliptic_extension(G, n)
    detail.update(info)
    if ok:
        return TerminationReport(TERMINATED, ELLIPTIC_EXTENSION, detail)
    return TerminationReport(RUNNING, None, detail)


def _elliptic_extension(G: CoxeterGraph, n: int) -> tuple[bool, dict]:
    """Every elliptic (n-1)-set must extend to exactly two vertices; stops at the first failure."""
    cusps = [s for s, _ in parabolic_sets_of_rank(G, n - 1)]
    edges = 0
    for e in iter_elliptic_sets(G, n - 1):
        edges += 1
        ext = sum(1 for c in cusps if e <= c)
        for x in range(G.size):
            if ext > 2:
                break
            if x not in e and is_elliptic(G, e | {x}):
                ext += 1
        if ext != 2:
            return False, {"elliptic_checked": edges, "first_failing": sorted(e), "extensions": ext}
    if edges == 0:
        return False, {"elliptic_checked": 0}
    return True, {"elliptic_checked": edges}


@dataclass
class EdgeWalk:
    """Outcome of walking the 1-skeleton of the polyhedron from one finite vertex."""

    ok: bool
    finite: set = field(default_factory=set)
    ideal: set = field(default_factory=set)
    edges: int = 0
    failure: dict | None = None

    def detail(self) -> dict:
        out = {"walk_finite_vertices": len(self.finite), "walk_ideal_vertices": len(self.ideal),
               "walk_edges": self.edges}
        if self.failure:
            out["walk_failure"] = self.failure
        return out


def _primitive(v: Sequence) -> tuple[int, ...]:
    den = linalg.common_denominator(v)
    w = [int(x * den) for x in v]
    g = 0
    for x in w:
        g = gcd(g, x)
    return tuple(x // g for x in w)


def _sector_rays(cov: Sequence[Sequence[int]], a: Sequence[int], b: Sequence[int]) -> list[tuple[int, int]] | None:
    """Extreme rays (s, t) of {s a + t b : every covector is <= 0}, or None if not a pointed 2-d sector."""
    cons = []
    for c in cov:
        al = sum(x * y for x, y in zip(c, a))
        be = sum(x * y for x, y in zip(c, b))
        if al or be:
            cons.append((al, be))
    rays = set()
    for al, be in cons:
        for u in ((be, -al), (-be, al)):
            if all(x * u[0] + y * u[1] <= 0 for x, y in cons):
                rays.add(_primitive(u))
    rays = sorted(rays)
    if len(rays) != 2 or rays[0] == tuple(-x for x in rays[1]):
        return None
    return rays


def _dot(c: Sequence, x: Sequence):
    return sum(a * b for a, b in zip(c, x))


def edge_walk(L: Lattice, roots: Sequence[Root], start: Iterable[int], graph: CoxeterGraph | None = None) -> EdgeWalk:
    """Check that every edge reachable from the finite vertex ``start`` ends properly.

    An edge is the line orthogonal to an elliptic (n-1)-set of walls.  Each
    end must be timelike (a finite vertex, an elliptic n-set) or null with a
    parabolic rank n-1 set of walls through it (a cusp).  The edge graph of
    the wall cone is connected, so when every reached edge ends properly the
    polyhedron has finite volume and the vertex sets found are all of them.
    """
    G = graph or build_coxeter_graph(L, roots)
    n = L.rank - 1
    cov = [linalg.mat_vec(L.gram, r.vec) for r in roots]
    walls = range(len(roots))
    walk = EdgeWalk(ok=True)
    start = frozenset(start)
    if len(start) != n or not is_elliptic(G, start):
        raise ValueError("start is not an elliptic n-set")
    walk.finite.add(start)
    (p0,) = linalg.nullspace([cov[i] for i in sorted(start)], L.rank)
    if any(_dot(cov[k], p0) > 0 for k in walls):
        p0 = [-x for x in p0]
    points = {start: p0}
    queue: list[tuple[str, frozenset[int]]] = [("finite", start)]
    done: set[frozenset[int]] = set()

    def fail(reason: str, edge) -> EdgeWalk:
        walk.ok = False
        walk.failure = {"reason": reason, "edge": sorted(edge)}
        return walk

    def arrive(x: Sequence, edge) -> str | None:
        """Register the vertex at point x; a failure reason if it is not proper."""
        x = _primitive(x)
        tight = frozenset(j for j in walls if _dot(cov[j], x) == 0)
        q = L.norm(x)
        if q < 0:
            if len(tight) != n or not is_elliptic(G, tight):
                return "non-simple finite vertex"
            if tight not in walk.finite:
                walk.finite.add(tight)
                points[tight] = x
                queue.append(("finite", tight))
        elif q == 0:
            if classify_subdiagram(G, tight) != SubdiagramClass("Parabolic", n - 1):
                return "ideal vertex is not a cusp"
            if tight not in walk.ideal:
                walk.ideal.add(tight)
                queue.append(("ideal", tight))
        else:
            return "edge leaves hyperbolic space"
        return None

    while queue:
        kind, V = queue.pop()
        if kind == "finite":
            order = sorted(V)
            u = points.pop(V)
            c = [_dot(cov[k], u) for k in walls]
            if any(x > 0 for x in c):
                return fail("vertex outside the polyhedron", V)
            # columns of B^-1 give, per wall of V, the direction leaving it along its edge
            scale, binv = linalg.scaled_inverse([cov[i] for i in order] + [linalg.mat_vec(L.gram, u)])
            sign = 1 if scale > 0 else -1
            for j, v in enumerate(order):
                e = V - {v}
                if e in done:
                    continue
                done.add(e)
                walk.edges += 1
                d = [sign * binv[r][j] for r in range(L.rank)]
                # the edge is u - t d for t >= 0; wall k is reached at t = c_k / delta_k
                best = None
                for k in walls:
                    if k in V:
                        continue
                    delta = _dot(cov[k], d)
                    if delta < 0 and (best is None or c[k] * best[1] < best[0] * delta):
                        best = (c[k], delta)
                if best is None:
                    return fail("edge reaches infinity without a cusp", e)
                ck, dk = best
                reason = arrive([-dk * a + ck * b for a, b in zip(u, d)], e)
                if reason:
                    return fail(reason, e)
        else:
            for drop in itertools.product(*[sorted(comp) for comp in G.components(V)]):
                e = frozenset(V - set(drop))
                if e in done:
                    continue
                done.add(e)
                walk.edges += 1
                plane = linalg.nullspace([cov[i] for i in sorted(e)], L.rank)
                if len(plane) != 2:
                    return fail("degenerate edge", e)
                a, b = plane
                rays = _sector_rays([cov[k] for k in walls if k not in e], a, b)
                if rays is None:
                    return fail("unbounded edge", e)
                ends = [[s_ * x + t_ * y for x, y in zip(a, b)] for s_, t_ in rays]
                if L.dot(ends[0], ends[1]) >= 0:
                    return fail("edge leaves hyperbolic space", e)
                for x in ends:
                    reason = arrive(x, e)
                    if reason:
                        return fail(reason, e)
    return walk


def start_vertex(run: VinbergRun) -> frozenset[int] | None:
    """The base point's vertex when the level-0 walls are n independent walls."""
    idx = [i for i, (_, d) in enumerate(run.accepted) if d == 0]
    if len(idx) != run.lattice.rank - 1 or run.level0_rank != len(idx):
        return None
    return frozenset(idx)


def face_census(run: VinbergRun, graph: CoxeterGraph | None = None) -> tuple[int, int]:
    """(finite vertices, vertices at infinity) of a terminated run's polyhedron."""
    if run.termination.status != TERMINATED:
        raise ValueError("face census needs a terminated run")
    G = graph or run.graph()
    n = run.lattice.rank - 1
    start = start_vertex(run)
    if G.size > COMBINATORIAL_LIMIT and start is not None:
        walk = edge_walk(run.lattice, G.roots, start, G)
        return len(walk.finite), len(walk.ideal)
    finite = len(elliptic_sets_of_size(G, n))
    ideal = len(parabolic_sets_of_rank(G, n - 1))
    return finite, ideal


# ------------------------------------------------------------------ driver

def vinberg_run(
    L: Lattice,
    p: Sequence[int] | None = None,
    max_level=DEFAULT_MAX_LEVEL,
    functional: Sequence[int] | None = None,
    labeller=None,
    check_every_level: bool = True,
) -> VinbergRun:
    """Accumulate walls level by level until a termination criterion certifies."""
    if p is None:
        p = default_base_point(L)
    p = tuple(p)
    if len(p) != L.rank or L.norm(p) >= 0:
        raise ValueError("base point must be a lattice vector of negative square")
    if functional is None:
        functional = default_functional(L)
    max_level = Fraction(max_level)

    zero = roots_in_hyperplane(L, p, 2) + roots_in_hyperplane(L, p, 6)
    level0 = simple_root_basis(L, zero, functional)
    accepted: list[tuple[Root, Fraction]] = [(r, Fraction(0)) for r in level0]
    run = VinbergRun(L, p, accepted, TerminationReport(), level0_rank=linalg.rank([r.vec for r in level0]) if level0 else 0)
    frame = _frame_for(L, p, level0)
    log.info("%s: %d level-0 roots (rank %d)", L.name, len(level0), run.level0_rank)

    def relabel():
        run.labels = labeller(run) if labeller else [f"v{i + 1}" for i in range(len(run.accepted))]

    def certify():
        relabel()
        run.termination = check_termination(run)
        return run.termination.status == TERMINATED

    if check_every_level and certify():
        return run
    last = Fraction(0)
    for d, pairs in level_grid(L, p, max_level):
        roots = [r for r, _ in run.accepted]
        new: list[Root] = []
        for k, m in pairs:
            if isinstance(frame, _ConeFrame):
                higher = [w for w in roots if L.dot(p, w.vec) != 0]
                new.extend(frame.candidates(k, m, higher))
            else:
                new.extend(frame.candidates(k, m, roots))
        last = d
        if not new:
            continue
        for a in new:
            for b in new:
                if a is not b and L.dot(a.vec, b.vec) > 0:
                    raise AssertionError(f"roots at level {d} have positive product")
        run.accepted.extend((r, d) for r in new)
        log.info("%s: level %s -> %d root(s)", L.name, d, len(new))
        if check_every_level and certify():
            return run
    if not check_every_level and certify():
        return run
    relabel()
    run.termination = TerminationReport(EXHAUSTED, None, dict(run.termination.detail, max_level=str(max_level)))
    return run


# -------------------------------------------------------------------- JSON

def run_to_dict(run: VinbergRun) -> dict:
    roots = []
    for (r, d), label in zip(run.accepted, run.labels or [None] * len(run.accepted)):
        roots.append({
            "label": label,
            "coords": list(r.vec),
            "norm": r.norm,
            "level_num": d.numerator,
            "level_den": d.denominator,
        })
    return {
        "lattice": [s.to_dict() for s in run.lattice.spec],
        "base_point": list(run.base_point),
        "roots": roots,
        "termination": {
            "status": run.termination.status,
            "criterion": run.termination.criterion,
        },
    }


def dump_run(run: VinbergRun) -> str:
    return json.dumps(run_to_dict(run), indent=1) + "\n"


def run_from_dict(doc: dict) -> VinbergRun:
    try:
        spec = parse_lattice_spec(json.dumps(doc["lattice"]))
        L = build_lattice(spec)
        p = tuple(int(x) for x in doc["base_point"])
        accepted, labels = [], []
        for i, r in enumerate(doc["roots"]):
            root = Root(tuple(int(x) for x in r["coords"]), int(r["norm"]))
            if root_norm_of(L, root.vec) != root.norm:
                raise ValueError(f"entry {i} is not a {root.norm}-root")
            accepted.append((root, Fraction(r["level_num"], r["level_den"])))
            labels.append(r.get("label") or f"v{i + 1}")
        term = doc["termination"]
        report = TerminationReport(term["status"], term.get("criterion"))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed run document: {exc}") from None
    return VinbergRun(L, p, accepted, report, labels=labels)


def load_run(text: str) -> VinbergRun:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"corrupt run document: {exc}") from None
    if not isinstance(doc, dict):
        raise ValueError("run document must be a JSON object")
    return run_from_dict(doc)
