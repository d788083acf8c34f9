"""Coxeter graphs of root sets: subdiagrams, automorphisms and DOT output."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from . import linalg
from .lattice import Lattice
from .roots import Root, root_norm_of

WHITE, BLACK = "white", "black"


@dataclass(frozen=True)
class SubdiagramClass:
    kind: str  # Elliptic | Parabolic | Lanner | Indefinite
    rank: int | None = None

    def __str__(self) -> str:
        return f"{self.kind}({self.rank})" if self.rank is not None else self.kind


@dataclass(frozen=True)
class GraphSymmetry:
    """perm[i] is the image of vertex ``domain[i]``."""

    domain: tuple[int, ...]
    perm: tuple[int, ...]

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.domain, self.perm))

    def is_identity(self) -> bool:
        return self.domain == self.perm


@dataclass(eq=False)
class CoxeterGraph:
    roots: tuple[Root, ...]
    labels: tuple[str, ...]
    gram: tuple[tuple[int, ...], ...]
    weights: tuple[tuple[int, ...], ...]
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.roots)

    def color(self, i: int) -> str:
        return WHITE if self.roots[i].norm == 2 else BLACK

    def neighbours(self, i: int) -> list[int]:
        return [j for j in range(self.size) if j != i and self.weights[i][j]]

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(self.neighbours(i)) for i in range(self.size))

    def edges(self) -> list[tuple[int, int, int]]:
        return [(i, j, self.weights[i][j]) for i in range(self.size)
                for j in range(i + 1, self.size) if self.weights[i][j]]

    def sub_gram(self, J: Iterable[int]) -> list[list[int]]:
        J = list(J)
        return [[self.gram[a][b] for b in J] for a in J]

    def components(self, J: Iterable[int]) -> list[frozenset[int]]:
        left = set(J)
        out = []
        while left:
            start = min(left)
            comp = {start}
            stack = [start]
            while stack:
                a = stack.pop()
                for b in self.adjacency[a]:
                    if b in left and b not in comp:
                        comp.add(b)
                        stack.append(b)
            left -= comp
            out.append(frozenset(comp))
        return out

    def index(self, label: str) -> int:
        return self.labels.index(label)


def build_coxeter_graph(L: Lattice, roots: Sequence[Root], labels: Sequence[str] | None = None) -> CoxeterGraph:
    for r in roots:
        if root_norm_of(L, r.vec) != r.norm:
            raise ValueError(f"{r.vec} is not a {r.norm}-root of {L.name}")
    n = len(roots)
    gram = [[L.dot(a.vec, b.vec) for b in roots] for a in roots]
    weights = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j:
                w = Fraction(4 * gram[i][j] ** 2, roots[i].norm * roots[j].norm)
                if w.denominator != 1:
                    raise ValueError("non-integral edge weight; inputs are not roots")
                weights[i][j] = w.numerator
    if labels is None:
        labels = [f"v{i + 1}" for i in range(n)]
    return CoxeterGraph(
        roots=tuple(roots),
        labels=tuple(labels),
        gram=tuple(tuple(r) for r in gram),
        weights=tuple(tuple(r) for r in weights),
    )


# ---------------------------------------------------------------- definiteness

def _component_kind(G: CoxeterGraph, comp: frozenset[int]) -> tuple[str, int | None]:
    """Kind of a connected vertex set: E(lliptic), P(arabolic) or X (neither)."""
    key = ("comp", comp)
    hit = G._cache.get(key)
    if hit is not None:
        return hit
    if "ell_set" in G._cache:
        # the connected families are complete, so membership decides
        if comp in G._cache["ell_set"]:
            res = ("E", len(comp))
        elif comp in G._cache["par_set"]:
            res = ("P", len(comp) - 1)
        else:
            res = ("X", None)
        return res
    pos, neg, zero = linalg.inertia(G.sub_gram(sorted(comp)))
    if neg == 0 and zero == 0:
        res = ("E", len(comp))
    elif neg == 0 and zero == 1:
        res = ("P", len(comp) - 1)
    else:
        res = ("X", None)
    G._cache[key] = res
    return res


def is_elliptic(G: CoxeterGraph, J: Iterable[int]) -> bool:
    return all(_component_kind(G, c)[0] == "E" for c in G.components(J))


def classify_subdiagram(G: CoxeterGraph, J: Iterable[int]) -> SubdiagramClass:
    """Classify by exact definiteness of the Gram submatrix of J."""
    J = frozenset(J)
    if not J:
        raise ValueError("empty subdiagram")
    kinds = [_component_kind(G, c) for c in G.components(J)]
    if all(k == "E" for k, _ in kinds):
        return SubdiagramClass("Elliptic", len(J))
    if all(k == "P" for k, _ in kinds):
        return SubdiagramClass("Parabolic", sum(r for _, r in kinds))
    # critical non-degenerate: every maximal proper subset elliptic
    if len(J) >= 2 and all(is_elliptic(G, J - {x}) for x in J):
        _, _, zero = linalg.inertia(G.sub_gram(sorted(J)))
        if zero == 0:
            return SubdiagramClass("Lanner")
    return SubdiagramClass("Indefinite")


def _grow_connected(G: CoxeterGraph) -> None:
    """All connected elliptic and connected parabolic vertex sets.

    Sets grow by one neighbour at a time from elliptic sets.  With G_s
    positive definite, s + x is positive definite iff det G_{s+x} =
    det(G_s) x^2 - g^T adj(G_s) g is positive, and positive semidefinite
    of corank 1 iff it vanishes.  The integer adjugate is carried along:
    adj_{s+x} = [[(adj det' + a a^T) / det, -a], [-a^T, det]] with a = adj g.
    Every connected parabolic set arises this way (drop a leaf of a
    spanning tree), so both families are complete.
    """
    gram = G.gram
    ell: list[frozenset[int]] = []
    par: set[frozenset[int]] = set()
    seen: set[frozenset[int]] = set()
    frontier: list[tuple[frozenset[int], tuple[int, ...], list[list[int]], int]] = []
    for i in range(G.size):
        s = frozenset([i])
        seen.add(s)
        ell.append(s)
        frontier.append((s, (i,), [[1]], gram[i][i]))
    while frontier:
        nxt = []
        for s, order, adj, det in frontier:
            nb = set().union(*(G.adjacency[a] for a in s)) - s
            for x in sorted(nb):
                t = s | {x}
                if t in seen:
                    continue
                seen.add(t)
                g = [(k, gram[x][a]) for k, a in enumerate(order) if gram[x][a]]
                a = [sum(row[k] * gk for k, gk in g) for row in adj]
                new_det = det * gram[x][x] - sum(gk * a[k] for k, gk in g)
                if new_det > 0:
                    ell.append(t)
                    m = len(order)
                    new_adj = [[(adj[i][j] * new_det + a[i] * a[j]) // det for j in range(m)] + [-a[i]]
                               for i in range(m)]
                    new_adj.append([-x_ for x_ in a] + [det])
                    nxt.append((t, order + (x,), new_adj, new_det))
                elif new_det == 0:
                    par.add(t)
        frontier = nxt
    ell.sort(key=lambda s: (len(s), sorted(s)))
    G._cache["conn_ell"] = ell
    G._cache["conn_par"] = sorted(((t, len(t) - 1) for t in par), key=lambda p: (len(p[0]), sorted(p[0])))
    G._cache["ell_set"] = frozenset(ell)
    G._cache["par_set"] = frozenset(par)


def connected_elliptic_sets(G: CoxeterGraph) -> list[frozenset[int]]:
    """Every connected elliptic vertex set."""
    if "conn_ell" not in G._cache:
        _grow_connected(G)
    return G._cache["conn_ell"]


def connected_parabolic_sets(G: CoxeterGraph) -> list[tuple[frozenset[int], int]]:
    """Every connected parabolic vertex set with its rank (= size - 1)."""
    if "conn_par" not in G._cache:
        _grow_connected(G)
    return G._cache["conn_par"]


def _separated(G: CoxeterGraph, a: frozenset[int], b: frozenset[int]) -> bool:
    if a & b:
        return False
    return not any(G.adjacency[x] & b for x in a)


def _masks(G: CoxeterGraph) -> list[int]:
    hit = G._cache.get("masks")
    if hit is None:
        hit = [sum(1 << j for j in G.adjacency[i]) for i in range(G.size)]
        G._cache["masks"] = hit
    return hit


def _bits(s: frozenset[int]) -> int:
    return sum(1 << i for i in s)


def _union_search(G: CoxeterGraph, pieces, size_of, total: int):
    """Yield (vertex set, pieces) for unions of pairwise separated pieces with
    sizes summing to ``total``; each union is produced once, pieces ordered by
    minimum vertex.  Prunes when too few free vertices remain."""
    adj = _masks(G)
    by_min: dict[int, list] = {}
    for p in pieces:
        by_min.setdefault(min(p), []).append((p, _bits(p), size_of(p)))
    nbr_of = {}
    for plist in by_min.values():
        for p, b, _ in plist:
            m = 0
            for i in p:
                m |= adj[i]
            nbr_of[b] = m & ~b
    full = (1 << G.size) - 1

    def rec(start: int, chosen: int, blocked: int, parts: list, remaining: int):
        if remaining == 0:
            yield parts
            return
        free = full & ~(chosen | blocked) & ~((1 << start) - 1)
        if bin(free).count("1") < remaining:
            return
        while free:
            low = free & -free
            m = low.bit_length() - 1
            free ^= low
            for p, b, sz in by_min.get(m, ()):
                if sz > remaining or b & (chosen | blocked):
                    continue
                parts.append(p)
                yield from rec(m + 1, chosen | b, blocked | nbr_of[b], parts, remaining - sz)
                parts.pop()

    for parts in rec(0, 0, 0, [], total):
        yield frozenset().union(*parts), tuple(parts)


def iter_elliptic_sets(G: CoxeterGraph, size: int) -> Iterator[frozenset[int]]:
    """Elliptic subdiagrams with ``size`` vertices (rank == size), lazily."""
    if size <= 0:
        return
    for s, _ in _union_search(G, connected_elliptic_sets(G), len, size):
        yield s


def elliptic_sets_of_size(G: CoxeterGraph, size: int) -> list[frozenset[int]]:
    """Elliptic subdiagrams with ``size`` vertices (rank == size)."""
    key = ("ell", size)
    if key not in G._cache:
        G._cache[key] = sorted(iter_elliptic_sets(G, size), key=sorted)
    return G._cache[key]


def parabolic_sets_of_rank(G: CoxeterGraph, rank: int) -> list[tuple[frozenset[int], tuple[frozenset[int], ...]]]:
    """Parabolic subdiagrams of the given rank as (vertex set, components)."""
    key = ("par", rank)
    if key in G._cache:
        return G._cache[key]
    pieces = [p for p, _ in connected_parabolic_sets(G)]
    uniq: dict[frozenset[int], tuple[frozenset[int], ...]] = {}
    if rank > 0:
        for s, parts in _union_search(G, pieces, lambda p: len(p) - 1, rank):
            uniq.setdefault(s, parts)
    res = sorted(uniq.items(), key=lambda kv: sorted(kv[0]))
    G._cache[key] = res
    return res


def enumerate_subdiagrams(G: CoxeterGraph, kind: str, rank: int) -> list[frozenset[int]]:
    """All vertex subsets of the requested class and rank."""
    if kind == "Elliptic":
        return elliptic_sets_of_size(G, rank)
    if kind == "Parabolic":
        return [s for s, _ in parabolic_sets_of_rank(G, rank)]
    if kind == "Lanner":
        return [frozenset((i, j)) for i, j, w in G.edges() if w > 4]
    raise ValueError(f"unsupported subdiagram kind {kind!r}")


def has_dotted_edge(G: CoxeterGraph) -> bool:
    return any(w > 4 for _, _, w in G.edges())


# ------------------------------------------------------------- shape names

def elliptic_type(G: CoxeterGraph, J: Iterable[int]) -> str | None:
    """Name (A_n, D_n, E_6..8, G_2) of a connected elliptic subdiagram."""
    J = sorted(J)
    n = len(J)
    if n == 1:
        return "A1"
    sub = {a: [b for b in J if b != a and G.weights[a][b]] for a in J}
    ws = {G.weights[a][b] for a in J for b in sub[a]}
    if ws == {3} and n == 2:
        return "G2"
    if ws != {1}:
        return None
    deg = {a: len(sub[a]) for a in J}
    edges = sum(deg.values()) // 2
    if edges != n - 1:
        return None
    branch = [a for a in J if deg[a] >= 3]
    if not branch:
        return f"A{n}" if max(deg.values()) <= 2 else None
    if len(branch) > 1 or deg[branch[0]] > 3:
        return None
    b = branch[0]
    arms = []
    for start in sub[b]:
        length, prev, cur = 1, b, start
        while deg[cur] == 2:
            nxt = next(x for x in sub[cur] if x != prev)
            prev, cur = cur, nxt
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return f"D{n}"
    if arms[:2] == [1, 2] and arms[2] in (2, 3, 4):
        return f"E{n}"
    return None


# ------------------------------------------------------------- automorphisms

def graph_automorphisms(G: CoxeterGraph, J: Sequence[int] | None = None) -> list[GraphSymmetry]:
    """All colour- and weight-preserving permutations of the subgraph on J.

    Backtracking over vertices ordered by a refined invariant (colour,
    weight multiset, neighbour-invariant multiset), mapping each vertex to
    candidates of the same class that agree on every already-mapped pair.
    """
    dom = tuple(sorted(range(G.size) if J is None else J))
    inside = set(dom)

    def wsig(a):
        return (G.color(a), tuple(sorted(G.weights[a][b] for b in dom if b != a and G.weights[a][b])))

    inv = {a: wsig(a) for a in dom}
    for _ in range(3):
        inv = {
            a: (inv[a], tuple(sorted((G.weights[a][b], inv[b]) for b in dom if b != a and G.weights[a][b])))
            for a in dom
        }
    classes: dict = {}
    for a in dom:
        classes.setdefault(inv[a], []).append(a)
    # order: smallest classes first, then connectivity to mapped vertices
    order: list[int] = []
    remaining = set(dom)
    while remaining:
        best = min(
            remaining,
            key=lambda a: (
                -sum(1 for b in order if G.weights[a][b]),
                len(classes[inv[a]]),
                a,
            ),
        )
        order.append(best)
        remaining.remove(best)

    result: list[GraphSymmetry] = []
    image: dict[int, int] = {}
    used: set[int] = set()

    def rec(k: int):
        if k == len(order):
            result.append(GraphSymmetry(dom, tuple(image[a] for a in dom)))
            return
        a = order[k]
        for b in classes[inv[a]]:
            if b in used:
                continue
            if all(G.weights[a][c] == G.weights[b][image[c]] for c in order[:k]):
                image[a] = b
                used.add(b)
                rec(k + 1)
                used.discard(b)
                del image[a]

    assert inside == set(dom)
    rec(0)
    result.sort(key=lambda s: (not s.is_identity(), s.perm))
    return result


# ------------------------------------------------------------------- DOT

def to_dot(G: CoxeterGraph, name: str = "coxeter") -> str:
    lines = [f'graph "{name}" {{']
    for i in range(G.size):
        fill = "white" if G.color(i) == WHITE else "black"
        font = "" if fill == "white" else ",fontcolor=white"
        lines.append(f'  "{G.labels[i]}" [shape=circle,style=filled,fillcolor={fill}{font}];')
    for i, j, w in G.edges():
        if w == 1:
            attr = ""
        elif w == 3:
            attr = ' [label="6"]'
        elif w == 4:
            attr = " [style=bold]"
        else:
            attr = f' [style=dashed,comment="weight {w}"]'
        lines.append(f'  "{G.labels[i]}" -- "{G.labels[j]}"{attr};')
    lines.append("}")
    return "\n".join(lines) + "\n"
