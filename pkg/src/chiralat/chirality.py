"""Lattice isometries from graph symmetries, the Z/3 sign, and chirality verdicts."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from . import linalg
from .coxeter import CoxeterGraph, GraphSymmetry, graph_automorphisms
from .discriminant import discriminant_group, primary_part
from .lattice import Lattice, LatticeSpec, Summand, build_lattice, spec_name
from .roots import Root, root_norm_of
from .vinberg import TERMINATED, VinbergRun, run_to_dict, vinberg_run

log = logging.getLogger(__name__)

CHIRAL, ACHIRAL, UNKNOWN = "Chiral", "Achiral", "Unknown"

# classification runs go deeper than plain runs: U+A2+2E8 only certifies at level 300
CLASSIFY_MAX_LEVEL = 512


@dataclass(frozen=True)
class Isometry:
    matrix: tuple[tuple[int, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> Isometry:
        return cls(tuple(tuple(int(x) for x in r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> Isometry:
        return cls.from_rows(linalg.identity(n))

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def apply(self, v: Sequence) -> tuple:
        return tuple(linalg.mat_vec(self.matrix, v))

    def compose(self, other: Isometry) -> Isometry:
        """self after other."""
        return Isometry.from_rows(linalg.mat_mul(self.matrix, other.matrix))

    def inverse(self, L: Lattice) -> Isometry:
        """G^-1 f^T G, exact for any isometry of L."""
        g = L.gram
        m = linalg.mat_mul(linalg.mat_mul(linalg.inverse(g), linalg.transpose(self.matrix)), g)
        return Isometry.from_rows([linalg.to_int(r) for r in m])

    def negate(self) -> Isometry:
        return Isometry.from_rows([[-x for x in r] for r in self.matrix])


def is_isometry(L: Lattice, f: Isometry) -> bool:
    m = f.matrix
    return linalg.mat_mul(linalg.transpose(m), linalg.mat_mul(L.gram, m)) == [list(r) for r in L.gram]


def reflection_matrix(L: Lattice, v: Root | Sequence[int], anti: bool = False) -> Isometry:
    """x -> x - 2(x.v)/v^2 v, or its negative."""
    vec = tuple(v.vec) if isinstance(v, Root) else tuple(v)
    k = root_norm_of(L, vec)
    if k is None:
        raise ValueError(f"{vec} is not a root of {L.name}")
    gv = linalg.mat_vec(L.gram, vec)
    n = L.rank
    rows = [[0] * n for _ in range(n)]
    for j in range(n):
        c = Fraction(2 * gv[j], k)
        if c.denominator != 1:
            raise ValueError("reflection is not integral")
        for i in range(n):
            rows[i][j] = int(i == j) - c.numerator * vec[i]
    if anti:
        rows = [[-x for x in r] for r in rows]
    return Isometry.from_rows(rows)


# --------------------------------------------------------------- lifting

def spans_over_z(vectors: Sequence[Sequence[int]], n: int) -> bool:
    if linalg.rank(vectors) < n:
        return False
    diag, _, _ = linalg.smith_normal_form([list(v) for v in vectors])
    return all(d == 1 for d in diag[:n])


def symmetry_to_isometry(L: Lattice, roots: Sequence[Root], sym: GraphSymmetry) -> Isometry | None:
    """The linear map extending the vertex permutation, if it is a lattice automorphism.

    None when the domain roots do not span L over Q or the extension is not integral.
    """
    src = [roots[i].vec for i in sym.domain]
    dst = [roots[i].vec for i in sym.perm]
    piv = linalg.row_echelon_pivots(src)
    if len(piv) < L.rank:
        return None
    xb = linalg.transpose([src[i] for i in piv])  # columns are basis roots
    yb = linalg.transpose([dst[i] for i in piv])
    m = linalg.mat_mul(yb, linalg.inverse(xb))
    for s, d in zip(src, dst):
        if [x for x in linalg.mat_vec(m, s)] != list(d):
            raise ValueError("vertex permutation does not preserve inner products")
    flat = [x for row in m for x in row]
    if not linalg.is_integral(flat):
        return None
    f = Isometry.from_rows([linalg.to_int(row) for row in m])
    if not is_isometry(L, f):
        raise ValueError("vertex permutation does not preserve inner products")
    return f


# ------------------------------------------------------ discriminant action

def discr_action(L: Lattice, f: Isometry) -> list[tuple[int, ...]]:
    """Row k: class of f(g_k) in terms of the generators g of L*/L."""
    D = discriminant_group(L)
    return [D.coords(f.apply(g)) for g in D.generator_lifts]


def delta3_sign(L: Lattice, f: Isometry) -> int:
    """+1 if f acts trivially on the 3-part of L*/L, -1 if by negation."""
    D3 = primary_part(discriminant_group(L), 3)
    if D3.invariant_factors != (3,):
        raise ValueError(f"3-part of the discriminant of {L.name or 'lattice'} is not Z/3")
    (a,) = D3.coords(f.apply(D3.generator_lifts[0]))
    if a == 1:
        return 1
    if a == 2:
        return -1
    raise ValueError("map does not act by +-1 on the 3-part")


def distinguished_summand(L: Lattice) -> int:
    """Index (into summand_offsets) of the first summand with 3 | det."""
    for idx, (_, s) in enumerate(L.summand_offsets):
        d = linalg.det(s.block())
        if d % 3 == 0:
            return idx
    raise ValueError(f"{L.name} has no summand carrying the Z/3")


def z3_shortcut(
    L: Lattice, roots: Sequence[Root], sym: GraphSymmetry, f: Isometry | None = None
) -> tuple[int, int | None]:
    """Sign read off from one 6-root and its image, plus that root's index.

    Compares the components in the distinguished summand modulo 3.  6-roots
    outside the symmetry's domain are moved by the lifted isometry ``f``.
    """
    part = L.block_slice(distinguished_summand(L))
    perm = sym.as_dict()
    moved: list[tuple[int, Sequence[int]]] = []
    for i, r in enumerate(roots):
        if r.norm != 6:
            continue
        if i in perm:
            moved.append((i, roots[perm[i]].vec))
        elif f is not None:
            moved.append((i, f.apply(r.vec)))
    if not moved:
        raise ValueError("no 6-root available to compare")
    for i, img in moved:
        diff = [a - b for a, b in zip(roots[i].vec[part], img[part])]
        if any(x % 3 for x in diff):
            return -1, i
    return 1, moved[0][0]


# ------------------------------------------------------------ reductions

def _lattice_from_gram(gram: Sequence[Sequence[int]], spec: LatticeSpec = ()) -> Lattice:
    gram_t = tuple(tuple(int(x) for x in r) for r in gram)
    pos, neg, zero = linalg.inertia(gram_t)
    if zero:
        raise ValueError("degenerate sublattice")
    return Lattice(spec=spec, gram=gram_t, summand_offsets=(), signature=(pos, neg), det=linalg.det(gram_t))


def restrict_to_orthogonal(
    L: Lattice, f: Isometry, v: Sequence[int], basis: Sequence[Sequence[int]] | None = None
) -> tuple[Lattice, Isometry]:
    """f on the sublattice {x : x.v = 0}, in the given (or a computed) basis."""
    v = tuple(v)
    if f.apply(v) != v:
        raise ValueError("isometry does not fix v")
    if basis is None:
        basis = linalg.functional_kernel(linalg.mat_vec(L.gram, v))
    basis = [list(b) for b in basis]
    if any(L.dot(b, v) for b in basis) or len(basis) != L.rank - 1:
        raise ValueError("basis does not span the orthogonal complement")
    piv_cols = linalg.row_echelon_pivots(linalg.transpose(basis))
    sub = [[b[c] for c in piv_cols] for b in basis]  # square, invertible
    sub_inv = linalg.inverse(linalg.transpose(sub))
    cols = []
    for b in basis:
        img = f.apply(b)
        y = linalg.mat_vec(sub_inv, [img[c] for c in piv_cols])
        back = [sum(yi * bb[t] for yi, bb in zip(y, basis)) for t in range(L.rank)]
        if back != list(img) or not linalg.is_integral(y):
            raise ValueError("basis is not a Z-basis of the orthogonal complement")
        cols.append(linalg.to_int(y))
    gram = [[L.dot(a, b) for b in basis] for a in basis]
    Lv = _lattice_from_gram(gram)
    fv = Isometry.from_rows(linalg.transpose(cols))
    if not is_isometry(Lv, fv):
        raise AssertionError("restriction is not an isometry")
    return Lv, fv


def extend_by_orthogonal_A1(Lv: Lattice, fv: Isometry, at: int | None = None) -> tuple[Lattice, Isometry]:
    """Lv + A1 with the new generator fixed; ``at`` is its coordinate (default last)."""
    n = Lv.rank
    at = n if at is None else at
    spec = tuple(Lv.spec) + (Summand("A", 1),) if Lv.spec and at == n else ()
    rows = [[0] * (n + 1) for _ in range(n + 1)]
    gram = [[0] * (n + 1) for _ in range(n + 1)]
    old = [i for i in range(n + 1) if i != at]
    for a, i in enumerate(old):
        for b, j in enumerate(old):
            rows[i][j] = fv.matrix[a][b]
            gram[i][j] = Lv.gram[a][b]
    rows[at][at] = 1
    gram[at][at] = 2
    L = build_lattice(spec) if spec else _lattice_from_gram(gram)
    if [list(r) for r in L.gram] != gram:
        L = _lattice_from_gram(gram)
    return L, Isometry.from_rows(rows)


def _drop_a1(L: Lattice) -> tuple[LatticeSpec, int] | None:
    """Spec with one A1 summand removed and that A1's coordinate."""
    for start, s in L.summand_offsets:
        if s.kind == "A" and s.n == 1 and s.scale == 1 and s.sign == 1:
            break
    else:
        return None
    out, removed = [], False
    for s in L.spec:
        if not removed and s.kind == "A" and s.n == 1 and s.scale == 1 and s.sign == 1:
            removed = True
            if s.count > 1:
                out.append(Summand("A", 1, count=s.count - 1))
            continue
        out.append(s)
    if not out:
        return None
    # the removed copy is the first A1 coordinate only when A1 copies are contiguous
    return tuple(out), start


def _is_minus_a1(s: Summand) -> bool:
    return s.kind == "diag" and tuple(e * s.sign * s.scale for e in s.entries) == (-2,)


def _swap_minus_a1_for_u(L: Lattice) -> tuple[LatticeSpec, int] | None:
    """Spec with the first -A1 replaced by U, and that summand's start coordinate."""
    out, pos = [], None
    for s in L.spec:
        if pos is None and _is_minus_a1(s):
            pos = sum(t.rank for t in out)
            out.append(Summand("U"))
            if s.count > 1:
                out.append(Summand(s.kind, s.n, s.entries, s.scale, s.sign, s.count - 1))
            continue
        out.append(s)
    if pos is None:
        return None
    return tuple(out), pos


# ---------------------------------------------------------------- verdicts

@dataclass
class Witness:
    isometry: Isometry
    sign: int
    symmetry: GraphSymmetry | None = None
    labels: tuple[str, ...] = ()
    black_vertex: str | None = None
    image_vertex: str | list | None = None
    permutes_walls: bool | None = None

    def to_dict(self) -> dict:
        perm = None
        if self.symmetry is not None:
            lab = self.labels
            perm = {lab[a]: lab[b] for a, b in zip(self.symmetry.domain, self.symmetry.perm) if a != b}
        return {
            "permutation": perm,
            "matrix": [list(r) for r in self.isometry.matrix],
            "black_vertex": self.black_vertex,
            "image_vertex": self.image_vertex,
        }


@dataclass
class ChiralityVerdict:
    lattice: Lattice
    verdict: str
    reason: str
    witness: Witness | None = None
    run: VinbergRun | None = None
    route: str = "direct"
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict == ACHIRAL and (self.witness is None or self.witness.sign != -1):
            raise ValueError("an achiral verdict needs a Z/3-reversing witness")

    def to_dict(self) -> dict:
        return {
            "lattice": [s.to_dict() for s in self.lattice.spec],
            "verdict": self.verdict,
            "reason": self.reason,
            "route": self.route,
            "detail": self.detail,
            "witness": self.witness.to_dict() if self.witness else None,
            "vinberg_run": run_to_dict(self.run) if self.run else None,
        }


def dump_verdict(v: ChiralityVerdict) -> str:
    return json.dumps(v.to_dict(), indent=1) + "\n"


def _all_norms_divisible_by_4(L: Lattice) -> bool:
    n = L.rank
    return all(L.gram[i][i] % 4 == 0 for i in range(n)) and all(
        L.gram[i][j] % 2 == 0 for i in range(n) for j in range(n)
    )


def _label_of(run: VinbergRun, vec: Sequence[int]) -> str | list:
    vec = tuple(vec)
    for r, lab in zip(run.roots, run.labels):
        if r.vec == vec:
            return lab
    return list(vec)


def _permutes_walls(run: VinbergRun, f: Isometry) -> bool:
    walls = {r.vec for r in run.roots}
    return all(f.apply(w) in walls for w in walls)


def _make_witness(run: VinbergRun, G: CoxeterGraph, sym: GraphSymmetry, f: Isometry, sign: int) -> Witness:
    black = img = None
    try:
        s, idx = z3_shortcut(run.lattice, G.roots, sym, f)
        if s != sign:
            log.warning("mod-3 shortcut disagrees with the discriminant sign")
        if idx is not None:
            black = G.labels[idx]
            img = _label_of(run, f.apply(G.roots[idx].vec))
    except ValueError:
        pass
    complete = run.termination.status == TERMINATED
    return Witness(
        isometry=f,
        sign=sign,
        symmetry=sym,
        labels=G.labels,
        black_vertex=black,
        image_vertex=img,
        permutes_walls=_permutes_walls(run, f) if complete else None,
    )


def lifted_symmetries(
    run: VinbergRun, G: CoxeterGraph, subsets: Iterable[Sequence[int]] = ()
) -> Iterator[tuple[str, GraphSymmetry, Isometry | None]]:
    """(source, symmetry, lift or None) for the full graph, then each subset.

    Full-graph symmetries are only offered for terminated runs.  Subsets are
    used only when their roots span the lattice over Z.
    """
    L = run.lattice
    if run.termination.status == TERMINATED:
        for sym in graph_automorphisms(G):
            yield "graph", sym, symmetry_to_isometry(L, G.roots, sym)
    for J in subsets:
        J = sorted(J)
        if not spans_over_z([G.roots[i].vec for i in J], L.rank):
            log.info("subset of %d roots does not span %s over Z; skipped", len(J), L.name)
            continue
        for sym in graph_automorphisms(G, J):
            yield "subset", sym, symmetry_to_isometry(L, G.roots, sym)


def reversing_witnesses(run: VinbergRun, subsets: Iterable[Sequence[int]] = ()) -> Iterator[Witness]:
    G = run.graph()
    for _, sym, f in lifted_symmetries(run, G, subsets):
        if f is not None and delta3_sign(run.lattice, f) == -1:
            yield _make_witness(run, G, sym, f, -1)


def _resolve_subsets(run: VinbergRun, subsets) -> list[list[int]]:
    from .presets import preset_subsets

    G_labels = list(run.labels)
    if subsets in (None, "preset"):
        named = preset_subsets(run.lattice.name)
    elif subsets == "auto":
        named = []
    else:
        named = [list(s) for s in subsets]
    out = []
    for s in named:
        try:
            out.append([G_labels.index(x) if isinstance(x, str) else int(x) for x in s])
        except ValueError:
            log.info("subset label missing from the run; skipped")
    if subsets in ("auto", "preset", None):
        white = [i for i, r in enumerate(run.roots) if r.norm == 2]
        if white and white not in out and len(white) < len(run.roots):
            out.append(white)
    return out


def preferred_witness(run: VinbergRun, G: CoxeterGraph | None = None) -> Witness | None:
    """The lattice's preset subset symmetry, lifted, if it exists and spans over Z."""
    from .presets import WITNESS_PRESETS

    preset = WITNESS_PRESETS.get(run.lattice.name)
    if preset is None:
        return None
    G = G or run.graph()
    labels = list(G.labels)
    try:
        if preset.subset == "white":
            J = [i for i, r in enumerate(G.roots) if r.norm == 2]
        else:
            J = [labels.index(x) for x in preset.subset]
        fixed = [labels.index(x) for x in preset.fixed]
        a, b = (labels.index(x) for x in preset.swap)
    except ValueError:
        return None
    if not spans_over_z([G.roots[i].vec for i in J], run.lattice.rank):
        return None
    for sym in graph_automorphisms(G, J):
        m = sym.as_dict()
        if all(m[i] == i for i in fixed) and m[a] == b and m[b] == a:
            f = symmetry_to_isometry(run.lattice, G.roots, sym)
            if f is not None:
                return _make_witness(run, G, sym, f, delta3_sign(run.lattice, f))
    return None


def classify_direct(
    L: Lattice,
    subsets="preset",
    max_level=CLASSIFY_MAX_LEVEL,
    run: VinbergRun | None = None,
) -> ChiralityVerdict:
    if run is None:
        run = cached_run(L, max_level)
    G = run.graph()
    terminated = run.termination.status == TERMINATED
    if subsets in (None, "preset"):
        w = preferred_witness(run, G)
        if w is not None and w.sign == -1:
            return ChiralityVerdict(L, ACHIRAL, "Z/3-reversing lift of a preset subset symmetry", w, run)
    subset_idx = _resolve_subsets(run, subsets)
    seen_graph, nonintegral = 0, 0
    for source, sym, f in lifted_symmetries(run, G, subset_idx):
        if f is None:
            nonintegral += source == "graph"
            seen_graph += source == "graph"
            continue
        seen_graph += source == "graph"
        s = delta3_sign(L, f)
        if s == -1:
            w = _make_witness(run, G, sym, f, s)
            return ChiralityVerdict(L, ACHIRAL, f"Z/3-reversing lift of a {source} symmetry", w, run)
    if not terminated:
        return ChiralityVerdict(L, UNKNOWN, "Vinberg not terminated", None, run)
    if linalg.rank([r.vec for r in run.roots]) < L.rank:
        return ChiralityVerdict(L, UNKNOWN, "walls do not span the lattice", None, run)
    reason = "trivial symmetry group" if seen_graph == 1 else "all symmetries Z/3-direct"
    return ChiralityVerdict(L, CHIRAL, reason, None, run, detail={"graph_symmetries": seen_graph, "non_integral": nonintegral})


def classify_chirality(
    L: Lattice | LatticeSpec | str,
    subsets="preset",
    max_level=CLASSIFY_MAX_LEVEL,
    reductions: bool = True,
    direct: bool = True,
) -> ChiralityVerdict:
    """Chiral / Achiral / Unknown for a hyperbolic lattice with discr_3 = Z/3.

    Order: extension from L minus an A1 summand, restriction from the lattice
    with -A1 replaced by U, then direct symmetry search.
    """
    if not isinstance(L, Lattice):
        L = build_lattice(L)
    if _all_norms_divisible_by_4(L):
        return ChiralityVerdict(L, UNKNOWN, "empty root system")
    if reductions:
        for route in (_via_a1_extension, _via_hyperplane_restriction):
            v = route(L, subsets, max_level)
            if v is not None:
                return v
    if direct:
        return classify_direct(L, subsets, max_level)
    return ChiralityVerdict(L, UNKNOWN, "no route applied")


def _classify_child(name, kwargs, conn) -> None:
    try:
        v = classify_chirality(name, **kwargs)
        w = v.witness
        conn.send(("ok", v.verdict, v.reason, v.route, w and (w.isometry.matrix, w.sign)))
    except Exception as exc:  # reported to the parent, which re-raises
        conn.send(("error", repr(exc)))
    finally:
        conn.close()


def classify_with_timeout(L: Lattice | str, timeout: float, **kwargs) -> ChiralityVerdict:
    """classify_chirality in a child process; Unknown if it does not finish in time.

    The returned verdict carries the witness isometry but not the Vinberg run.
    """
    import multiprocessing as mp

    if isinstance(L, str):
        L = build_lattice(L)
    recv, send = mp.Pipe(duplex=False)
    proc = mp.get_context("fork").Process(target=_classify_child, args=(L.spec, kwargs, send), daemon=True)
    proc.start()
    send.close()
    ready = recv.poll(timeout)
    msg = recv.recv() if ready else None
    if proc.is_alive():
        proc.terminate()
    proc.join()
    if msg is None:
        return ChiralityVerdict(L, UNKNOWN, f"timed out after {timeout:g} s", route="timeout")
    if msg[0] == "error":
        raise RuntimeError(f"classification of {L.name} failed: {msg[1]}")
    _, verdict, reason, route, w = msg
    witness = Witness(Isometry(w[0]), w[1]) if w else None
    return ChiralityVerdict(L, verdict, reason, witness, route=route)


_RUNS: dict[tuple, VinbergRun] = {}


def cached_run(L: Lattice, max_level) -> VinbergRun:
    """Default-base-point run, memoised per process; reductions reuse parent runs."""
    from .presets import reference_labeller

    key = (L.gram, Fraction(max_level))
    if key not in _RUNS:
        _RUNS[key] = vinberg_run(L, max_level=max_level, labeller=reference_labeller)
    return _RUNS[key]


def _via_a1_extension(L: Lattice, subsets, max_level) -> ChiralityVerdict | None:
    dropped = _drop_a1(L)
    if dropped is None:
        return None
    spec, at = dropped
    small = build_lattice(spec)
    sub = classify_chirality(small, subsets, max_level)
    if sub.verdict != ACHIRAL:
        return None
    big, f = extend_by_orthogonal_A1(small, sub.witness.isometry, at)
    if big.gram != L.gram:
        raise AssertionError("extension does not reproduce the lattice")
    s = delta3_sign(L, f)
    w = Witness(isometry=f, sign=s)
    return ChiralityVerdict(
        L, ACHIRAL, f"extended from achiral {small.name} by the identity on an orthogonal A1", w,
        route="a1-extension", detail={"from": small.name},
    )


def _reversing_candidates(run: VinbergRun, G: CoxeterGraph, subsets) -> Iterator[tuple[Isometry, str]]:
    """The preset witness, its conjugates by lifted symmetries, then every reversing lift."""
    L = run.lattice
    pref = preferred_witness(run, G) if subsets in (None, "preset") else None
    lifts = [h for _, _, h in lifted_symmetries(run, G, _resolve_subsets(run, subsets)) if h is not None]
    if pref is not None and pref.sign == -1:
        f = pref.isometry
        yield f, "preset"
        for h in lifts:
            yield h.compose(f).compose(h.inverse(L)), "preset conjugate"
    for h in lifts:
        if delta3_sign(L, h) == -1:
            yield h, "lift"


def _via_hyperplane_restriction(L: Lattice, subsets, max_level) -> ChiralityVerdict | None:
    swapped = _swap_minus_a1_for_u(L)
    if swapped is None:
        return None
    spec, at = swapped
    parent = build_lattice(spec)
    run = cached_run(parent, max_level)
    G = run.graph()
    fixed = [0] * parent.rank
    fixed[at] = fixed[at + 1] = 1  # u1 + u2
    # basis of its orthogonal complement matching L's coordinates: u1 - u2, then the rest
    basis = []
    for i in range(parent.rank):
        if i == at:
            b = [0] * parent.rank
            b[at], b[at + 1] = 1, -1
            basis.append(b)
        elif i != at + 1:
            b = [0] * parent.rank
            b[i] = 1
            basis.append(b)
    for f, how in _reversing_candidates(run, G, subsets):
        if f.apply(fixed) != tuple(fixed):
            continue
        Lv, fv = restrict_to_orthogonal(parent, f, fixed, basis)
        if Lv.gram != L.gram:
            raise AssertionError("restriction does not reproduce the lattice")
        s = delta3_sign(L, fv)
        if s != -1:
            raise AssertionError("restriction changed the Z/3 sign")
        return ChiralityVerdict(
            L, ACHIRAL, f"restricted from a Z/3-reversing symmetry of {parent.name} fixing u1+u2",
            Witness(isometry=fv, sign=s), route="hyperplane-restriction",
            detail={"from": parent.name, "symmetry": how},
        )
    return None
