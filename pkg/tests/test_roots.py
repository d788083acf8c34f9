import itertools
import random
from fractions import Fraction
from math import floor, isqrt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chiralat import linalg
from chiralat.lattice import build_lattice
from chiralat.roots import (
    EnumConstraint,
    Root,
    enumerate_short_vectors,
    iter_orthant_vectors,
    make_root,
    root_norm_of,
    root_sublattice_basis,
    roots_in_hyperplane,
    simple_root_basis,
)


def box_oracle(gram, target, constraints=()):
    """Every x in the box |x_i| <= sqrt(target * (G^-1)_ii), filtered by the norm."""
    n = len(gram)
    inv = linalg.inverse(gram)
    bounds = [isqrt(floor(Fraction(target) * inv[i][i])) for i in range(n)]
    out = []
    for x in itertools.product(*(range(-b, b + 1) for b in bounds)):
        if linalg.bilinear(gram, x, x) == target and all(c.holds(x) for c in constraints):
            out.append(x)
    return sorted(out)


def positive_definite_grid(count=60, seed=7):
    """Grams A^T A + D of rank 1..4 with small entries, deterministic."""
    rng = random.Random(seed)
    grams = []
    while len(grams) < count:
        n = 1 + len(grams) % 4
        a = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        g = linalg.mat_mul(linalg.transpose(a), a)
        for i in range(n):
            g[i][i] += rng.randint(1, 3)
        if linalg.is_positive_definite(g):
            grams.append(g)
    return grams


GRID = [(g, t) for g in positive_definite_grid() for t in (1, 2, 3, 4, 6, 8)]


def test_grid_is_large_enough():
    assert len(GRID) >= 50
    assert {len(g) for g, _ in GRID} == {1, 2, 3, 4}


@pytest.mark.parametrize("gram,target", GRID)
def test_short_vectors_match_box_search(gram, target):
    assert enumerate_short_vectors(gram, target) == box_oracle(gram, target)


@pytest.mark.parametrize("gram", positive_definite_grid(12, seed=11))
def test_constrained_enumeration_matches_box_search(gram):
    n = len(gram)
    cons = [EnumConstraint(tuple([1] + [0] * (n - 1)), "le", 0)]
    if n > 1:
        cons.append(EnumConstraint(tuple([1, -1] + [0] * (n - 2)), "eq", 1))
    for t in (2, 4, 6):
        assert enumerate_short_vectors(gram, t, cons) == box_oracle(gram, t, cons)


def test_e8_root_count():
    L = build_lattice("E8")
    vecs = enumerate_short_vectors(L.gram, 2)
    assert len(vecs) == 240
    assert len(enumerate_short_vectors(L.gram, 4)) == 2160


def test_non_definite_gram_is_rejected():
    with pytest.raises(ValueError):
        enumerate_short_vectors([[0, 1], [1, 0]], 2)


@given(
    st.integers(1, 4).flatmap(lambda n: st.lists(
        st.lists(st.integers(0, 3), min_size=n, max_size=n), min_size=n, max_size=n)),
    st.integers(0, 20),
)
@settings(max_examples=120, deadline=None)
def test_orthant_search_matches_brute_force(raw, target):
    n = len(raw)
    g = [[raw[min(i, j)][max(i, j)] for j in range(n)] for i in range(n)]
    for i in range(n):
        g[i][i] += 1
    got = sorted(iter_orthant_vectors(g, target))
    # with non-negative entries, x_i^2 g_ii <= target bounds each coordinate
    box = [range(0, isqrt(target // g[i][i]) + 1) for i in range(n)]
    want = sorted(x for x in itertools.product(*box) if linalg.bilinear(g, x, x) == target)
    assert got == want


def test_orthant_search_needs_non_negative_gram():
    with pytest.raises(ValueError):
        list(iter_orthant_vectors([[2, -1], [-1, 2]], 2))


def test_root_norms():
    L = build_lattice("U+A2")
    assert root_norm_of(L, (1, 1, 0, 0)) == 2
    assert root_norm_of(L, (0, 0, 1, -1)) == 6
    assert root_norm_of(L, (3, 1, 0, 0)) is None  # norm 6 but not divisible by 3
    assert root_norm_of(L, (0, 0, 1, 0)) == 2
    with pytest.raises(ValueError):
        make_root(L, (1, 0, 0, 0))


@pytest.mark.parametrize("name", ["U+A2", "U+A2+A1", "-A1+A2", "U(2)+A2+D4"])
def test_six_root_sublattice(name):
    L = build_lattice(name)
    basis = root_sublattice_basis(L, 6)
    assert abs(linalg.det(basis)) == 3 ** (L.rank - 1)
    for b in basis:
        assert all(x % 3 == 0 for x in linalg.mat_vec(L.gram, b))


def test_hyperplane_roots_match_box_search():
    L = build_lattice("U+A2+A1")
    p = (1, -1, 0, 0, 0)
    got = {r.vec for k in (2, 6) for r in roots_in_hyperplane(L, p, k)}
    want = {x for x in itertools.product(range(-3, 4), repeat=5)
            if L.dot(x, p) == 0 and root_norm_of(L, x)}
    assert got == want
    # p-perp is A1 (u1+u2) + A2 + A1; only A2 carries 6-roots
    assert len(got) == 2 + (6 + 6) + 2


def test_simple_root_basis_of_a2():
    L = build_lattice("A2")
    roots = [Root(v, 2) for v in enumerate_short_vectors(L.gram, 2)]
    simple = simple_root_basis(L, roots, (-2, -1))
    assert len(simple) == 2
    assert all(L.dot(a.vec, b.vec) <= 0 for a in simple for b in simple if a != b)
