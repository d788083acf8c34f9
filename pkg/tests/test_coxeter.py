import itertools

import pytest

from chiralat import linalg
from chiralat.coxeter import (
    SubdiagramClass,
    build_coxeter_graph,
    classify_subdiagram,
    connected_elliptic_sets,
    connected_parabolic_sets,
    elliptic_sets_of_size,
    elliptic_type,
    enumerate_subdiagrams,
    graph_automorphisms,
    has_dotted_edge,
    is_elliptic,
    parabolic_sets_of_rank,
    to_dot,
)
from chiralat.lattice import build_lattice
from chiralat.presets import table_rows
from chiralat.roots import Root, enumerate_short_vectors


def unit(n, i, c=1):
    return tuple(c if k == i else 0 for k in range(n))


@pytest.fixture(scope="module")
def affine_e8():
    L = build_lattice("E8")
    roots = [Root(unit(8, i), 2) for i in range(8)] + [Root((-2, -3, -4, -6, -5, -4, -3, -2), 2)]
    return build_coxeter_graph(L, roots, [f"e{i + 1}" for i in range(8)] + ["e0"])


@pytest.fixture(scope="module")
def table1_graph():
    L = build_lattice("U+A2")
    rows = table_rows("T1")
    return build_coxeter_graph(L, [Root(v, n) for _, v, n, _ in rows], [lab for lab, *_ in rows])


def brute_sets(G, kind, size):
    return sorted(
        sorted(J) for J in itertools.combinations(range(G.size), size)
        if classify_subdiagram(G, J).kind == kind
    )


def test_affine_e8_classes(affine_e8):
    G = affine_e8
    assert classify_subdiagram(G, range(8)) == SubdiagramClass("Elliptic", 8)
    assert elliptic_type(G, range(8)) == "E8"
    assert classify_subdiagram(G, range(9)) == SubdiagramClass("Parabolic", 8)
    assert elliptic_type(G, [0, 2, 3, 4]) == "A4"
    # deleting any node of the affine diagram leaves an elliptic diagram
    assert all(is_elliptic(G, set(range(9)) - {x}) for x in range(9))


def test_elliptic_sets_match_brute_force(affine_e8, table1_graph):
    for G in (affine_e8, table1_graph):
        for k in range(1, min(G.size, 6) + 1):
            got = sorted(sorted(J) for J in elliptic_sets_of_size(G, k))
            assert got == brute_sets(G, "Elliptic", k)


def test_connected_families_are_connected_and_complete(affine_e8):
    G = affine_e8
    ell = set(connected_elliptic_sets(G))
    for k in range(1, 6):
        for J in itertools.combinations(range(9), k):
            J = frozenset(J)
            connected = len(G.components(J)) == 1
            assert (J in ell) == (connected and is_elliptic(G, J))
    par = connected_parabolic_sets(G)
    assert par == [(frozenset(range(9)), 8)]


def test_table1_is_g2_tilde_with_lanner_free_graph(table1_graph):
    G = table1_graph
    (cusp, comps), = parabolic_sets_of_rank(G, 2)
    assert len(cusp) == 3 and len(comps) == 1
    assert 3 in {G.weights[a][b] for a in cusp for b in cusp}  # the G2 edge
    assert not has_dotted_edge(G)
    assert enumerate_subdiagrams(G, "Lanner", 2) == []


def test_lanner_and_indefinite():
    L = build_lattice("U+A1")
    G = build_coxeter_graph(L, [Root((0, 0, 1), 2), Root((1, 0, -1), 2)])
    # product -2 gives weight 4: parallel walls, an affine A1
    assert classify_subdiagram(G, [0, 1]) == SubdiagramClass("Parabolic", 1)
    L = build_lattice("-A1+A2+E8")
    rows = table_rows("T6")
    G = build_coxeter_graph(L, [Root(v, n) for _, v, n, _ in rows], [lab for lab, *_ in rows])
    (i, j), = [(i, j) for i, j, w in G.edges() if w > 4]
    assert classify_subdiagram(G, [i, j]) == SubdiagramClass("Lanner")
    assert enumerate_subdiagrams(G, "Lanner", 2) == [frozenset((i, j))]
    k = next(x for x in range(G.size) if x not in (i, j) and G.weights[i][x] == 0 and G.weights[j][x] == 0)
    assert classify_subdiagram(G, [i, j, k]).kind == "Indefinite"


def test_automorphisms_of_small_diagrams(affine_e8):
    L = build_lattice("A2")
    roots = [Root(v, 2) for v in enumerate_short_vectors(L.gram, 2)]
    simple = [Root((1, 0), 2), Root((0, 1), 2)]
    G = build_coxeter_graph(L, simple)
    assert len(graph_automorphisms(G)) == 2
    affine = simple + [Root((-1, -1), 2)]
    assert len(graph_automorphisms(build_coxeter_graph(L, affine))) == 6
    assert len(roots) == 6
    # affine E8 is rigid; its E8 subgraph too
    assert len(graph_automorphisms(affine_e8)) == 1
    assert len(graph_automorphisms(affine_e8, list(range(8)))) == 1


def test_automorphisms_preserve_weights_and_colours(table1_graph):
    G = table1_graph
    for sym in graph_automorphisms(G):
        m = sym.as_dict()
        for i, j in itertools.product(range(G.size), repeat=2):
            assert G.weights[i][j] == G.weights[m[i]][m[j]]
        assert all(G.color(i) == G.color(m[i]) for i in m)


def test_non_roots_are_rejected():
    L = build_lattice("U+A2")
    with pytest.raises(ValueError):
        build_coxeter_graph(L, [Root((1, 0, 0, 0), 2)])


def test_dot_output(table1_graph):
    text = to_dot(table1_graph, name="U+A2")
    assert text.startswith('graph "U+A2" {')
    assert text.rstrip().endswith("}")
    assert '"v3" [shape=circle,style=filled,fillcolor=black,fontcolor=white];' in text
    assert '[label="6"]' in text
    assert text.count(" -- ") == len(table1_graph.edges())


def test_dot_dashed_edge_for_ultraparallel():
    L = build_lattice("-A1+A2+E8")
    rows = table_rows("T6")
    G = build_coxeter_graph(L, [Root(v, n) for _, v, n, _ in rows], [lab for lab, *_ in rows])
    assert has_dotted_edge(G)
    assert "style=dashed" in to_dot(G)


def test_gram_of_subdiagram_matches_definiteness(affine_e8):
    G = affine_e8
    for J in itertools.combinations(range(9), 4):
        pos, neg, zero = linalg.inertia(G.sub_gram(J))
        assert is_elliptic(G, J) == (pos == 4)
