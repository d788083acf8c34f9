import itertools
import json
from fractions import Fraction

import pytest

from chiralat.coxeter import SubdiagramClass, classify_subdiagram, elliptic_sets_of_size, parabolic_sets_of_rank
from chiralat.lattice import build_lattice
from chiralat.presets import reference_labeller
from chiralat.roots import Root, root_norm_of
from chiralat.vinberg import (
    ELLIPTIC_EXTENSION,
    EXHAUSTED,
    PARABOLIC_COVER,
    TERMINATED,
    TerminationReport,
    default_base_point,
    dump_run,
    edge_walk,
    face_census,
    level_grid,
    level_of,
    load_run,
    start_vertex,
    vinberg_run,
)


def naive_vinberg(L, p, level0, max_level, box):
    """Box enumeration of every root up to max_level, then Vinberg's acceptance rule."""
    found = {}
    for v in itertools.product(*(range(-b, b + 1) for b in box)):
        k = root_norm_of(L, v)
        if k is None or L.dot(p, v) >= 0:
            continue
        d = Fraction(2 * L.dot(p, v) ** 2, k)
        if d <= max_level:
            found.setdefault(d, []).append(Root(v, k))
    accepted = list(level0)
    for d in sorted(found):
        new = [r for r in found[d] if all(L.dot(r.vec, w.vec) <= 0 for w in accepted)]
        accepted.extend(new)
    return sorted(r.vec for r in accepted)


@pytest.mark.parametrize("name,box", [("U+A2", (8, 8, 8, 8)), ("-A1+A2", (6, 6, 6)), ("U+A2+A1", (6, 6, 5, 5, 5))])
def test_run_matches_naive_enumeration_to_level_12(name, box):
    L = build_lattice(name)
    p = default_base_point(L)
    run = vinberg_run(L, p, max_level=12, check_every_level=False)
    level0 = [r for r, d in run.accepted if d == 0]
    want = naive_vinberg(L, p, level0, 12, box)
    assert sorted(r.vec for r, d in run.accepted) == want


def test_box_is_large_enough_for_the_oracle():
    # every root of U+A2 up to level 12 has |p.v| <= 6 and coordinates bounded by 8
    L = build_lattice("U+A2")
    p = default_base_point(L)
    for v in itertools.product(range(-10, 11), repeat=4):
        k = root_norm_of(L, v)
        if k and L.dot(p, v) < 0 and level_of(L, p, Root(v, k)) <= 12:
            assert max(map(abs, v)) <= 8


def test_table1_run():
    run = vinberg_run(build_lattice("U+A2"), labeller=reference_labeller)
    assert dict(zip(run.labels, run.levels())) == {"v1": 0, "v2": 0, "v3": 0, "v4": 1}
    assert run.termination.status == TERMINATED
    assert run.termination.criterion == PARABOLIC_COVER
    assert [len(c) for cs in run.termination.detail["maximal_parabolic"] for c in cs] == [3]


def test_walls_have_non_positive_products(run_of):
    for name in ("U+A2", "U+A2+E8", "-A1+A2+E8", "U+A2+A1+E8"):
        run = run_of(name)
        L, p = run.lattice, run.base_point
        for (a, d), (b, _) in itertools.combinations(run.accepted, 2):
            assert L.dot(a.vec, b.vec) <= 0
        for r, d in run.accepted:
            assert level_of(L, p, r) == d
            assert L.dot(p, r.vec) <= 0


def test_levels_are_non_decreasing(run_of):
    run = run_of("U+A2+A1+E8")
    assert run.levels() == sorted(run.levels())


def test_exhausted_when_max_level_is_too_low():
    run = vinberg_run(build_lattice("U+A2+A1+E8"), max_level=48)
    assert run.termination.status == EXHAUSTED
    assert run.termination.criterion is None
    assert run.termination.detail["max_level"] == "48"


def test_terminated_report_requires_criterion():
    with pytest.raises(ValueError):
        TerminationReport(TERMINATED, None)


def test_face_census(run_of):
    run = run_of("U+A2")
    G = run.graph()
    finite = sum(1 for J in itertools.combinations(range(G.size), 3)
                 if classify_subdiagram(G, J).kind == "Elliptic")
    ideal = sum(1 for J in itertools.combinations(range(G.size), 3)
                if classify_subdiagram(G, J) == SubdiagramClass("Parabolic", 2))
    assert face_census(run) == (finite, ideal)
    assert ideal == 1
    assert face_census(run_of("-A1+A2+E8")) == (31, 2)
    with pytest.raises(ValueError):
        face_census(vinberg_run(build_lattice("U+A2+A1+E8"), max_level=48))


def test_elliptic_extension_route(run_of):
    run = run_of("-A1+A2+E8")
    assert run.termination.criterion == ELLIPTIC_EXTENSION
    assert run.termination.detail["dotted_edges"] is True


def test_bad_base_points():
    L = build_lattice("U+A2")
    with pytest.raises(ValueError):
        vinberg_run(L, (0, 0, 1, 0))
    with pytest.raises(ValueError):
        vinberg_run(L, (1, -1, 0))


def test_level_grid_merges_both_norms():
    L = build_lattice("U+A2")
    got = [(d, pairs) for d, pairs in level_grid(L, default_base_point(L), 6)]
    levels = [d for d, _ in got]
    assert levels == sorted(set(levels))
    assert Fraction(1) in levels and Fraction(4) in levels
    assert all(d == Fraction(2 * m * m, k) for d, pairs in got for k, m in pairs)


def test_json_roundtrip(tmp_path, run_of):
    run = run_of("U+A2+E8")
    text = dump_run(run)
    back = load_run(text)
    assert back.accepted == run.accepted
    assert back.labels == run.labels
    assert back.base_point == run.base_point
    assert back.lattice.gram == run.lattice.gram
    assert back.termination.status == run.termination.status
    assert back.termination.criterion == run.termination.criterion
    assert dump_run(back) == text


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("roots"),
    lambda d: d["roots"][0].update(coords=[1, 0, 0, 0]),
    lambda d: d.update(lattice=[{"kind": "Q"}]),
    lambda d: d["termination"].update(criterion=None),
])
def test_malformed_run_documents(mutate, run_of):
    doc = json.loads(dump_run(run_of("U+A2")))
    mutate(doc)
    with pytest.raises(ValueError):
        load_run(json.dumps(doc))
    with pytest.raises(ValueError):
        load_run("{not json")


@pytest.mark.parametrize("name", ["U+A2", "-A1+A2", "U+A2+A1", "U+A2+E8", "-A1+A2+E8", "U+A2+A1+E8"])
def test_edge_walk_matches_subdiagram_census(name, run_of):
    run = run_of(name)
    G = run.graph()
    n = run.lattice.rank - 1
    walk = edge_walk(run.lattice, G.roots, start_vertex(run), G)
    assert walk.ok
    assert walk.finite == set(elliptic_sets_of_size(G, n))
    assert walk.ideal == {s for s, _ in parabolic_sets_of_rank(G, n - 1)}
    # every finite vertex has n edges, every edge two ends
    assert 2 * walk.edges >= n * len(walk.finite)


def test_edge_walk_finds_the_open_end_of_table7():
    run = vinberg_run(build_lattice("U+A2+A1+E8"), max_level=48, labeller=reference_labeller)
    G = run.graph()
    walk = edge_walk(run.lattice, G.roots, start_vertex(run), G)
    assert not walk.ok
    assert walk.failure["reason"] in ("ideal vertex is not a cusp", "edge leaves hyperbolic space")
    with pytest.raises(ValueError):
        edge_walk(run.lattice, G.roots, [0, 1], G)
