"""Reference data shipped with the package: root tables, verdicts, catalogs, labels."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

TABLE_IDS = ("T1", "T2", "T3", "T4", "T5", "T6", "T7")

# vertex subsets whose symmetries are lifted even when the whole graph has none
SUBSET_PRESETS: dict[str, list[list[str]]] = {
    "U+A2+A1+E8": [["e1", "e2", "e3", "e4", "e5", "e6", "e7", "e8", "v1", "v2", "v5", "v6", "v7"]],
}


@dataclass(frozen=True)
class WitnessPreset:
    """A subset symmetry tried before any other: it fixes ``fixed`` and swaps ``swap``."""

    subset: str | tuple[str, ...]  # "white" means every 2-root of the run
    fixed: tuple[str, ...]
    swap: tuple[str, str]


WITNESS_PRESETS: dict[str, WitnessPreset] = {
    "U+A2+2E8": WitnessPreset("white", ("e7", "e4p", "v6", "e7p"), ("v1", "e4")),
    "U+A2+A1+E8": WitnessPreset(tuple(SUBSET_PRESETS["U+A2+A1+E8"][0]), (), ("v2", "e1")),
}


@lru_cache(maxsize=None)
def load_fixture(name: str) -> dict:
    text = resources.files("chiralat.fixtures").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def root_tables() -> dict:
    return load_fixture("tables")


def table_for_lattice(lattice_name: str) -> dict | None:
    for tid, t in root_tables().items():
        if t["lattice"] == lattice_name:
            return dict(t, id=tid)
    return None


def table_rows(tid: str) -> list[tuple[str, tuple[int, ...], int, Fraction]]:
    t = root_tables()[tid]
    return [(r["label"], tuple(r["coords"]), r["norm"], Fraction(r["level"])) for r in t["roots"]]


def expected_verdicts() -> dict[str, str]:
    v = load_fixture("verdicts")
    return {**v["verdicts6"], **v["verdicts7"]}


def extra_verdicts() -> dict[str, str]:
    return dict(load_fixture("verdicts")["extras"])


def catalog(which: str) -> list[str]:
    return list(load_fixture("catalog")[which])


def grid_cells() -> list[dict]:
    return list(load_fixture("grid10")["cells"])


def preset_subsets(lattice_name: str) -> list[list[str]]:
    return [list(s) for s in SUBSET_PRESETS.get(lattice_name, [])]


def _e8_labels(L) -> dict[tuple[int, ...], str]:
    out = {}
    copy = 0
    for start, s in L.summand_offsets:
        if s.kind == "E" and s.n == 8 and s.scale == 1 and s.sign == 1:
            suffix = "p" * copy
            for i in range(8):
                v = [0] * L.rank
                v[start + i] = 1
                out[tuple(v)] = f"e{i + 1}{suffix}"
            copy += 1
    return out


def reference_labeller(run) -> list[str]:
    """Labels v1.., e1.., e1p.. as in the reference tables where the roots match.

    Roots absent from the tables get fresh v-numbers after the last one used.
    """
    table = table_for_lattice(run.lattice.name)
    known: dict[tuple[int, ...], str] = {}
    if table is not None:
        known = {tuple(r["coords"]): r["label"] for r in table["roots"]}
    e8 = _e8_labels(run.lattice)
    used = [int(lab[1:].rstrip("p")) for lab in known.values() if lab.startswith("v")]
    nxt = max(used, default=0) + 1
    out = []
    for r in run.roots:
        lab = known.get(r.vec) or e8.get(r.vec)
        if lab is None:
            lab = f"v{nxt}"
            nxt += 1
        out.append(lab)
    return out
