"""Recompute the reference root tables and verdicts and diff them against the fixtures."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .lattice import build_lattice
from .presets import TABLE_IDS, expected_verdicts, reference_labeller, root_tables, table_rows
from .vinberg import VinbergRun, vinberg_run


@dataclass
class TableReport:
    id: str
    ok: bool
    lines: list[str] = field(default_factory=list)
    run: VinbergRun | None = None


def _rows_by_level(rows) -> dict[Fraction, list[tuple]]:
    out: dict[Fraction, list[tuple]] = {}
    for vec, norm, level in rows:
        out.setdefault(Fraction(level), []).append((tuple(vec), norm))
    return {d: sorted(v) for d, v in out.items()}


def compare_root_table(tid: str, run: VinbergRun | None = None) -> TableReport:
    """Run up to the table's deepest level and compare roots level by level."""
    t = root_tables()[tid]
    expected = table_rows(tid)
    last = max(level for *_, level in expected)
    if run is None:
        L = build_lattice(t["lattice"])
        run = vinberg_run(L, tuple(t["base_point"]), max_level=last, labeller=reference_labeller)
    want = _rows_by_level((v, n, d) for _, v, n, d in expected)
    got = _rows_by_level((r.vec, r.norm, d) for r, d in run.accepted if d <= last)
    lines, ok = [], True
    for d in sorted(set(want) | set(got)):
        w, g = want.get(d, []), got.get(d, [])
        if w == g:
            lines.append(f"{tid} level {d}: {len(g)} root(s) match")
        else:
            ok = False
            missing = [x for x in w if x not in g]
            extra = [x for x in g if x not in w]
            lines.append(f"{tid} level {d}: MISMATCH missing={missing} extra={extra}")
    total = sum(len(v) for v in got.values())
    lines.append(f"{tid} {t['lattice']}: {'match' if ok else 'MISMATCH'}, {total} roots")
    return TableReport(tid, ok, lines, run)


def compare_verdicts(names=None, classify=None) -> TableReport:
    from .chirality import classify_chirality

    classify = classify or classify_chirality
    want = expected_verdicts()
    lines, ok = [], True
    for name in names or want:
        got = classify(name).verdict
        good = got == want[name]
        ok &= good
        lines.append(f"verdict {name}: {got} (expected {want[name]}) {'ok' if good else 'MISMATCH'}")
    return TableReport("verdicts", ok, lines)


WHICH = TABLE_IDS + ("verdicts", "all")


def run_tables(which: str) -> list[TableReport]:
    if which not in WHICH:
        raise ValueError(f"unknown table {which!r}")
    ids = TABLE_IDS if which == "all" else (() if which == "verdicts" else (which,))
    out = [compare_root_table(t) for t in ids]
    if which in ("verdicts", "all"):
        out.append(compare_verdicts())
    return out
