"""Shared fixtures: Vinberg runs and verdicts are expensive, so they are computed once per session."""
from __future__ import annotations

import multiprocessing as mp
import os

import pytest

from chiralat.chirality import CLASSIFY_MAX_LEVEL, cached_run, classify_chirality
from chiralat.lattice import build_lattice
from chiralat.vinberg import dump_run, load_run

# lattices whose chirality is asserted, in the order they are reported
CATALOG = (
    "U+A2",
    "U+A2+E8",
    "U+A2+2E8",
    "-A1+A2",
    "U+A2+A1",
    "-A1+A2+E8",
    "U+A2+A1+E8",
    "-A1+A2+2E8",
    "U+A2+2E8+A1",
)

_VERDICTS: dict = {}


@pytest.fixture(scope="session")
def run_of():
    """run_of(name) -> default-base-point run, deep enough to terminate."""

    def get(name: str, max_level=CLASSIFY_MAX_LEVEL):
        return cached_run(build_lattice(name), max_level)

    return get


# lattices the reference settles by reduction; their direct runs are bounded in time
REDUCED = ("-A1+A2+2E8", "U+A2+2E8+A1")
DIRECT_SECONDS = float(os.environ.get("CHIRALAT_DIRECT_TIMEOUT", "900"))
_BOUNDED: dict = {}


def _run_child(name, conn):
    run = cached_run(build_lattice(name), CLASSIFY_MAX_LEVEL)
    conn.send(dump_run(run))
    conn.close()


@pytest.fixture(scope="session")
def bounded_run_of(run_of):
    """bounded_run_of(name) -> the run, or None if it did not finish within DIRECT_SECONDS."""

    def get(name: str):
        if name not in REDUCED:
            return run_of(name)
        if name not in _BOUNDED:
            ctx = mp.get_context("fork")
            recv, send = ctx.Pipe(duplex=False)
            child = ctx.Process(target=_run_child, args=(name, send), daemon=True)
            child.start()
            send.close()
            text = recv.recv() if recv.poll(DIRECT_SECONDS) else None
            child.kill()
            child.join()
            _BOUNDED[name] = load_run(text) if text else None
        return _BOUNDED[name]

    return get


@pytest.fixture(scope="session")
def verdict_of():
    def get(name: str):
        if name not in _VERDICTS:
            _VERDICTS[name] = classify_chirality(name)
        return _VERDICTS[name]

    return get


# ---------------------------------------------------------- acceptance report

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test checks")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (report.when != "call" and report.passed):
        return
    number, title = mark.args
    entry = _CRITERIA.setdefault(number, {"title": title, "passed": True, "notes": []})
    if report.failed:
        entry["passed"] = False
        entry["notes"].append(f"{item.name} failed")
    if report.when == "call":
        entry["notes"].extend(v for k, v in item.user_properties if k == "note")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        status = "PASS" if entry["passed"] else "FAIL"
        notes = "; ".join(entry["notes"])
        terminalreporter.write_line(f"{status} {number:>2} {entry['title']}" + (f" ({notes})" if notes else ""))
