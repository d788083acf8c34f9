"""chiralat command line: vinberg, coxeter, classify, tables."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from .lattice import LatticeSpecError, build_lattice, resolve_spec

EXIT_OK, EXIT_ERROR, EXIT_EXHAUSTED, EXIT_UNKNOWN = 0, 1, 2, 3

log = logging.getLogger("chiralat")


def worker_count() -> int:
    """Worker cap from CHIRALAT_THREADS; the search itself runs in one process."""
    raw = os.environ.get("CHIRALAT_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ValueError(f"CHIRALAT_THREADS must be a positive integer, got {raw!r}")
    return n


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _base_point(arg: str | None):
    if arg is None:
        return None
    vals = json.loads(arg)
    if not isinstance(vals, list) or not all(isinstance(x, int) for x in vals):
        raise ValueError("--base-point must be a JSON integer array")
    return tuple(vals)


def cmd_vinberg(args) -> int:
    from .presets import reference_labeller
    from .vinberg import TERMINATED, dump_run, vinberg_run

    L = build_lattice(resolve_spec(args.lattice))
    run = vinberg_run(L, _base_point(args.base_point), max_level=Fraction(args.max_level), labeller=reference_labeller)
    _emit(dump_run(run), args.out)
    log.info("%s: %d roots, %s", L.name, len(run.accepted), run.termination.status)
    return EXIT_OK if run.termination.status == TERMINATED else EXIT_EXHAUSTED


def cmd_coxeter(args) -> int:
    from .coxeter import to_dot
    from .vinberg import load_run

    try:
        text = Path(args.run).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read run file: {exc}") from None
    run = load_run(text)
    if not run.accepted:
        raise ValueError("run document has no roots")
    _emit(to_dot(run.graph(), name=run.lattice.name), args.dot)
    return EXIT_OK


def cmd_classify(args) -> int:
    from .chirality import UNKNOWN, classify_chirality, classify_with_timeout, dump_verdict

    L = build_lattice(resolve_spec(args.lattice))
    opts = dict(subsets=args.subset, max_level=Fraction(args.max_level))
    if args.timeout is not None:
        if args.timeout <= 0:
            raise ValueError("--timeout must be positive")
        v = classify_with_timeout(L, args.timeout, **opts)
    else:
        v = classify_chirality(L, **opts)
    _emit(dump_verdict(v), args.out)
    log.info("%s: %s (%s)", L.name, v.verdict, v.reason)
    return EXIT_UNKNOWN if v.verdict == UNKNOWN else EXIT_OK


def cmd_tables(args) -> int:
    from .tables import run_tables

    ok = True
    for rep in run_tables(args.which):
        for line in rep.lines:
            print(line)
        ok &= rep.ok
    return EXIT_OK if ok else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    from .chirality import CLASSIFY_MAX_LEVEL
    from .tables import WHICH
    from .vinberg import DEFAULT_MAX_LEVEL

    ap = argparse.ArgumentParser(prog="chiralat", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vinberg", help="run Vinberg's algorithm and write the run JSON")
    p.add_argument("--lattice", required=True, help="preset name, JSON spec, or path to a JSON spec")
    p.add_argument("--max-level", default=str(DEFAULT_MAX_LEVEL))
    p.add_argument("--base-point", help="JSON integer array (default: preset base point)")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_vinberg)

    p = sub.add_parser("coxeter", help="emit the Coxeter graph of a run as DOT")
    p.add_argument("--run", required=True)
    p.add_argument("--dot", help="output path (default stdout)")
    p.set_defaults(func=cmd_coxeter)

    p = sub.add_parser("classify", help="decide chirality and write the verdict JSON")
    p.add_argument("--lattice", required=True)
    p.add_argument("--subset", choices=("preset", "auto"), default="preset")
    p.add_argument("--max-level", default=str(CLASSIFY_MAX_LEVEL))
    p.add_argument("--timeout", type=float, help="seconds before giving up with Unknown")
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("tables", help="recompute reference tables and diff them")
    p.add_argument("--which", choices=WHICH, default="all")
    p.set_defaults(func=cmd_tables)
    return ap


def _glue_lattice_values(argv: list[str]) -> list[str]:
    """``--lattice -A1+A2`` would read -A1+A2 as an option; pass it as ``--lattice=-A1+A2``."""
    out: list[str] = []
    it = iter(argv)
    for a in it:
        if a == "--lattice":
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-"):
                out.append(f"--lattice={nxt}")
                continue
            out.append(a)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_lattice_values(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        worker_count()
        return args.func(args)
    except (LatticeSpecError, ValueError, json.JSONDecodeError) as exc:
        print(f"chiralat: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
