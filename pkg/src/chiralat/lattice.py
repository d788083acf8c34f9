"""Lattices built from direct sums of named blocks.

A lattice is described by a list of summands (``U``, ``A_n``, ``D_n``,
``E_n``, or an explicit diagonal), each optionally scaled, negated and
repeated.  The same description can be written as a JSON array or as a
short string such as ``"U+A2+2E8"`` or ``"-A1+<6>+3A1"``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg


class LatticeSpecError(ValueError):
    """Malformed lattice description."""


_KINDS = ("U", "A", "D", "E", "diag")
_KEYS = {"kind", "n", "entries", "scale", "sign", "count"}


@dataclass(frozen=True)
class Summand:
    kind: str
    n: int | None = None
    entries: tuple[int, ...] | None = None
    scale: int = 1
    sign: int = 1
    count: int = 1

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise LatticeSpecError(f"unknown summand kind {self.kind!r}")
        if self.kind in ("A", "D", "E"):
            if not isinstance(self.n, int) or isinstance(self.n, bool):
                raise LatticeSpecError(f"{self.kind} requires an integer n")
            lo = {"A": 1, "D": 2, "E": 6}[self.kind]
            if self.n < lo or (self.kind == "E" and self.n > 8):
                raise LatticeSpecError(f"invalid n={self.n} for {self.kind}")
            if self.entries is not None:
                raise LatticeSpecError(f"{self.kind} takes no entries")
        elif self.kind == "diag":
            if not self.entries or self.n is not None:
                raise LatticeSpecError("diag requires a non-empty entries list and no n")
            if any(not isinstance(x, int) or isinstance(x, bool) or x == 0 for x in self.entries):
                raise LatticeSpecError("diag entries must be non-zero integers")
        else:
            if self.n is not None or self.entries is not None:
                raise LatticeSpecError("U takes neither n nor entries")
        if not isinstance(self.scale, int) or self.scale < 1:
            raise LatticeSpecError("scale must be a positive integer")
        if self.sign not in (1, -1):
            raise LatticeSpecError("sign must be +1 or -1")
        if not isinstance(self.count, int) or self.count < 1:
            raise LatticeSpecError("count must be a positive integer")

    @property
    def rank(self) -> int:
        if self.kind == "U":
            return 2
        if self.kind == "diag":
            return len(self.entries)
        return self.n

    def single(self) -> Summand:
        return Summand(self.kind, self.n, self.entries, self.scale, self.sign, 1)

    def block(self) -> list[list[int]]:
        """Gram matrix of one copy."""
        if self.kind == "U":
            g = [[0, 1], [1, 0]]
        elif self.kind == "diag":
            r = len(self.entries)
            g = [[self.entries[i] if i == j else 0 for j in range(r)] for i in range(r)]
        else:
            g = _cartan(self.kind, self.n)
        f = self.scale * self.sign
        return [[f * x for x in row] for row in g]

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.n is not None:
            d["n"] = self.n
        if self.entries is not None:
            d["entries"] = list(self.entries)
        if self.scale != 1:
            d["scale"] = self.scale
        if self.sign != 1:
            d["sign"] = self.sign
        if self.count != 1:
            d["count"] = self.count
        return d

    def name(self) -> str:
        if self.kind == "diag":
            if self.sign == 1 and self.scale == 1 and self.entries == (-2,):
                base = "-A1"
            else:
                vals = [self.sign * self.scale * x for x in self.entries]
                base = "+".join(f"<{x}>" for x in vals)
                return base if self.count == 1 else "+".join([base] * self.count)
        else:
            base = "U" if self.kind == "U" else f"{self.kind}{self.n}"
            if self.scale != 1:
                base += f"({self.scale})"
            if self.sign == -1:
                base = "-" + base
        return base if self.count == 1 else f"{self.count}{base}"


def _edges(kind: str, n: int) -> list[tuple[int, int]]:
    """Dynkin edges, 0-based, for the labelling used throughout the package."""
    if kind == "A":
        return [(i, i + 1) for i in range(n - 1)]
    if kind == "D":
        edges = [(i, i + 1) for i in range(n - 2)]
        if n >= 3:
            edges.append((n - 3, n - 1))
        return edges
    # E_n: chain e_n - ... - e_4 - e_3 - e_1, branch e_4 - e_2 (1-based labels)
    chain = list(range(n, 3, -1)) + [3, 1]
    edges = [(a - 1, b - 1) for a, b in zip(chain, chain[1:])]
    edges.append((3, 1))
    return edges


def _cartan(kind: str, n: int) -> list[list[int]]:
    g = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for a, b in _edges(kind, n):
        g[a][b] = g[b][a] = -1
    return g


LatticeSpec = tuple[Summand, ...]


def summand_from_dict(d: dict) -> Summand:
    if not isinstance(d, dict):
        raise LatticeSpecError("summand must be a JSON object")
    extra = set(d) - _KEYS
    if extra:
        raise LatticeSpecError(f"unknown keys {sorted(extra)}")
    if "kind" not in d:
        raise LatticeSpecError("summand without kind")
    entries = d.get("entries")
    if entries is not None:
        if not isinstance(entries, list):
            raise LatticeSpecError("entries must be a list")
        entries = tuple(entries)
    return Summand(
        kind=d["kind"],
        n=d.get("n"),
        entries=entries,
        scale=d.get("scale", 1),
        sign=d.get("sign", 1),
        count=d.get("count", 1),
    )


def parse_lattice_spec(text: str) -> LatticeSpec:
    """Parse a JSON lattice document (an array of summand objects)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LatticeSpecError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, list):
        raise LatticeSpecError("lattice document must be a JSON array")
    if not doc:
        raise LatticeSpecError("empty summand list")
    return tuple(summand_from_dict(d) for d in doc)


def dump_lattice_spec(spec: LatticeSpec) -> str:
    return json.dumps([s.to_dict() for s in spec])


_TERM = re.compile(
    r"""^(?P<count>\d+)?
        (?:
          <(?P<diag>-?\d+)>
        | (?P<neg>-)?(?P<kind>U|A|D|E)(?P<n>\d+)?(?:\((?P<scale>\d+)\))?
        )$""",
    re.VERBOSE,
)


def parse_preset(name: str) -> LatticeSpec:
    """Parse a short name like ``"U(2)+A2+2E8"`` or ``"-A1+<6>+3A1"``.

    ``-A1`` becomes the diagonal summand <-2> and ``<k>`` the diagonal <k>.
    """
    text = name.replace(" ", "").replace("⟨", "<").replace("⟩", ">").replace("−", "-")
    if not text:
        raise LatticeSpecError("empty lattice name")
    terms = re.split(r"\+", text)
    out = []
    for term in terms:
        m = _TERM.match(term)
        if not m:
            raise LatticeSpecError(f"cannot parse summand {term!r}")
        count = int(m["count"]) if m["count"] else 1
        if count < 1:
            raise LatticeSpecError(f"bad multiplicity in {term!r}")
        if m["diag"] is not None:
            out.append(Summand("diag", entries=(int(m["diag"]),), count=count))
            continue
        kind = m["kind"]
        n = int(m["n"]) if m["n"] else None
        scale = int(m["scale"]) if m["scale"] else 1
        sign = -1 if m["neg"] else 1
        if kind == "U":
            if n is not None:
                raise LatticeSpecError(f"U takes no index: {term!r}")
            out.append(Summand("U", scale=scale, sign=sign, count=count))
        elif kind == "A" and n == 1 and sign == -1 and scale == 1:
            out.append(Summand("diag", entries=(-2,), count=count))
        else:
            out.append(Summand(kind, n=n, scale=scale, sign=sign, count=count))
    return tuple(out)


def spec_name(spec: LatticeSpec) -> str:
    return "+".join(s.name() for s in spec)


def resolve_spec(arg: str) -> LatticeSpec:
    """Accept a preset name, inline JSON, or a path to a JSON file."""
    from pathlib import Path

    stripped = arg.strip()
    if stripped.startswith("["):
        return parse_lattice_spec(stripped)
    path = Path(arg)
    if path.suffix == ".json" or path.is_file():
        try:
            return parse_lattice_spec(path.read_text())
        except OSError as exc:
            raise LatticeSpecError(f"cannot read {arg}: {exc}") from None
    return parse_preset(arg)


@dataclass(frozen=True)
class Lattice:
    spec: LatticeSpec
    gram: tuple[tuple[int, ...], ...]
    summand_offsets: tuple[tuple[int, Summand], ...]
    signature: tuple[int, int]
    det: int = field(repr=False)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def name(self) -> str:
        return spec_name(self.spec)

    def dot(self, x: Sequence, y: Sequence):
        return inner_product(self, x, y)

    def norm(self, x: Sequence):
        return inner_product(self, x, x)

    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def is_hyperbolic(self) -> bool:
        return self.signature[1] == 1

    def block_slice(self, index: int) -> slice:
        start, s = self.summand_offsets[index]
        return slice(start, start + s.rank)

    def zero(self) -> list[int]:
        return [0] * self.rank


def build_lattice(spec: LatticeSpec | str) -> Lattice:
    """Assemble the block-diagonal Gram matrix in spec order."""
    if isinstance(spec, str):
        spec = resolve_spec(spec)
    if not spec:
        raise LatticeSpecError("empty summand list")
    offsets = []
    blocks = []
    start = 0
    for s in spec:
        for _ in range(s.count):
            offsets.append((start, s.single()))
            blocks.append(s.block())
            start += s.rank
    n = start
    gram = [[0] * n for _ in range(n)]
    for (off, _), b in zip(offsets, blocks):
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                gram[off + i][off + j] = x
    d = linalg.det(gram)
    if d == 0:
        raise LatticeSpecError("degenerate Gram matrix")
    pos, neg, _ = linalg.inertia(gram)
    return Lattice(
        spec=tuple(spec),
        gram=tuple(tuple(r) for r in gram),
        summand_offsets=tuple(offsets),
        signature=(pos, neg),
        det=d,
    )


def inner_product(L: Lattice, x: Sequence, y: Sequence):
    if len(x) != L.rank or len(y) != L.rank:
        raise ValueError(f"dimension mismatch: lattice rank {L.rank}, got {len(x)} and {len(y)}")
    return linalg.bilinear(L.gram, x, y)


def signature(L: Lattice) -> tuple[int, int]:
    pos, neg, zero = linalg.inertia(L.gram)
    if zero:
        raise ValueError("degenerate Gram matrix")
    return pos, neg


def dual_basis_vector(L: Lattice, summand: int, i: int) -> list[Fraction]:
    """Vector w in the span of summand ``summand`` with w.e_j = delta_ij there.

    ``summand`` indexes ``L.summand_offsets`` (copies expanded) and ``i`` the
    basis vectors of that block, both 0-based; e_8 of an E8 block is i=7.
    """
    if not 0 <= summand < len(L.summand_offsets):
        raise IndexError(f"summand index {summand} out of range")
    start, s = L.summand_offsets[summand]
    if not 0 <= i < s.rank:
        raise IndexError(f"basis index {i} out of range for {s.name()}")
    block = [list(L.gram[start + a][start:start + s.rank]) for a in range(s.rank)]
    inv = linalg.inverse(block)
    w = [Fraction(0)] * L.rank
    for k in range(s.rank):
        w[start + k] = inv[i][k]
    return w


# e8* = 2e8+3e7+4e6+5e5+6e4+4e3+3e2+2e1, coefficients listed for e1..e8
E8_TOP_DUAL = (2, 3, 4, 6, 5, 4, 3, 2)


def _e8_self_check() -> None:
    L = build_lattice((Summand("E", n=8),))
    w = dual_basis_vector(L, 0, 7)
    if tuple(w) != E8_TOP_DUAL or L.norm(w) != 2:
        raise RuntimeError(f"E8 labelling inconsistent with the e8* formula: {w}")
    if L.norm(dual_basis_vector(L, 0, 0)) != 4:
        raise RuntimeError("E8 labelling gives (e1*)^2 != 4")


_e8_self_check()
