"""Discriminant groups L*/L and their finite quadratic forms."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .lattice import Lattice


@dataclass(frozen=True)
class DiscriminantGroup:
    """A finite abelian group given by cyclic generators of the stated orders.

    ``generator_lifts[k]`` is a vector of the dual lattice (lattice
    coordinates, rational) whose class generates the k-th cyclic factor.
    Class coordinates of a dual vector x are ``(rows[k].x / divisors[k]) mod
    invariant_factors[k]``.
    """

    lattice: Lattice
    invariant_factors: tuple[int, ...]
    generator_lifts: tuple[tuple[Fraction, ...], ...]
    rows: tuple[tuple[int, ...], ...]
    divisors: tuple[int, ...]

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def coords(self, x: Sequence) -> tuple[int, ...]:
        """Class of a dual-lattice vector in terms of the generators."""
        out = []
        for row, r, d in zip(self.rows, self.divisors, self.invariant_factors):
            val = sum(a * Fraction(b) for a, b in zip(row, x))
            q = val / r
            if q.denominator != 1:
                raise ValueError("vector is not in this (sub)group of L*/L")
            out.append(q.numerator % d)
        return tuple(out)

    def lift(self, cls: Sequence[int]) -> list[Fraction]:
        v = [Fraction(0)] * self.lattice.rank
        for a, g in zip(cls, self.generator_lifts):
            if a:
                v = [x + a * y for x, y in zip(v, g)]
        return v

    def elements(self):
        import itertools

        return itertools.product(*(range(d) for d in self.invariant_factors))

    def qform(self, cls: Sequence[int]) -> Fraction | None:
        """x^2 mod 2 for the class; ``None`` when the lattice is odd."""
        if not self.lattice.is_even():
            return None
        v = self.lift(cls)
        return Fraction(self.lattice.norm(v)) % 2

    def bform(self, a: Sequence[int], b: Sequence[int]) -> Fraction:
        return Fraction(self.lattice.dot(self.lift(a), self.lift(b))) % 1


def discriminant_group(L: Lattice) -> DiscriminantGroup:
    """L*/L from the Smith form U G V = D: L* = V D^{-1} Z^n."""
    diag, _u, v = linalg.smith_normal_form([list(r) for r in L.gram])
    vinv = [linalg.to_int(r) for r in linalg.inverse(v)]
    factors, lifts, rows = [], [], []
    for i, d in enumerate(diag):
        if d == 0:
            raise ValueError("degenerate lattice")
        if d == 1:
            continue
        factors.append(d)
        lifts.append(tuple(Fraction(v[r][i], d) for r in range(L.rank)))
        rows.append(tuple(d * x for x in vinv[i]))
    return DiscriminantGroup(
        lattice=L,
        invariant_factors=tuple(factors),
        generator_lifts=tuple(lifts),
        rows=tuple(rows),
        divisors=tuple(1 for _ in factors),
    )


def primary_part(D: DiscriminantGroup, prime: int) -> DiscriminantGroup:
    """The subgroup of classes whose order is a power of ``prime``."""
    factors, lifts, rows, divisors = [], [], [], []
    for d, g, row, r in zip(D.invariant_factors, D.generator_lifts, D.rows, D.divisors):
        pk = 1
        while d % (pk * prime) == 0:
            pk *= prime
        if pk == 1:
            continue
        co = d // pk
        factors.append(pk)
        lifts.append(tuple(co * x for x in g))
        rows.append(row)
        divisors.append(r * co)
    return DiscriminantGroup(
        lattice=D.lattice,
        invariant_factors=tuple(factors),
        generator_lifts=tuple(lifts),
        rows=tuple(rows),
        divisors=tuple(divisors),
    )
