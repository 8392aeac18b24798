"""Finite Abelian groups, the canonical bilinear pairing, and residue helpers.

Groups are products of cyclic factors Z/q1 x ... x Z/qd, or the integers
(torsion-free).  Elements of a finite group are coordinate tuples reduced into
[0, qj); elements of Z are plain ints.  The canonical element order used for
every deterministic witness is the lexicographic order on coordinates
(natural order on ints over Z).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

from .errors import ResourceLimitError, UnsupportedOperationError

Element = Union[int, tuple]

SUBGROUP_ORDER_CAP = 10**4
SUBGROUP_COUNT_CAP = 10**5


@dataclass(frozen=True)
class AbelianGroup:
    """Ambient group: Z/q1 x ... x Z/qd when factors is nonempty, else Z."""

    factors: tuple = ()
    torsion_free: bool = False

    def __post_init__(self):
        if self.torsion_free:
            if self.factors:
                raise ValueError("torsion-free group must have no cyclic factors")
        else:
            if not self.factors:
                raise ValueError("finite group needs at least one cyclic factor")
            if any(q < 2 for q in self.factors):
                raise ValueError(f"cyclic factors must be >= 2, got {self.factors}")

    @classmethod
    def cyclic(cls, q: int) -> "AbelianGroup":
        return cls(factors=(q,))

    @classmethod
    def product(cls, *qs: int) -> "AbelianGroup":
        return cls(factors=tuple(qs))

    @classmethod
    def integers(cls) -> "AbelianGroup":
        return cls(torsion_free=True)

    @property
    def is_finite(self) -> bool:
        return not self.torsion_free

    @property
    def order(self) -> int:
        if self.torsion_free:
            raise UnsupportedOperationError("|G| is undefined for the torsion-free group")
        return math.prod(self.factors)

    @property
    def pair_denominator(self) -> int:
        """lcm of the cyclic factors: every pairing value is a multiple of 1/lcm."""
        if self.torsion_free:
            raise UnsupportedOperationError("no pairing denominator over Z")
        return math.lcm(*self.factors)

    @property
    def zero(self) -> Element:
        return 0 if self.torsion_free else (0,) * len(self.factors)

    def reduce(self, coords) -> Element:
        """Canonical form of an element given raw (possibly unreduced) coordinates.

        A bare int is accepted for Z and for groups with a single factor.
        """
        if self.torsion_free:
            return int(coords)
        if isinstance(coords, int):
            if len(self.factors) != 1:
                raise ValueError("bare ints are only elements of rank-1 groups")
            coords = (coords,)
        coords = tuple(coords)
        if len(coords) != len(self.factors):
            raise ValueError(f"expected {len(self.factors)} coordinates, got {len(coords)}")
        return tuple(c % q for c, q in zip(coords, self.factors))

    def validate(self, a: Element) -> Element:
        if self.torsion_free:
            if not isinstance(a, int):
                raise ValueError(f"elements of Z are ints, got {a!r}")
            return a
        if not isinstance(a, tuple) or len(a) != len(self.factors):
            raise ValueError(f"{a!r} is not an element of {self}")
        if any(not (0 <= c < q) for c, q in zip(a, self.factors)):
            raise ValueError(f"{a!r} has coordinates out of range for {self}")
        return a

    def add(self, a: Element, b: Element) -> Element:
        if self.torsion_free:
            return a + b
        return tuple((x + y) % q for x, y, q in zip(a, b, self.factors))

    def neg(self, a: Element) -> Element:
        if self.torsion_free:
            return -a
        return tuple((-x) % q for x, q in zip(a, self.factors))

    def sub(self, a: Element, b: Element) -> Element:
        return self.add(a, self.neg(b))

    def scale(self, a: Element, t: int) -> Element:
        if self.torsion_free:
            return t * a
        return tuple((t * x) % q for x, q in zip(a, self.factors))

    def elements(self) -> Iterator[Element]:
        """All elements in canonical (lexicographic) order; finite groups only."""
        if self.torsion_free:
            raise UnsupportedOperationError("cannot enumerate Z")
        return itertools.product(*(range(q) for q in self.factors))

    def index(self, a: Element) -> int:
        """Mixed-radix index of a in canonical order."""
        idx = 0
        for c, q in zip(a, self.factors):
            idx = idx * q + c
        return idx

    def element_at(self, idx: int) -> Element:
        coords = []
        for q in reversed(self.factors):
            idx, c = divmod(idx, q)
            coords.append(c)
        return tuple(reversed(coords))

    def to_json(self):
        return "Z" if self.torsion_free else {"factors": list(self.factors)}

    @classmethod
    def from_json(cls, obj) -> "AbelianGroup":
        if obj == "Z":
            return cls.integers()
        return cls(factors=tuple(obj["factors"]))

    def element_to_json(self, a: Element):
        return a if self.torsion_free else list(a)

    def element_from_json(self, obj) -> Element:
        if self.torsion_free:
            return int(obj)
        return self.reduce(obj)


def pairing_numerator(zeta: Element, a: Element, group: AbelianGroup) -> int:
    """Numerator of the pairing over group.pair_denominator; integer-only hot path."""
    if group.torsion_free:
        raise UnsupportedOperationError("pairing requires a finite group")
    Q = group.pair_denominator
    total = 0
    for z, x, q in zip(zeta, a, group.factors):
        total += z * x * (Q // q)
    return total % Q


def pairing(zeta: Element, a: Element, group: AbelianGroup) -> Fraction:
    """Canonical non-degenerate bilinear form, valued in R/Z as a Fraction in [0,1)."""
    group.validate(zeta)
    group.validate(a)
    return Fraction(pairing_numerator(zeta, a, group), group.pair_denominator)


def frac_dist(x) -> "Fraction | float":
    """Distance of x to the nearest integer; exact for Fraction/int inputs."""
    if isinstance(x, int):
        x = Fraction(x)
    f = x % 1
    return min(f, 1 - f)


def reduced_elements(q: int) -> set:
    """Residues in [1, q) coprime to q."""
    if q < 2:
        raise ValueError(f"modulus must be >= 2, got {q}")
    return {a for a in range(1, q) if math.gcd(a, q) == 1}


def _closure(group: AbelianGroup, seed: frozenset, size_cap: int) -> "frozenset | None":
    """Subgroup generated by seed, or None once it exceeds size_cap."""
    elems = set(seed)
    elems.add(group.zero)
    frontier = list(elems)
    while frontier:
        new = []
        for a in frontier:
            na = group.neg(a)
            if na not in elems:
                elems.add(na)
                new.append(na)
            for b in list(elems):
                c = group.add(a, b)
                if c not in elems:
                    if len(elems) >= size_cap:
                        return None
                    elems.add(c)
                    new.append(c)
        frontier = new
        if len(elems) > size_cap:
            return None
    return frozenset(elems)


def enumerate_subgroups(group: AbelianGroup, max_size: int) -> list:
    """All subgroups of cardinality <= max_size, as frozensets of elements.

    Single cyclic factor uses the divisor lattice directly; products fall back
    to a closure-BFS.  Groups above SUBGROUP_ORDER_CAP are rejected.
    """
    if group.torsion_free:
        raise UnsupportedOperationError("subgroup enumeration requires a finite group")
    n = group.order
    if n > SUBGROUP_ORDER_CAP:
        raise ResourceLimitError(f"|G| = {n} exceeds the subgroup enumeration cap")

    if len(group.factors) == 1:
        q = group.factors[0]
        subs = []
        for d in range(1, q + 1):
            if q % d == 0 and d <= max_size:
                step = q // d
                subs.append(frozenset((c,) for c in range(0, q, step)))
        return sorted(subs, key=lambda h: (len(h), sorted(h)))

    found = {frozenset([group.zero])}
    frontier = [frozenset([group.zero])]
    all_elems = list(group.elements())
    while frontier:
        new = []
        for h in frontier:
            for g in all_elems:
                if g in h:
                    continue
                closed = _closure(group, h | {g}, max_size)
                if closed is not None and closed not in found:
                    found.add(closed)
                    new.append(closed)
                    if len(found) > SUBGROUP_COUNT_CAP:
                        raise ResourceLimitError("subgroup count exceeds enumeration cap")
        frontier = new
    return sorted(found, key=lambda h: (len(h), sorted(h)))
