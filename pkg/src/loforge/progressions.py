"""Generalized arithmetic progressions and coset-progressions.

Covers construction, enumeration, properness and t-properness, dilates,
Minkowski/iterated sumsets, the bound-dividing step used to pass from a cover
of kX to a cover of X, and a deterministic brute-force minimal-cover search
that stands in for long-range inverse theorems at desk scale.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .errors import ResourceLimitError
from .groups import AbelianGroup, Element, enumerate_subgroups

DEFAULT_ENUM_CAP = 2_000_000
MINIMAL_COVER_X_CAP = 5_000


@dataclass(frozen=True)
class Gap:
    """Progression {base + sum_i m_i*gens[i] : lower[i] <= m_i <= upper[i]}."""

    group: AbelianGroup
    base: Element
    gens: tuple
    lower: tuple
    upper: tuple

    def __post_init__(self):
        self.group.validate(self.base)
        for g in self.gens:
            self.group.validate(g)
        if not (len(self.gens) == len(self.lower) == len(self.upper)):
            raise ValueError("generators and bounds must have equal length")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("each lower bound must not exceed its upper bound")

    @classmethod
    def symmetric_box(cls, group: AbelianGroup, gens: Iterable[Element], radii: Iterable[int]) -> "Gap":
        gens = tuple(gens)
        radii = tuple(radii)
        if any(r < 0 for r in radii):
            raise ValueError("radii must be nonnegative")
        return cls(group, group.zero, gens, tuple(-r for r in radii), radii)

    @property
    def rank(self) -> int:
        return len(self.gens)

    @property
    def is_symmetric(self) -> bool:
        return self.base == self.group.zero and all(lo == -hi for lo, hi in zip(self.lower, self.upper))

    @property
    def formal_size(self) -> int:
        return math.prod(hi - lo + 1 for lo, hi in zip(self.lower, self.upper))

    def to_json(self):
        ej = self.group.element_to_json
        return {
            "base": ej(self.base),
            "gens": [ej(g) for g in self.gens],
            "lower": list(self.lower),
            "upper": list(self.upper),
        }


@dataclass(frozen=True)
class CosetProgression:
    """H + P with H a finite subgroup given extensionally and P a Gap."""

    subgroup: frozenset
    gap: Gap

    def __post_init__(self):
        group = self.gap.group
        h = self.subgroup
        if group.zero not in h:
            raise ValueError("subgroup must contain 0")
        for a in h:
            if group.neg(a) not in h:
                raise ValueError("subgroup must be closed under negation")
            for b in h:
                if group.add(a, b) not in h:
                    raise ValueError("subgroup must be closed under addition")

    @classmethod
    def from_gap(cls, gap: Gap) -> "CosetProgression":
        return cls(frozenset([gap.group.zero]), gap)

    @property
    def group(self) -> AbelianGroup:
        return self.gap.group

    @property
    def rank(self) -> int:
        return self.gap.rank

    @property
    def is_symmetric(self) -> bool:
        return self.gap.is_symmetric

    @property
    def formal_size(self) -> int:
        return len(self.subgroup) * self.gap.formal_size

    def to_json(self):
        ej = self.group.element_to_json
        out = self.gap.to_json()
        out["subgroup"] = sorted(ej(a) for a in self.subgroup)
        return out


Progression = Union[Gap, CosetProgression]


def as_coset_progression(p: Progression) -> CosetProgression:
    return p if isinstance(p, CosetProgression) else CosetProgression.from_gap(p)


def _gap_values(gap: Gap, cap: int) -> set:
    group = gap.group
    if gap.formal_size > cap:
        raise ResourceLimitError(f"progression with {gap.formal_size} formal points exceeds cap {cap}")
    vals = {gap.base}
    for g, lo, hi in zip(gap.gens, gap.lower, gap.upper):
        layer = [group.scale(g, m) for m in range(lo, hi + 1)]
        vals = {group.add(v, s) for v in vals for s in layer}
    return vals


def elements(p: Progression, cap: int = DEFAULT_ENUM_CAP) -> set:
    """All element values of the progression (set, no multiplicity)."""
    hp = as_coset_progression(p)
    if hp.formal_size > cap:
        raise ResourceLimitError(f"progression with {hp.formal_size} formal points exceeds cap {cap}")
    vals = _gap_values(hp.gap, cap)
    if len(hp.subgroup) == 1:
        return vals
    group = hp.group
    return {group.add(h, v) for h in hp.subgroup for v in vals}


def is_proper(p: Progression, cap: int = DEFAULT_ENUM_CAP) -> bool:
    """True iff every formal combination names a distinct element.

    For coset-progressions this is properness of the gap together with
    |H + P| = |H| * |P|.
    """
    hp = as_coset_progression(p)
    vals = _gap_values(hp.gap, cap)
    if len(vals) != hp.gap.formal_size:
        return False
    return len(elements(hp, cap)) == len(hp.subgroup) * len(vals)


def dilate(p: Progression, t: int) -> Progression:
    """Scale the bounds of a symmetric progression by t (the dilate P_t)."""
    if t < 1:
        raise ValueError("dilation factor must be a positive integer")
    if isinstance(p, CosetProgression):
        return CosetProgression(p.subgroup, dilate(p.gap, t))
    if not p.is_symmetric:
        raise ValueError("dilate is defined for symmetric progressions only")
    return Gap.symmetric_box(p.group, p.gens, tuple(t * hi for hi in p.upper))


def is_t_proper(p: Progression, t: int, cap: int = DEFAULT_ENUM_CAP) -> bool:
    """True iff the dilate by t is proper; requires a symmetric progression."""
    return is_proper(dilate(p, t), cap)


def minkowski_sum(X: Iterable[Element], Y: Iterable[Element], group: AbelianGroup) -> set:
    """{x + y : x in X, y in Y} inside the given group."""
    X, Y = set(X), set(Y)
    for v in itertools.chain(X, Y):
        group.validate(v)
    return {group.add(x, y) for x in X for y in Y}


def iterated_sumset(X: Iterable[Element], k: int, group: AbelianGroup, cap: int = DEFAULT_ENUM_CAP) -> set:
    """k-fold Minkowski sum X + ... + X."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    X = set(X)
    acc = set(X)
    for _ in range(k - 1):
        acc = {group.add(a, x) for a in acc for x in X}
        if len(acc) > cap:
            raise ResourceLimitError(f"iterated sumset exceeds cap {cap}")
    return acc


def divide_progression(hp: Progression, k: int, X: Iterable[Element], cap: int = DEFAULT_ENUM_CAP) -> CosetProgression:
    """Shrink a symmetric 2-proper H+P containing kX to an H+Q containing X.

    Bounds become floor(2*N_i/k); directions whose new bound vanishes are
    dropped.  Each precondition failure is reported distinctly.
    """
    hp = as_coset_progression(hp)
    if k < 1:
        raise ValueError("k must be a positive integer")
    if not hp.is_symmetric:
        raise ValueError("progression is not symmetric")
    if not is_t_proper(hp, 2, cap):
        raise ValueError("progression is not 2-proper")
    X = set(X)
    group = hp.group
    if group.zero not in X:
        raise ValueError("0 does not belong to X")
    if not iterated_sumset(X, k, group, cap) <= elements(hp, cap):
        raise ValueError("k-fold sumset of X is not contained in the progression")
    new_radii = [(2 * hi) // k for hi in hp.gap.upper]
    keep = [i for i, r in enumerate(new_radii) if r >= 1]
    result = CosetProgression(
        hp.subgroup,
        Gap.symmetric_box(group, tuple(hp.gap.gens[i] for i in keep), tuple(new_radii[i] for i in keep)),
    )
    # The unique-representation argument in H + P_2 forces X inside the result.
    assert X <= elements(result, cap), "dividing step lost elements of X"
    return result


def _canonical_gen(group: AbelianGroup, d: Element) -> Element:
    if group.torsion_free:
        return abs(d)
    nd = group.neg(d)
    return d if _sort_key(d) <= _sort_key(nd) else nd


def _sort_key(e: Element):
    return e


def _span_precheck(group: AbelianGroup, subgroup: frozenset, gens: tuple, shifted: list) -> bool:
    """Cheap necessary condition: shifted points must lie in <H, gens>."""
    if group.torsion_free:
        g = 0
        for gen in gens:
            g = math.gcd(g, abs(gen))
        return all(x % g == 0 for x in shifted) if g else all(x == 0 for x in shifted)
    span = set(subgroup)
    frontier = list(span)
    gen_list = [g for g in gens]
    for g in gen_list:
        if g not in span:
            span.add(g)
            frontier.append(g)
    while frontier:
        new = []
        for a in frontier:
            na = group.neg(a)
            if na not in span:
                span.add(na)
                new.append(na)
            for g in gen_list + list(subgroup):
                c = group.add(a, g)
                if c not in span:
                    span.add(c)
                    new.append(c)
        frontier = new
    return all(x in span for x in shifted)


def _box_values(group, subgroup, base, gens, lower, upper):
    vals = {base}
    for g, lo, hi in zip(gens, lower, upper):
        layer = [group.scale(g, m) for m in range(lo, hi + 1)]
        vals = {group.add(v, s) for v in vals for s in layer}
    if len(subgroup) > 1:
        vals = {group.add(h, v) for h in subgroup for v in vals}
    return vals


def _grow_box(group, subgroup, base, gens, X, symmetric, size_cap, growth_steps):
    """Greedy bound growth until X is covered; returns (lower, upper) or None."""
    r = len(gens)
    lower = [0] * r
    upper = [0] * r
    h_size = len(subgroup)

    def formal(lo, up):
        return h_size * math.prod(u - l + 1 for l, u in zip(lo, up))

    for _ in range(growth_steps):
        vals = _box_values(group, subgroup, base, gens, lower, upper)
        if X <= vals:
            break
        uncovered = len(X - vals)
        best_choice = None
        for i in range(r):
            moves = [(i, -1), (i, +1)] if not symmetric else [(i, +1)]
            for (j, direction) in moves:
                lo = list(lower)
                up = list(upper)
                if symmetric:
                    lo[j] -= 1
                    up[j] += 1
                elif direction < 0:
                    lo[j] -= 1
                else:
                    up[j] += 1
                f = formal(lo, up)
                if f > size_cap:
                    continue
                new_vals = _box_values(group, subgroup, base, gens, lo, up)
                gain = uncovered - len(X - new_vals)
                key = (-gain, f, j, direction)
                if best_choice is None or key < best_choice[0]:
                    best_choice = (key, lo, up)
        if best_choice is None:
            return None
        _, lower, upper = best_choice
    else:
        return None

    # Shrink pass: drop any slack the greedy growth introduced.
    changed = True
    while changed:
        changed = False
        for i in range(r):
            trials = [("sym", i)] if symmetric else [("lo", i), ("hi", i)]
            for kind, j in trials:
                lo = list(lower)
                up = list(upper)
                if kind == "sym":
                    if up[j] == 0:
                        continue
                    lo[j] += 1
                    up[j] -= 1
                elif kind == "lo":
                    if lo[j] == up[j]:
                        continue
                    lo[j] += 1
                else:
                    if lo[j] == up[j]:
                        continue
                    up[j] -= 1
                if X <= _box_values(group, subgroup, base, gens, lo, up):
                    lower, upper = lo, up
                    changed = True
    return tuple(lower), tuple(upper)


def minimal_cover(
    X: Iterable[Element],
    max_rank: int,
    require_symmetric: bool,
    group: AbelianGroup,
    *,
    t_proper: int = 1,
    max_pool: int = 200,
    pair_pool: int = 40,
    triple_pool: int = 12,
    growth_steps: int = 400,
    size_cap: int = 100_000,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> Optional[CosetProgression]:
    """Search for a small proper coset-progression of rank <= max_rank covering X.

    Generators are drawn from the difference set X - X (plus pairwise sums of
    popular differences), ranked by how often they occur as a difference;
    subgroups come from enumerate_subgroups over finite groups and are trivial
    over Z; bounds are grown greedily and then shrunk.  Ties break by smallest
    cardinality, then smallest rank, then lexicographically smallest generator
    tuple, so the search is deterministic.  A None return means the search
    budget was exhausted, never that no cover exists.
    """
    X = set(X)
    if not X:
        raise ValueError("X must be nonempty")
    if len(X) > MINIMAL_COVER_X_CAP:
        raise ResourceLimitError(f"|X| = {len(X)} exceeds the cover-search cap")
    for x in X:
        group.validate(x)
    if require_symmetric and group.zero not in X:
        raise ValueError("symmetric covers require 0 in X")
    if t_proper > 1 and not require_symmetric:
        raise ValueError("t-properness is defined for symmetric covers only")

    if group.torsion_free:
        subgroups = [frozenset([0])]
    else:
        subgroups = enumerate_subgroups(group, group.order)

    base = group.zero if require_symmetric else min(X, key=_sort_key)
    shifted = sorted((group.sub(x, base) for x in X), key=_sort_key)

    diff_freq = Counter()
    xs = sorted(X, key=_sort_key)
    for a, b in itertools.combinations(xs, 2):
        d = _canonical_gen(group, group.sub(a, b))
        if d != group.zero:
            diff_freq[d] += 1
    pool = sorted(diff_freq, key=lambda g: (-diff_freq[g], _sort_key(g)))
    for a, b in itertools.combinations(pool[: max(2, max_pool // 10)], 2):
        s = _canonical_gen(group, group.add(a, b))
        if s != group.zero and s not in diff_freq:
            diff_freq[s] = 0
    pool = sorted(diff_freq, key=lambda g: (-diff_freq[g], _sort_key(g)))[:max_pool]
    if group.torsion_free and shifted:
        g = 0
        for x in shifted:
            g = math.gcd(g, abs(x))
        if g and g not in diff_freq:
            pool.append(g)

    best = None  # (size, rank, gens_key, CosetProgression)

    def consider(subgroup, gens, lower, upper):
        nonlocal best
        gap = Gap(group, base, tuple(gens), tuple(lower), tuple(upper))
        hp = CosetProgression(frozenset(subgroup), gap)
        if hp.formal_size > enum_cap:
            return
        if best is not None and hp.formal_size > best[0]:
            return
        if not is_proper(hp, enum_cap):
            return
        if t_proper > 1 and not is_t_proper(hp, t_proper, enum_cap):
            return
        vals = elements(hp, enum_cap)
        if not X <= vals:
            return
        key = (len(vals), hp.rank, tuple(_sort_key(g) for g in gens))
        if best is None or key < best[:3]:
            best = (*key, hp)

    for h in subgroups:
        if best is not None and len(h) > best[0]:
            continue
        if all(x in h for x in shifted):
            consider(h, (), (), ())

    for r in range(1, max_rank + 1):
        if r == 1:
            tuples = [(g,) for g in pool]
        elif r == 2:
            tuples = list(itertools.combinations(pool[:pair_pool], 2))
        else:
            tuples = list(itertools.combinations(pool[:triple_pool], r))
        for h in subgroups:
            if best is not None and len(h) > best[0]:
                continue
            for gens in tuples:
                if not _span_precheck(group, h, gens, shifted):
                    continue
                cap_here = min(size_cap, best[0]) if best is not None else size_cap
                grown = _grow_box(group, h, base, gens, X, require_symmetric, cap_here, growth_steps)
                if grown is None:
                    continue
                lower, upper = grown
                consider(h, gens, lower, upper)

    return best[3] if best is not None else None
