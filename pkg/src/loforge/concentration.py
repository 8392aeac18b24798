"""Exact walk distributions and concentration/discrepancy functionals.

All probabilities are exact rationals.  Internally a distribution is a vector
of integer numerators over one common denominator, so convolutions are pure
integer arithmetic (vectorized via int64 numpy whenever the denominator bound
provably fits, falling back to Python bigints otherwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from .errors import ResourceLimitError, UnsupportedOperationError
from .groups import AbelianGroup, Element, frac_dist, pairing

WINDOW_CAP = 4_000_000
_INT64_SAFE = 1 << 62


class RhoResult(NamedTuple):
    value: Fraction
    witness: Element


@dataclass(frozen=True)
class WeightMultiset:
    """Multiset of group elements with positive integer multiplicities."""

    group: AbelianGroup
    items: tuple  # ((element, multiplicity), ...) in canonical element order

    def __post_init__(self):
        if not self.items:
            raise ValueError("multiset must contain at least one element")
        for a, mult in self.items:
            self.group.validate(a)
            if mult < 1:
                raise ValueError("multiplicities must be positive")

    @classmethod
    def from_elements(cls, group: AbelianGroup, elems) -> "WeightMultiset":
        counts = {}
        for a in elems:
            a = group.reduce(a)
            counts[a] = counts.get(a, 0) + 1
        return cls(group, tuple(sorted(counts.items())))

    @classmethod
    def from_pairs(cls, group: AbelianGroup, pairs) -> "WeightMultiset":
        counts = {}
        for a, mult in pairs:
            a = group.reduce(a)
            counts[a] = counts.get(a, 0) + int(mult)
        return cls(group, tuple(sorted(counts.items())))

    @property
    def n(self) -> int:
        return sum(mult for _, mult in self.items)

    @property
    def support(self) -> set:
        return {a for a, _ in self.items}

    def multiplicity(self, a: Element) -> int:
        return dict(self.items).get(a, 0)

    @property
    def is_symmetric(self) -> bool:
        table = dict(self.items)
        return all(table.get(self.group.neg(a), 0) == mult for a, mult in self.items)

    def doubled(self) -> "WeightMultiset":
        """The multiset {2a : a in A} with multiplicity carried over."""
        counts = {}
        for a, mult in self.items:
            d = self.group.scale(a, 2)
            counts[d] = counts.get(d, 0) + mult
        return WeightMultiset(self.group, tuple(sorted(counts.items())))

    def translated(self, shift: int) -> "WeightMultiset":
        if not self.group.torsion_free:
            raise UnsupportedOperationError("translation by an integer is a Z operation")
        return WeightMultiset(self.group, tuple(sorted((a + shift, m) for a, m in self.items)))

    def mod_prime(self, p: int) -> "WeightMultiset":
        """Project an integer multiset into Z/p."""
        if not self.group.torsion_free:
            raise UnsupportedOperationError("only integer multisets embed into Z/p")
        counts = {}
        for a, mult in self.items:
            key = (a % p,)
            counts[key] = counts.get(key, 0) + mult
        return WeightMultiset(AbelianGroup.cyclic(p), tuple(sorted(counts.items())))


@dataclass(frozen=True)
class StepLaw:
    """Per-step law of the random multiplier (or the uniform-on-A word step)."""

    kind: str  # "lazy" | "bernoulli01" | "signed" | "uniform"
    alpha: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind not in ("lazy", "bernoulli01", "signed", "uniform"):
            raise ValueError(f"unknown step law {self.kind!r}")
        if self.kind in ("lazy", "bernoulli01"):
            if self.alpha is None or not (0 <= self.alpha <= 1):
                raise ValueError("alpha must lie in [0, 1]")

    @classmethod
    def lazy(cls, alpha) -> "StepLaw":
        return cls("lazy", Fraction(alpha))

    @classmethod
    def bernoulli01(cls, alpha) -> "StepLaw":
        return cls("bernoulli01", Fraction(alpha))

    @classmethod
    def signed(cls) -> "StepLaw":
        return cls("signed")

    @classmethod
    def uniform(cls) -> "StepLaw":
        return cls("uniform")

    def scalar_weights(self):
        """Nonzero multiplier weights ((s, numerator), ...) over a common denominator."""
        if self.kind == "signed":
            pairs, den = ((-1, 1), (1, 1)), 2
        elif self.kind == "lazy":
            p, q = self.alpha.numerator, self.alpha.denominator
            pairs, den = ((-1, p), (0, 2 * (q - p)), (1, p)), 2 * q
        elif self.kind == "bernoulli01":
            p, q = self.alpha.numerator, self.alpha.denominator
            pairs, den = ((0, q - p), (1, p)), q
        else:
            raise UnsupportedOperationError("the uniform word step has no scalar multiplier")
        return tuple((s, w) for s, w in pairs if w), den


class Distribution:
    """Exact probability vector: integer numerators over one denominator.

    Finite groups use the canonical index order; Z uses a bounded window with
    an offset.  Entries sum to the denominator exactly.
    """

    __slots__ = ("group", "nums", "den", "offset")

    def __init__(self, group: AbelianGroup, nums, den: int, offset: Optional[int] = None):
        self.group = group
        self.nums = list(nums)
        self.den = int(den)
        self.offset = offset
        if group.is_finite and len(self.nums) != group.order:
            raise ValueError("numerator vector must cover the whole group")
        if group.torsion_free and offset is None:
            raise ValueError("integer-supported distributions need a window offset")
        if sum(self.nums) != self.den:
            raise ValueError("probabilities do not sum to 1")

    def prob(self, a: Element) -> Fraction:
        if self.group.torsion_free:
            i = a - self.offset
            num = self.nums[i] if 0 <= i < len(self.nums) else 0
        else:
            num = self.nums[self.group.index(a)]
        return Fraction(num, self.den)

    def items(self):
        if self.group.torsion_free:
            for i, num in enumerate(self.nums):
                yield self.offset + i, num
        else:
            for idx, num in enumerate(self.nums):
                yield self.group.element_at(idx), num

    def support(self) -> set:
        return {a for a, num in self.items() if num}

    def max_prob(self) -> RhoResult:
        best = max(self.nums)
        for a, num in self.items():
            if num == best:
                return RhoResult(Fraction(best, self.den), a)
        raise AssertionError("unreachable")

    def sup_discrepancy(self) -> RhoResult:
        """sup_a |P(a) - 1/|G|| with its canonical witness (finite groups)."""
        if self.group.torsion_free:
            raise UnsupportedOperationError("discrepancy from uniform needs a finite group")
        order = self.group.order
        best = max(abs(num * order - self.den) for num in self.nums)
        for a, num in self.items():
            if abs(num * order - self.den) == best:
                return RhoResult(Fraction(best, self.den * order), a)
        raise AssertionError("unreachable")

    def to_fractions(self) -> dict:
        return {a: Fraction(num, self.den) for a, num in self.items() if num}


def _np_dtype_for(bound: int):
    return np.int64 if bound < _INT64_SAFE else object


def _walk_finite(A: WeightMultiset, weights, step_den: int) -> Distribution:
    group = A.group
    order = group.order
    total_den = step_den ** A.n
    dtype = _np_dtype_for(total_den)
    single = len(group.factors) == 1
    if single:
        q = group.factors[0]
        vec = np.zeros(q, dtype=dtype)
        vec[0] = 1
        for a, mult in A.items:
            shifts = [(s * a[0]) % q for s, _ in weights]
            for _ in range(mult):
                acc = np.zeros(q, dtype=dtype)
                for (s, w), sh in zip(weights, shifts):
                    acc += w * np.roll(vec, sh)
                vec = acc
        return Distribution(group, vec.tolist(), total_den)
    vec = [0] * order
    vec[0] = 1
    for a, mult in A.items:
        maps = []
        for s, w in weights:
            sa = group.scale(a, s)
            maps.append((w, [group.index(group.add(group.element_at(i), sa)) for i in range(order)]))
        for _ in range(mult):
            acc = [0] * order
            for w, idx_map in maps:
                for i, v in enumerate(vec):
                    if v:
                        acc[idx_map[i]] += w * v
            vec = acc
    return Distribution(group, vec, total_den)


def _walk_integers(A: WeightMultiset, weights, step_den: int) -> Distribution:
    lo = sum(mult * min(s * a for s, _ in weights) for a, mult in A.items)
    hi = sum(mult * max(s * a for s, _ in weights) for a, mult in A.items)
    width = hi - lo + 1
    if width > WINDOW_CAP:
        raise ResourceLimitError(f"walk window of {width} points exceeds the cap")
    total_den = step_den ** A.n
    dtype = _np_dtype_for(total_den)
    vec = np.zeros(1, dtype=dtype)
    vec[0] = 1
    offset = 0
    for a, mult in A.items:
        offs = [s * a for s, _ in weights]
        span_lo, span_hi = min(offs), max(offs)
        for _ in range(mult):
            acc = np.zeros(len(vec) + span_hi - span_lo, dtype=dtype)
            for (s, w), off in zip(weights, offs):
                sh = off - span_lo
                acc[sh : sh + len(vec)] += w * vec
            vec = acc
            offset += span_lo
    assert offset == lo and len(vec) == width
    return Distribution(A.group, vec.tolist(), total_den, offset=offset)


def walk_distribution(A: WeightMultiset, law: StepLaw, group: Optional[AbelianGroup] = None) -> Distribution:
    """Exact law of sum_i a_i * x_i with iid multipliers x_i ~ law."""
    group = group or A.group
    if group != A.group:
        raise ValueError("multiset lives in a different group")
    weights, step_den = law.scalar_weights()
    if group.is_finite:
        return _walk_finite(A, weights, step_den)
    return _walk_integers(A, weights, step_den)


def _convolve_maps(d1: dict, d2: dict, group: AbelianGroup) -> dict:
    out = {}
    add = group.add
    for a, u in d1.items():
        for b, v in d2.items():
            key = add(a, b)
            out[key] = out.get(key, 0) + u * v
    return out


def word_walk_distribution(A: WeightMultiset, m: int, group: Optional[AbelianGroup] = None) -> Distribution:
    """Exact law of X_1 + ... + X_m, steps iid uniform on A (with multiplicity).

    Computed by repeated-squaring convolution so the cost is logarithmic in m.
    """
    if m < 1:
        raise ValueError("the walk needs at least one step")
    group = group or A.group
    n = A.n
    step = {a: mult for a, mult in A.items}
    result = {group.zero: 1}
    result_den = 1
    base, base_den = step, n
    mm = m
    while mm:
        if mm & 1:
            result = _convolve_maps(result, base, group)
            result_den *= base_den
        mm >>= 1
        if mm:
            base = _convolve_maps(base, base, group)
            base_den *= base_den
        if len(result) > WINDOW_CAP or len(base) > WINDOW_CAP:
            raise ResourceLimitError("word-walk support exceeds the window cap")
    if group.is_finite:
        nums = [0] * group.order
        for a, v in result.items():
            nums[group.index(a)] = v
        return Distribution(group, nums, result_den)
    lo = min(result)
    hi = max(result)
    nums = [result.get(v, 0) for v in range(lo, hi + 1)]
    return Distribution(group, nums, result_den, offset=lo)


def rho_classical(A: WeightMultiset, group: Optional[AbelianGroup] = None) -> RhoResult:
    """Max point probability of the +-1 Bernoulli walk."""
    return walk_distribution(A, StepLaw.signed(), group).max_prob()


def rho_xi(A: WeightMultiset, alpha, group: Optional[AbelianGroup] = None) -> RhoResult:
    """Max discrepancy of the lazy-Bernoulli walk from uniform over finite G."""
    group = group or A.group
    if not group.is_finite:
        raise UnsupportedOperationError("the discrepancy functional needs a finite group")
    return walk_distribution(A, StepLaw.lazy(alpha), group).sup_discrepancy()


def sup_probability(A: WeightMultiset, law: StepLaw, group: Optional[AbelianGroup] = None) -> RhoResult:
    """sup_a P(sum a_i x_i = a) for an arbitrary multiplier law."""
    return walk_distribution(A, law, group).max_prob()


def _subset_sum_counts_dense_z(A: WeightMultiset, m: int) -> dict:
    """Dense int64 DP over a bounded integer window (counts fit: <= C(n, m))."""
    values = [a for a, _ in A.items]
    lo = m * min(min(values), 0)
    hi = m * max(max(values), 0)
    width = hi - lo + 1
    dp = np.zeros((m + 1, width), dtype=np.int64)
    dp[0, -lo] = 1
    for a, mult in A.items:
        new = dp.copy()
        for t in range(1, min(mult, m) + 1):
            c = math.comb(mult, t)
            shift = t * a
            for j in range(0, m - t + 1):
                if shift >= 0:
                    new[j + t, shift:] += c * dp[j, : width - shift]
                else:
                    new[j + t, :shift] += c * dp[j, -shift:]
        dp = new
    return {s + lo: int(c) for s, c in enumerate(dp[m]) if c}


def _subset_sum_counts(A: WeightMultiset, m: int) -> dict:
    """counts[a] = number of m-element index subsets with sum a."""
    if A.group.torsion_free:
        values = [a for a, _ in A.items]
        width = m * (max(max(values), 0) - min(min(values), 0)) + 1
        if width <= 100_000 and math.comb(A.n, m) < _INT64_SAFE:
            return _subset_sum_counts_dense_z(A, m)
    dp = [{A.group.zero: 1}] + [dict() for _ in range(m)]
    add = A.group.add
    scale = A.group.scale
    for a, mult in A.items:
        new = [dict(layer) for layer in dp]
        for t in range(1, min(mult, m) + 1):
            ta = scale(a, t)
            c = math.comb(mult, t)
            for j in range(0, m - t + 1):
                for s, ways in dp[j].items():
                    key = add(s, ta)
                    tgt = new[j + t]
                    tgt[key] = tgt.get(key, 0) + c * ways
        dp = new
    return dp[m]


def rho_star_m(A: WeightMultiset, m: int) -> RhoResult:
    """Max fraction of m-element subsets of A sharing one sum; exact rational."""
    n = A.n
    if not 1 <= m <= n:
        raise ValueError(f"m must lie in [1, {n}]")
    counts = _subset_sum_counts(A, m)
    best = max(counts.values())
    witness = min(a for a, c in counts.items() if c == best)
    return RhoResult(Fraction(best, math.comb(n, m)), witness)


def rho_star(A: WeightMultiset) -> RhoResult:
    """rho* = rho*_m at m = floor(n/2)."""
    return rho_star_m(A, A.n // 2)


def rho_m(A: WeightMultiset, m: int, group: Optional[AbelianGroup] = None) -> RhoResult:
    """Word-walk functional: max probability over Z, max discrepancy over finite G.

    Requires a symmetric multiset.
    """
    if not A.is_symmetric:
        raise ValueError("the word-walk functional is defined for symmetric multisets")
    group = group or A.group
    dist = word_walk_distribution(A, m, group)
    if group.torsion_free:
        return dist.max_prob()
    return dist.sup_discrepancy()


def fourier_coefficient(A: WeightMultiset, law: StepLaw, zeta: Element, group: Optional[AbelianGroup] = None, m: int = 1) -> float:
    """|E e(zeta . S)| for the walk with the given step law (float)."""
    group = group or A.group
    if law.kind == "uniform":
        total = 0j
        for a, mult in A.items:
            theta = float(pairing(zeta, a, group))
            total += mult * complex(math.cos(2 * math.pi * theta), math.sin(2 * math.pi * theta))
        return abs(total / A.n) ** m
    out = 1.0
    for a, mult in A.items:
        theta = float(pairing(zeta, a, group))
        if law.kind == "signed":
            factor = abs(math.cos(2 * math.pi * theta))
        elif law.kind == "lazy":
            al = float(law.alpha)
            factor = abs(1 - al + al * math.cos(2 * math.pi * theta))
        else:  # bernoulli01
            al = float(law.alpha)
            factor = abs(complex(1 - al + al * math.cos(2 * math.pi * theta), al * math.sin(2 * math.pi * theta)))
        out *= factor**mult
    return out


def fourier_exp_bound(A: WeightMultiset, alpha, zeta: Element, group: Optional[AbelianGroup] = None, shifted: bool = False) -> float:
    """exp(-8 min(alpha, 1-alpha) * sum_i ||zeta.a_i (+1/2)||^2), dominating the
    lazy-walk coefficient; the shifted form serves the half-shifted statistics."""
    group = group or A.group
    alpha = Fraction(alpha)
    if not shifted and not 0 < alpha < 1:
        raise ValueError("the unshifted bound needs 0 < alpha < 1")
    if shifted and not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    stat = Fraction(0)
    half = Fraction(1, 2)
    for a, mult in A.items:
        x = pairing(zeta, a, group)
        if shifted:
            x = x + half
        stat += mult * frac_dist(x) ** 2
    return math.exp(-8 * float(min(alpha, 1 - alpha)) * float(stat))


def word_step_bound(A: WeightMultiset, zeta: Element, group: Optional[AbelianGroup] = None) -> float:
    """exp(-(8/n) min(sum ||zeta.a_i||^2, sum ||zeta.a_i + 1/2||^2)): per-step
    domination for the symmetric word walk."""
    group = group or A.group
    half = Fraction(1, 2)
    plain = Fraction(0)
    shifted = Fraction(0)
    for a, mult in A.items:
        x = pairing(zeta, a, group)
        plain += mult * frac_dist(x) ** 2
        shifted += mult * frac_dist(x + half) ** 2
    return math.exp(-8.0 / A.n * float(min(plain, shifted)))


def binomial_point_mass(n: int, alpha, m: int) -> Fraction:
    """P(Binomial(n, alpha) = m), exactly."""
    if not 0 <= m <= n:
        raise ValueError("m must lie in [0, n]")
    alpha = Fraction(alpha)
    return math.comb(n, m) * alpha**m * (1 - alpha) ** (n - m)
