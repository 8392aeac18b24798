"""Certified rational bounds for exp and exact square-root floors.

The structure-recovery certificates compare rational quantities against
expressions involving e^k; these helpers provide rational lower/upper bounds
so every certificate check is pure integer arithmetic (no floating point).
"""

from __future__ import annotations

import math
from fractions import Fraction

# e to 50 decimal digits, rounded down / up.
_E_LO = Fraction(271828182845904523536028747135266249775724709369995, 10**50)
_E_HI = _E_LO + Fraction(1, 10**50)

_TAYLOR_TERMS = 24
_ROUND_DEN = 1 << 48


def _round_down(x: Fraction, den: int = _ROUND_DEN) -> Fraction:
    return Fraction(math.floor(x * den), den)


def _round_up(x: Fraction, den: int = _ROUND_DEN) -> Fraction:
    return Fraction(math.ceil(x * den), den)


def _taylor_exp(r: Fraction, terms: int):
    """(partial sum, certified tail bound) for e^r with 0 <= r < 1."""
    total = Fraction(1)
    term = Fraction(1)
    for i in range(1, terms + 1):
        term = term * r / i
        total += term
    tail = 2 * term * r / (terms + 1)
    return total, tail


def exp_lower(x: Fraction) -> Fraction:
    """Rational lower bound on e^x."""
    x = _round_down(Fraction(x))
    k = math.floor(x)
    r = x - k
    base = _E_LO**k if k >= 0 else Fraction(1) / _E_HI ** (-k)
    partial, _ = _taylor_exp(r, _TAYLOR_TERMS)
    return base * partial


def exp_upper(x: Fraction) -> Fraction:
    """Rational upper bound on e^x."""
    x = _round_up(Fraction(x))
    k = math.floor(x)
    r = x - k
    base = _E_HI**k if k >= 0 else Fraction(1) / _E_LO ** (-k)
    partial, tail = _taylor_exp(r, _TAYLOR_TERMS)
    return base * (partial + tail)


def sqrt_floor(x: Fraction) -> int:
    """Largest integer k with k*k <= x, for nonnegative rational x."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("sqrt_floor needs a nonnegative argument")
    p, q = x.numerator, x.denominator
    k = math.isqrt(p // q)
    while (k + 1) * (k + 1) * q <= p:
        k += 1
    while k * k * q > p:
        k -= 1
    return k


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    candidate = max(2, n + 1)
    if candidate > 2 and candidate % 2 == 0:
        candidate += 1
    while not _is_prime(candidate):
        candidate += 1 if candidate == 2 else 2
    return candidate


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    # deterministic Miller-Rabin for 64-bit-ish inputs
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True
