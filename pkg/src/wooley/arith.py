"""
Exact arithmetic shared by every other module.

Rationals are `fractions.Fraction` values (always in lowest terms, arbitrary
precision). Generator comparisons of the form g(n)^m >= r are done by
cross-multiplying integers, never through floating-point roots.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt

import numpy as np
import sympy


Rat = Fraction
# prime -> exponent, keys in increasing order
Factorization = dict[int, int]

THREE_HALVES = Fraction(3, 2)


def parse_rat(text: str) -> Fraction:
    """
    Parse "a/b" or a bare integer. Raises ValueError on b = 0 or junk.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty rational")
    if "/" in s:
        a, _, b = s.partition("/")
        try:
            num, den = int(a.strip()), int(b.strip())
        except ValueError as e:
            raise ValueError(f"malformed rational: {text!r}") from e
        if den == 0:
            raise ValueError(f"zero denominator in rational: {text!r}")
        return Fraction(num, den)
    try:
        return Fraction(int(s))
    except ValueError as e:
        raise ValueError(f"malformed rational: {text!r}") from e


def format_rat(r: Fraction, machine: bool = True) -> str:
    """Machine form always prints the denominator ("20/1")."""
    if not machine and r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def generator_value(n: int) -> Fraction:
    """g(n) = (3n+2)/(2n+1); numerator and denominator are always coprime."""
    if n < 0:
        raise ValueError(f"generator index must be >= 0, got {n}")
    return Fraction(3 * n + 2, 2 * n + 1)


def solve_generator(r: Fraction) -> int | None:
    """
    Return n with g(n) = r, or None.

    Since g(n) is already in lowest terms, r = g(n) iff den(r) = 2n+1 and
    num(r) = 3n+2.
    """
    num, den = r.numerator, r.denominator
    return _solve_generator_int(num, den)


def _solve_generator_int(num: int, den: int) -> int | None:
    if den % 2 == 0:
        return None
    n = (den - 1) // 2
    if num != 3 * n + 2:
        return None
    return n


def rat_pow(r: Fraction, k: int) -> Fraction:
    if k < 0:
        raise ValueError(f"exponent must be >= 0, got {k}")
    return Fraction(r.numerator**k, r.denominator**k)


def generator_power_at_least(n: int, m: int, r: Fraction) -> bool:
    """Exact test of g(n)^m >= r."""
    return _gen_pow_ge(n, m, r.numerator, r.denominator)


def _gen_pow_ge(n: int, m: int, num: int, den: int) -> bool:
    return (3 * n + 2) ** m * den >= num * (2 * n + 1) ** m


# --- primes -----------------------------------------------------------------


@lru_cache(maxsize=8)
def _sieve(limit: int) -> np.ndarray:
    is_prime = np.ones(limit, dtype=bool)
    is_prime[:2] = False
    for p in range(2, isqrt(limit - 1) + 1 if limit > 1 else 0):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime)


def primes_below(limit: int) -> np.ndarray:
    """All primes p < limit as an int64 array."""
    if limit <= 2:
        return np.zeros(0, dtype=np.int64)
    return _sieve(int(limit))


def largest_prime_factor_table(limit: int) -> np.ndarray:
    """
    table[n] = largest prime factor of n for 2 <= n <= limit; table[0] = 0,
    table[1] = 1.
    """
    table = np.zeros(limit + 1, dtype=np.int64)
    if limit >= 1:
        table[1] = 1
    for p in primes_below(limit + 1):
        # ascending primes, so the last write is the largest factor
        table[p::p] = p
    return table


def is_prime(n: int) -> bool:
    return bool(sympy.isprime(n))


def factorize(n: int) -> Factorization:
    """Complete factorization via sympy.factorint. factorize(1) == {}."""
    if n < 1:
        raise ValueError(f"factorize expects n >= 1, got {n}")
    return {int(p): int(e) for p, e in sorted(sympy.factorint(n).items())}


def divisors(n: int) -> list[int]:
    """Positive divisors of n >= 1 in increasing order."""
    if n < 1:
        raise ValueError(f"divisors expects n >= 1, got {n}")
    return [int(d) for d in sympy.divisors(n)]


def largest_prime_factor(n: int) -> int:
    """1 for n == 1."""
    return max(factorize(n), default=1)


def reconstruct(factors: Factorization) -> int:
    value = 1
    for p, e in factors.items():
        value *= p**e
    return value


def totient(n: int) -> int:
    result = n
    for p in factorize(n):
        result = result // p * (p - 1)
    return result
