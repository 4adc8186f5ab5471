"""
Smooth numbers in arithmetic progressions.

An integer is Y-smooth when every prime factor is strictly smaller than Y,
so q itself is not q-smooth. Residue counting uses a numpy largest-prime-
factor sieve over 1..N; dickman_rough() is a float estimate used only to
size scan limits and never on an exact path.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Any

import numpy as np

from wooley.arith import is_prime, largest_prime_factor, largest_prime_factor_table, primes_below


log = logging.getLogger(__name__)

MULTIPLIERS = (6, 9)


@dataclass(frozen=True)
class SmoothClassReport:
    q: int
    multiplier: int
    modulus: int
    phi_N: int
    smooth_count: int
    majority: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "q": self.q,
            "multiplier": self.multiplier,
            "phi": self.phi_N,
            "smooth_count": self.smooth_count,
            "majority": self.majority,
        }


def is_smooth(n: int, Y: int) -> bool:
    if n < 1:
        raise ValueError(f"is_smooth expects n >= 1, got {n}")
    return largest_prime_factor(n) < Y


def _check_q(q: int, multiplier: int) -> None:
    if q in (2, 3):
        raise ValueError(f"q = {q} divides the multiplier; the modulus degenerates")
    if not is_prime(q):
        raise ValueError(f"q must be prime, got {q}")
    if multiplier not in MULTIPLIERS:
        raise ValueError(f"multiplier must be 6 or 9, got {multiplier}")


@lru_cache(maxsize=16)
def _class_masks(N: int, Y: int) -> tuple[np.ndarray, np.ndarray]:
    """(invertible mask, Y-smooth mask) over residues 0..N-1."""
    residues = np.arange(N, dtype=np.int64)
    invertible = np.gcd(residues, N) == 1
    lpf = largest_prime_factor_table(N)[:N]
    smooth = lpf < Y
    smooth[0] = False
    return invertible, smooth


def smooth_residue_report(q: int, multiplier: int = 6) -> SmoothClassReport:
    """Count invertible classes mod multiplier*q whose least positive residue is q-smooth."""
    _check_q(q, multiplier)
    N = multiplier * q
    invertible, smooth = _class_masks(N, q)
    phi = int(invertible.sum())
    count = int((invertible & smooth).sum())
    log.debug("smooth residues mod %d: %d of %d", N, count, phi)
    return SmoothClassReport(q, multiplier, N, phi, count, 2 * count > phi)


def non_smooth_residues(q: int, multiplier: int = 6) -> list[int]:
    _check_q(q, multiplier)
    N = multiplier * q
    invertible, smooth = _class_masks(N, q)
    return [int(r) for r in np.flatnonzero(invertible & ~smooth)]


def predicted_exceptions(q: int) -> list[int]:
    """
    Invertible residues below 6q that are not q-smooth: primes q < p' < 6q
    and 5p' for primes q < p' < 6q/5 (p' = q is not invertible).
    """
    _check_q(q, 6)
    out = {int(p) for p in primes_below(6 * q) if p > q}
    out |= {5 * int(p) for p in primes_below(6 * q) if p > q and 5 * p < 6 * q}
    return sorted(out)


def find_smooth_in_class(r: int, N: int, Y: int, limit: int) -> int | None:
    """Smallest n = r (mod N) with 1 <= n <= limit*N and n Y-smooth."""
    if math.gcd(r, N) != 1:
        raise ValueError(f"class {r} is not invertible mod {N}")
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    n = r % N or N
    while n <= limit * N:
        if is_smooth(n, Y):
            return n
        n += N
    return None


@lru_cache(maxsize=16)
def _smooth_classes(N: int, Y: int) -> tuple[frozenset[int], int]:
    invertible, smooth = _class_masks(N, Y)
    sigma = frozenset(int(s) for s in np.flatnonzero(invertible & smooth))
    return sigma, int(invertible.sum())


def pigeonhole_product(r: int, N: int, Y: int) -> tuple[int, int] | None:
    """
    If more than half the invertible classes mod N have a Y-smooth least
    residue, every invertible r is s * s' with both classes in that set;
    returns the smooth least residues (S, S') with the smallest S.
    """
    if math.gcd(r, N) != 1:
        raise ValueError(f"class {r} is not invertible mod {N}")
    sigma, phi = _smooth_classes(N, Y)
    if 2 * len(sigma) <= phi:
        return None
    r %= N
    for s in sorted(sigma):
        s_prime = r * pow(s, -1, N) % N
        if s_prime in sigma:
            return s, s_prime
    # unreachable when the majority holds
    raise RuntimeError(f"pigeonhole failed for r={r} mod {N} despite a smooth majority")


def dickman_rough(u: float) -> float:
    """rho(u) ~ u^-u. A rough density, not the Dickman function itself."""
    if u <= 0:
        raise ValueError(f"u must be > 0, got {u}")
    return float(u ** (-u))


def suggested_scan_limit(N: int, Y: int, cap: int = 10**6) -> int:
    """
    Number of progression terms worth scanning for a Y-smooth element,
    sized as a few multiples of 1/rho(u) with u = log(N^2)/log(Y).
    """
    if Y < 3:
        return cap
    u = max(1.0, 2 * math.log(N) / math.log(Y))
    return int(min(cap, math.ceil(8 / dickman_rough(u))))


@dataclass(frozen=True)
class ProgressionWitness:
    q: int
    modulus: int
    # the searched multiple of q and its smooth cofactor
    multiple: int
    smooth_part: int
    n: int

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def wild_progression_witness(q: int, limit: int = 10**5) -> ProgressionWitness | None:
    """
    n with q | 3n+2, 3 not dividing 2n+1 and 2n+1 q-smooth, so that
    3n+2 = g(n) * (2n+1) is a multiple of q built from smaller wild integers.
    2n+1 runs through one invertible class mod 6q.
    """
    _check_q(q, 6)
    n0 = (-2 * pow(3, -1, q)) % q
    for t in range(limit):
        n = n0 + t * q
        s = 2 * n + 1
        if s % 3 and is_smooth(s, q):
            return ProgressionWitness(q, 6 * q, 3 * n + 2, s, n)
    return None


def inverse_progression_witness(q: int, limit: int = 10**5) -> ProgressionWitness | None:
    """
    k with 9kq + (3q+1)/2 q-smooth. Then 2n+1 = (6k+1)q and 3n+2 is that
    smooth value, placing (6k+1)q in the inverse semigroup.
    """
    _check_q(q, 9)
    base = (3 * q + 1) // 2
    for k in range(limit):
        v = 9 * k * q + base
        if is_smooth(v, q):
            n = ((6 * k + 1) * q - 1) // 2
            return ProgressionWitness(q, 9 * q, (6 * k + 1) * q, v, n)
    return None
