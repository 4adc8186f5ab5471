"""
Branch-and-bound membership test for the Wooley semigroup W0.

A representation r = g(n_1) ... g(n_m) with n_1 <= ... <= n_m is searched for
m = 1, 2, ... up to the largest m with (3/2)^m < r. Within one m the search is
depth-first over nondecreasing index sequences; the first index is bounded by
the largest n with g(n)^m >= r, and every residual is pruned with
feasible_residual(). The last two factors are not scanned: g(a) g(b) = r is
solved exactly from a divisor enumeration (pair_solutions). All bounds are
exact integer comparisons.

The node budget is charged once per visited node and once per candidate
index or divisor examined, so it bounds the work done, not only the depth.

Complete mode returns the minimal-m, lexicographically smallest certificate,
or NonMember once the bounded space is exhausted, or Undecided when the node
budget runs out first.
"""

from __future__ import annotations

import logging
import random
import threading
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd
from itertools import chain
from typing import Callable, Iterable, Iterator

from wooley.arith import (
    THREE_HALVES,
    _gen_pow_ge,
    _solve_generator_int,
    divisors,
    factorize,
    generator_value,
)
from wooley.certificate import WooleyCert, verify


log = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 10**8

# depth, index, residual
NodeCallback = Callable[[int, int, Fraction], None]


class SearchMode(str, Enum):
    COMPLETE = "complete"
    HEURISTIC = "heuristic"


class Verdict(str, Enum):
    MEMBER = "member"
    NON_MEMBER = "non-member"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class SearchConfig:
    node_budget: int = DEFAULT_NODE_BUDGET
    max_factors_override: int | None = None
    mode: SearchMode = SearchMode.COMPLETE
    emit_transcript: bool = False
    seed: int = 0
    restarts: int = 4

    def __post_init__(self) -> None:
        if self.node_budget < 1:
            raise ValueError(f"node_budget must be >= 1, got {self.node_budget}")
        if self.max_factors_override is not None and self.max_factors_override < 1:
            raise ValueError("max_factors_override must be positive when set")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        # accept plain strings from config files
        object.__setattr__(self, "mode", SearchMode(self.mode))


@dataclass(frozen=True)
class Decision:
    verdict: Verdict
    cert: WooleyCert | None = None
    nodes: int = 0

    @property
    def is_member(self) -> bool:
        return self.verdict is Verdict.MEMBER

    @property
    def is_definitive(self) -> bool:
        return self.verdict is not Verdict.UNDECIDED


class _BudgetExhausted(Exception):
    pass


class NodeBudget:
    """Shared expansion counter; take() raises once the budget is spent."""

    def __init__(self, limit: int) -> None:
        self._limit = limit
        self._used = 0
        self._lock = threading.Lock()

    @property
    def used(self) -> int:
        return self._used

    def take(self) -> None:
        with self._lock:
            if self._used >= self._limit:
                raise _BudgetExhausted()
            self._used += 1


# --- exact bounds -----------------------------------------------------------

_POW3: list[int] = [1]
_POW2: list[int] = [1]


def _pow32(k: int) -> tuple[int, int]:
    while len(_POW3) <= k:
        _POW3.append(_POW3[-1] * 3)
        _POW2.append(_POW2[-1] * 2)
    return _POW3[k], _POW2[k]


def _above_three_halves_pow(num: int, den: int, k: int) -> bool:
    """(3/2)^k < num/den."""
    p3, p2 = _pow32(k)
    return p3 * den < num * p2


def max_factor_count(r: Fraction) -> int:
    """Largest m with (3/2)^m < r (0 when r <= 3/2)."""
    if r <= THREE_HALVES:
        return 0
    num, den = r.numerator, r.denominator
    m = 1
    while _above_three_halves_pow(num, den, m + 1):
        m += 1
    return m


def _max_first_index_int(num: int, den: int, m: int, n_min: int) -> int | None:
    if not _gen_pow_ge(n_min, m, num, den):
        return None
    if not _above_three_halves_pow(num, den, m):
        raise ValueError("r <= (3/2)^m: every index satisfies g(n)^m >= r")
    lo = n_min
    hi = max(2 * n_min + 1, n_min + 1)
    while _gen_pow_ge(hi, m, num, den):
        lo, hi = hi, 2 * hi + 1
    # g(lo)^m >= r > g(hi)^m
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _gen_pow_ge(mid, m, num, den):
            lo = mid
        else:
            hi = mid
    return lo


def max_first_index(r: Fraction, m: int, n_min: int = 0) -> int | None:
    """
    Largest n >= n_min with g(n)^m >= r, or None if n_min already fails.
    Raises ValueError when r <= (3/2)^m, where the set is unbounded.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return _max_first_index_int(r.numerator, r.denominator, m, n_min)


def _feasible_int(num: int, den: int, k: int, n_min: int) -> bool:
    if den % 2 == 0 or num % 3 == 0:
        return False
    if not _above_three_halves_pow(num, den, k):
        return False
    if not _gen_pow_ge(n_min, k, num, den):
        return False
    if k == 1:
        n = _solve_generator_int(num, den)
        return n is not None and n >= n_min
    return True


def feasible_residual(r: Fraction, k: int, n_min: int = 0) -> bool:
    """
    Necessary conditions for r to be a product of exactly k generators with
    indices >= n_min: odd denominator, numerator prime to 3,
    (3/2)^k < r <= g(n_min)^k, and for k = 1 that r is itself g(n), n >= n_min.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return _feasible_int(r.numerator, r.denominator, k, n_min)


def pair_solutions(r: Fraction, n_min: int = 0) -> list[tuple[int, int]]:
    """
    Every (a, b) with n_min <= a <= b and g(a) g(b) = r, a increasing.

    With r = P/Q, clearing denominators gives
    (9Q - 4P)ab + (6Q - 2P)(a + b) + (4Q - P) = 0. With D = 4P - 9Q,
    E = 6Q - 2P and F = 4Q - P this factors as (Da - E)(Db - E) = E^2 + DF,
    so solutions come from the divisors of the right-hand side.
    """
    return list(_pair_solutions_int(r.numerator, r.denominator, n_min))


def _pair_solutions_int(num: int, den: int, n_min: int, budget: NodeBudget | None = None) -> Iterator[tuple[int, int]]:
    d = 4 * num - 9 * den
    if d <= 0:
        # g(a) g(b) > 9/4 always
        return
    e = 6 * den - 2 * num
    rhs = e * e + d * (4 * den - num)
    if rhs == 0:
        return
    found = []
    for div in divisors(abs(rhs)):
        for u in (div, -div):
            if budget is not None:
                budget.take()
            v = rhs // u
            if u > v or (u + e) % d or (v + e) % d:
                continue
            a, b = (u + e) // d, (v + e) // d
            if a < n_min:
                continue
            if (3 * a + 2) * (3 * b + 2) * den == num * (2 * a + 1) * (2 * b + 1):
                found.append((a, b))
    yield from sorted(found)


def _quick_reject(r: Fraction) -> bool:
    return r.denominator % 2 == 0 or r.numerator % 3 == 0 or r <= THREE_HALVES


# --- search -----------------------------------------------------------------


class _Search:
    def __init__(
        self,
        budget: NodeBudget,
        on_node: NodeCallback | None,
        order: Callable[[int, int, int, int], Iterable[int]] | None = None,
    ) -> None:
        self._budget = budget
        self._on_node = on_node
        self._order = order

    def run(self, num: int, den: int, k: int, n_min: int, depth: int = 0) -> list[int] | None:
        self._budget.take()
        if k == 1:
            n = _solve_generator_int(num, den)
            return [n] if n is not None and n >= n_min else None
        if k == 2:
            for a, b in _pair_solutions_int(num, den, n_min, self._budget):
                if self._on_node is not None:
                    self._on_node(depth, a, generator_value(b))
                return [a, b]
            return None
        hi = _max_first_index_int(num, den, k, n_min)
        if hi is None:
            return None
        candidates = range(n_min, hi + 1) if self._order is None else self._order(num, den, n_min, hi)
        for n in candidates:
            self._budget.take()
            a, b = 3 * n + 2, 2 * n + 1
            cn, cd = num * b, den * a
            g = gcd(cn, cd)
            cn //= g
            cd //= g
            if not _feasible_int(cn, cd, k - 1, n):
                continue
            if self._on_node is not None:
                self._on_node(depth, n, Fraction(cn, cd))
            rest = self.run(cn, cd, k - 1, n, depth + 1)
            if rest is not None:
                return [n] + rest
        return None


def _transcript_callback(cfg: SearchConfig, on_node: NodeCallback | None) -> NodeCallback | None:
    if on_node is not None or not cfg.emit_transcript:
        return on_node

    def _log_node(depth: int, index: int, residual: Fraction) -> None:
        log.debug("node depth=%d index=%d residual=%s", depth, index, residual)

    return _log_node


def _member(r: Fraction, indices: list[int], nodes: int) -> Decision:
    cert = WooleyCert.from_indices(indices)
    if not verify(cert, r):
        raise RuntimeError(f"search produced a certificate that does not verify to {r}: {indices}")
    return Decision(Verdict.MEMBER, cert, nodes)


def _factor_bound(r: Fraction, cfg: SearchConfig) -> tuple[int, bool]:
    """(bound on m, whether the bound is the forced one)."""
    forced = max_factor_count(r)
    if cfg.max_factors_override is not None and cfg.max_factors_override < forced:
        return cfg.max_factors_override, False
    return forced, True


def decide(r: Fraction, cfg: SearchConfig | None = None, on_node: NodeCallback | None = None) -> Decision:
    """Decide r in W0. Heuristic mode is delegated to decide_heuristic()."""
    cfg = cfg or SearchConfig()
    if r <= 0:
        raise ValueError(f"decide expects r > 0, got {r}")
    if cfg.mode is SearchMode.HEURISTIC:
        return decide_heuristic(r, cfg, on_node)
    if _quick_reject(r):
        log.debug("%s rejected without search", r)
        return Decision(Verdict.NON_MEMBER)

    num, den = r.numerator, r.denominator
    bound, forced = _factor_bound(r, cfg)
    budget = NodeBudget(cfg.node_budget)
    search = _Search(budget, _transcript_callback(cfg, on_node))
    log.info("decide %s: m <= %d, budget=%d", r, bound, cfg.node_budget)
    try:
        for m in range(1, bound + 1):
            if not _feasible_int(num, den, m, 0):
                continue
            found = search.run(num, den, m, 0)
            log.debug("decide %s: m=%d done, nodes=%d", r, m, budget.used)
            if found is not None:
                return _member(r, found, budget.used)
    except _BudgetExhausted:
        log.warning("decide %s: node budget %d exhausted", r, cfg.node_budget)
        return Decision(Verdict.UNDECIDED, nodes=budget.used)
    if not forced:
        return Decision(Verdict.UNDECIDED, nodes=budget.used)
    return Decision(Verdict.NON_MEMBER, nodes=budget.used)


# --- heuristic --------------------------------------------------------------


def _largest_prime_power_base(n: int) -> int | None:
    if n == 1:
        return None
    best_p, best_pe = None, 0
    for p, e in factorize(n).items():
        if p**e > best_pe:
            best_p, best_pe = p, p**e
    return best_p


# preferred candidates beyond this many are left in natural order
_PREFERRED_CAP = 4096


def _heuristic_order(rng: random.Random | None) -> Callable[[int, int, int, int], Iterable[int]]:
    """
    Candidates whose denominator 2n+1 is divisible by the prime p of the
    largest prime power in den(residual) come first; with an integer
    residual, candidates whose numerator 3n+2 divides it come first.
    """

    def order(num: int, den: int, n_min: int, hi: int) -> Iterable[int]:
        preferred: list[int] = []
        p = _largest_prime_power_base(den)
        if p is not None and p > 2:
            # 2n+1 = 0 mod p  <=>  n = (p-1)/2 mod p
            start = (p - 1) // 2
            if start < n_min:
                start += -(-(n_min - start) // p) * p
            preferred = list(range(start, min(hi, start + (_PREFERRED_CAP - 1) * p) + 1, p))
        elif den == 1:
            preferred = [n for n in range(n_min, min(hi, n_min + _PREFERRED_CAP) + 1) if num % (3 * n + 2) == 0]
        if rng is not None:
            rng.shuffle(preferred)
        seen = set(preferred)
        return chain(preferred, (n for n in range(n_min, hi + 1) if n not in seen))

    return order


def decide_heuristic(r: Fraction, cfg: SearchConfig | None = None, on_node: NodeCallback | None = None) -> Decision:
    """
    Sound, incomplete: Member with a verified certificate, else Undecided.
    Never reports NonMember. The budget is split across restarts.
    """
    cfg = cfg or SearchConfig(mode=SearchMode.HEURISTIC)
    if r <= 0:
        raise ValueError(f"decide expects r > 0, got {r}")
    if _quick_reject(r):
        return Decision(Verdict.UNDECIDED)

    num, den = r.numerator, r.denominator
    bound, _ = _factor_bound(r, cfg)
    callback = _transcript_callback(cfg, on_node)
    share = max(1, cfg.node_budget // cfg.restarts)
    total = 0
    for restart in range(cfg.restarts):
        rng = None if restart == 0 else random.Random(cfg.seed + restart)
        budget = NodeBudget(share)
        search = _Search(budget, callback, _heuristic_order(rng))
        try:
            for m in range(1, bound + 1):
                if not _feasible_int(num, den, m, 0):
                    continue
                found = search.run(num, den, m, 0)
                if found is not None:
                    return _member(r, found, total + budget.used)
            # bounded space exhausted without a hit; restarts cannot help
            total += budget.used
            break
        except _BudgetExhausted:
            total += budget.used
            log.debug("heuristic %s: restart %d spent %d nodes", r, restart, budget.used)
    log.info("heuristic %s: no certificate after %d nodes", r, total)
    return Decision(Verdict.UNDECIDED, nodes=total)
