"""
Empirical probes around Wooley integers: enumeration and counting,
irreducibility, minimal powers of two e(p), the h(k) sequence and the
non-freeness scaffold for 2^6 * 31 * 41.

Undecided results are always reported as such, never folded into a verdict.
"""

from __future__ import annotations

import csv
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import isqrt
from typing import Any, Iterable, Iterator, TextIO

from wooley.arith import factorize, generator_value, is_prime
from wooley.certificate import (
    NONFREE_GENERATOR,
    WooleyCert,
    composed_certificates,
    known_certificate,
    serialize,
    to_json,
    verify,
)
from wooley.decider import Decision, SearchConfig, Verdict, decide


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SurveyRecord:
    n: int
    verdict: Verdict
    cert: WooleyCert | None = None
    nodes: int = 0
    source: str = "search"

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "verdict": self.verdict.value,
            "cert": to_json(self.cert, Fraction(self.n)) if self.cert is not None else None,
            "nodes": self.nodes,
            "source": self.source,
        }

    def csv_row(self) -> list[str]:
        cert = serialize(self.cert, Fraction(self.n)) if self.cert is not None else ""
        return [str(self.n), self.verdict.value, cert, str(self.nodes)]


def _membership(n: int, cfg: SearchConfig, use_known: bool = True) -> SurveyRecord:
    if n % 3 == 0:
        return SurveyRecord(n, Verdict.NON_MEMBER, source="filter")
    target = Fraction(n)
    if use_known:
        known = known_certificate(target)
        if known is not None:
            return SurveyRecord(n, Verdict.MEMBER, known, source="corpus")
    d = decide(target, cfg)
    if d.is_member and (d.cert is None or not verify(d.cert, target)):
        raise RuntimeError(f"member record for {n} without a verifying certificate")
    return SurveyRecord(n, d.verdict, d.cert, d.nodes)


def _survey_one(args: tuple[int, SearchConfig, bool]) -> SurveyRecord:
    n, cfg, use_known = args
    return _membership(n, cfg, use_known)


def iter_wooley_integers(
    x: int,
    cfg: SearchConfig | None = None,
    workers: int = 1,
    use_known: bool = True,
) -> Iterator[SurveyRecord]:
    """Yield one record per n in 2..x in increasing n as each is decided. workers=0 uses every CPU."""
    if x < 2:
        raise ValueError(f"x must be >= 2, got {x}")
    cfg = cfg or SearchConfig()
    jobs = [(n, cfg, use_known) for n in range(2, x + 1)]
    if workers == 0:
        workers = os.cpu_count() or 1
    if workers <= 1:
        yield from map(_survey_one, jobs)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map() yields in submission order, so records stay sorted by n
        yield from pool.map(_survey_one, jobs, chunksize=4)


def wooley_integers_upto(
    x: int,
    cfg: SearchConfig | None = None,
    workers: int = 1,
    use_known: bool = True,
) -> list[SurveyRecord]:
    """One record per n in 2..x, sorted by n."""
    records = list(iter_wooley_integers(x, cfg, workers, use_known))
    confirmed = sum(1 for rec in records if rec.verdict is Verdict.MEMBER)
    undecided = sum(1 for rec in records if rec.verdict is Verdict.UNDECIDED)
    log.info("survey up to %d: %d members, %d undecided", x, confirmed, undecided)
    return records


def counting_function(records: Iterable[SurveyRecord]) -> list[tuple[int, int, int]]:
    """Cumulative (x, confirmed members <= x, undecided <= x)."""
    out = []
    confirmed = undecided = 0
    for rec in sorted(records, key=lambda r: r.n):
        confirmed += rec.verdict is Verdict.MEMBER
        undecided += rec.verdict is Verdict.UNDECIDED
        out.append((rec.n, confirmed, undecided))
    return out


def closure_violations(records: Iterable[SurveyRecord]) -> list[tuple[int, int]]:
    """Pairs of members whose product has a NonMember record."""
    by_n = {rec.n: rec for rec in records}
    members = sorted(n for n, rec in by_n.items() if rec.verdict is Verdict.MEMBER)
    bad = []
    for i, a in enumerate(members):
        for b in members[i:]:
            rec = by_n.get(a * b)
            if rec is not None and rec.verdict is Verdict.NON_MEMBER:
                bad.append((a, b))
    return bad


def write_csv(records: Iterable[SurveyRecord], fh: TextIO) -> None:
    writer = csv.writer(fh)
    writer.writerow(["n", "verdict", "cert", "nodes"])
    for rec in records:
        writer.writerow(rec.csv_row())


# --- irreducibility ---------------------------------------------------------


class Irreducibility(str, Enum):
    WOOLEY_NUMBER = "wooley-number"
    REDUCIBLE = "reducible"
    NOT_MEMBER = "not-member"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class IrreducibilityReport:
    n: int
    verdict: Irreducibility
    cert: WooleyCert | None = None
    witness: tuple[int, int] | None = None
    undecided_parts: tuple[int, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "verdict": self.verdict.value,
            "cert": serialize(self.cert, Fraction(self.n)) if self.cert is not None else None,
            "witness": list(self.witness) if self.witness else None,
            "undecided_parts": list(self.undecided_parts),
        }


def _divisor_pairs(n: int) -> list[tuple[int, int]]:
    return [(d, n // d) for d in range(2, isqrt(n) + 1) if n % d == 0]


def is_wooley_number(n: int, cfg: SearchConfig | None = None, use_known: bool = True) -> IrreducibilityReport:
    """
    n is a Wooley number iff it is a Wooley integer and no split n = d * (n/d)
    with 2 <= d <= n/d has both parts Wooley integers.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    cfg = cfg or SearchConfig()
    cache: dict[int, SurveyRecord] = {}

    def member(k: int) -> SurveyRecord:
        if k not in cache:
            cache[k] = _membership(k, cfg, use_known)
        return cache[k]

    top = member(n)
    if top.verdict is Verdict.NON_MEMBER:
        return IrreducibilityReport(n, Irreducibility.NOT_MEMBER)
    if top.verdict is Verdict.UNDECIDED:
        return IrreducibilityReport(n, Irreducibility.UNDECIDED, undecided_parts=(n,))

    pending: list[int] = []
    for d, e in _divisor_pairs(n):
        left, right = member(d), member(e)
        if left.verdict is Verdict.MEMBER and right.verdict is Verdict.MEMBER:
            return IrreducibilityReport(n, Irreducibility.REDUCIBLE, top.cert, witness=(d, e))
        if Verdict.NON_MEMBER in (left.verdict, right.verdict):
            continue
        pending += [k for k, rec in ((d, left), (e, right)) if rec.verdict is Verdict.UNDECIDED]
    if pending:
        return IrreducibilityReport(n, Irreducibility.UNDECIDED, top.cert, undecided_parts=tuple(sorted(set(pending))))
    return IrreducibilityReport(n, Irreducibility.WOOLEY_NUMBER, top.cert)


# --- e(p) -------------------------------------------------------------------


@dataclass(frozen=True)
class TwoExponentReport:
    p: int
    e: int | None
    # True: e is e(p); False: e only bounds e(p) from above
    exact: bool
    cert: WooleyCert | None = None
    trail: tuple[tuple[int, str, int], ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "e": self.e,
            "exact": self.exact,
            "cert": serialize(self.cert, Fraction(2**self.e * self.p)) if self.cert and self.e is not None else None,
            "trail": [{"e": e, "verdict": v, "nodes": nodes} for e, v, nodes in self.trail],
        }


def min_two_exponent(p: int, max_e: int, cfg: SearchConfig | None = None, use_known: bool = True) -> TwoExponentReport:
    """Smallest e <= max_e with 2^e * p a Wooley integer."""
    if p == 3:
        raise ValueError("3 never divides a member of W0")
    if p < 5 or not is_prime(p):
        raise ValueError(f"p must be a prime other than 2 and 3, got {p}")
    cfg = cfg or SearchConfig()
    exact = True
    trail: list[tuple[int, str, int]] = []
    for e in range(max_e + 1):
        rec = _membership(2**e * p, cfg, use_known)
        trail.append((e, rec.verdict.value, rec.nodes))
        if rec.verdict is Verdict.MEMBER:
            log.info("e(%d) %s %d", p, "=" if exact else "<=", e)
            return TwoExponentReport(p, e, exact, rec.cert, tuple(trail))
        if rec.verdict is Verdict.UNDECIDED:
            exact = False
    # e is None: no member up to max_e; exact means e(p) > max_e is proved
    return TwoExponentReport(p, None, exact, trail=tuple(trail))


# --- h(k) -------------------------------------------------------------------


@dataclass(frozen=True)
class HSequenceReport:
    values: list[tuple[int, int]]
    recurrence_ok: bool
    identity_ok: bool
    prime_divisors: list[int] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "values": [{"k": k, "h": str(h)} for k, h in self.values],
            "recurrence_ok": self.recurrence_ok,
            "identity_ok": self.identity_ok,
            "prime_divisors": [str(p) for p in self.prime_divisors],
        }


def h_value(k: int) -> int:
    return (3 * 5**k + 1) // 2


def h_sequence(k_max: int, with_divisors: bool = True) -> HSequenceReport:
    """
    h(k) = (3*5^k + 1)/2 for k = 1..k_max, checked against
    h(k) = 6h(k-1) - 5h(k-2) and h(k) = g((5^k - 1)/2) * 5^k.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    values = [(k, h_value(k)) for k in range(1, k_max + 1)]
    recurrence_ok = all(values[i][1] == 6 * values[i - 1][1] - 5 * values[i - 2][1] for i in range(2, len(values)))
    identity_ok = all(generator_value((5**k - 1) // 2) * 5**k == h for k, h in values)
    divisors: set[int] = set()
    if with_divisors:
        for _, h in values:
            divisors.update(factorize(h))
    if not recurrence_ok:
        log.error("h(k) recurrence failed up to k=%d", k_max)
    return HSequenceReport(values, recurrence_ok, identity_ok, sorted(divisors))


# --- non-freeness scaffold --------------------------------------------------

NONFREE_TARGET = 2**6 * 31 * 41


@dataclass(frozen=True)
class NonFreeReport:
    target: int
    cert: WooleyCert
    verified: bool
    generator_value: Fraction
    probes: list[tuple[int, int, Verdict, int]]
    # (a, b) with 2^a*31 and 2^b*41 both members and a + b <= max_sum
    blocking_pairs: list[tuple[int, int]]
    max_sum: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "target": self.target,
            "cert": serialize(self.cert, Fraction(self.target)),
            "verified": self.verified,
            "generator": f"g({NONFREE_GENERATOR}) = {self.generator_value}",
            "probes": [{"prime": p, "a": a, "verdict": v.value, "nodes": nodes} for p, a, v, nodes in self.probes],
            "blocking_pairs": [list(pair) for pair in self.blocking_pairs],
            "max_sum": self.max_sum,
        }


def nonfree_witness(cfg: SearchConfig | None = None, max_sum: int = 6) -> NonFreeReport:
    """
    Verify 2^6*31*41 = g(423) * (2^2*7) * (2^2*11)^2 and probe 2^a*31, 2^b*41
    for a, b <= max_sum. A Wooley number 2^c*31*41 exists unless some pair
    of members has a + b <= 6.
    """
    cfg = cfg or SearchConfig(node_budget=200_000)
    cert = composed_certificates()[NONFREE_TARGET]
    verified = verify(cert, Fraction(NONFREE_TARGET))

    probes: list[tuple[int, int, Verdict, int]] = []
    members: dict[int, list[int]] = {31: [], 41: []}
    for prime in (31, 41):
        for a in range(max_sum + 1):
            d: Decision = decide(Fraction(2**a * prime), cfg)
            probes.append((prime, a, d.verdict, d.nodes))
            if d.is_member:
                members[prime].append(a)
    pairs = [(a, b) for a in members[31] for b in members[41] if a + b <= max_sum]
    return NonFreeReport(
        target=NONFREE_TARGET,
        cert=cert,
        verified=verified,
        generator_value=generator_value(NONFREE_GENERATOR),
        probes=probes,
        blocking_pairs=pairs,
        max_sum=max_sum,
    )
