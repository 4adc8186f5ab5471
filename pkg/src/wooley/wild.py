"""
Wild semigroup W = <W0, 1/2> and the inverse semigroup S = W^-1.

The characterization "a/b is in W iff gcd(a, 3b) = 1" holds conditionally on
the weak 3x+1 conjecture (since proved); it is reported as a separate,
conditional verdict and never mixed with constructive certificates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Any

from wooley.arith import is_prime
from wooley.certificate import InverseCert, WildCert, WooleyCert, known_certificate, serialize, verify
from wooley.decider import Decision, SearchConfig, Verdict, decide


log = logging.getLogger(__name__)

CHARACTERIZATION_BASIS = "conditional on the weak 3x+1 conjecture (since proved)"


class StepKind(str, Enum):
    ODD = "odd"
    EVEN = "even"


@dataclass(frozen=True)
class TStep:
    kind: StepKind
    input: int
    output: int

    def ratio(self) -> Fraction:
        """input / output: (2k+1)/(3k+2) on odd steps, 2 on even steps."""
        return Fraction(self.input, self.output)


def t_map(x: int) -> int:
    if x < 1:
        raise ValueError(f"T is defined on positive integers, got {x}")
    return (3 * x + 1) // 2 if x % 2 else x // 2


def collatz_trajectory(n: int, max_steps: int) -> list[TStep] | None:
    """
    Steps from n until 1 is reached, taking at least one step (so 1 -> 2 -> 1).
    None if 1 is not reached within max_steps.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    steps: list[TStep] = []
    x = n
    while len(steps) < max_steps:
        y = t_map(x)
        steps.append(TStep(StepKind.ODD if x % 2 else StepKind.EVEN, x, y))
        x = y
        if x == 1:
            return steps
    return None


def collatz_inverse_cert(n: int, max_steps: int = 100_000) -> InverseCert | None:
    """
    Each odd step at x = 2k+1 contributes the inverse generator index k, each
    even step one factor 2; the product telescopes to n.
    """
    steps = collatz_trajectory(n, max_steps)
    if steps is None:
        log.warning("T-trajectory of %d did not reach 1 within %d steps", n, max_steps)
        return None
    pairs = [((s.input - 1) // 2, 1) for s in steps if s.kind is StepKind.ODD]
    twos = sum(1 for s in steps if s.kind is StepKind.EVEN)
    cert = InverseCert.from_pairs(pairs, twos)
    if cert.value() != n:
        raise RuntimeError(f"inverse certificate for {n} evaluates to {cert.value()}")
    return cert


def wild_rational_member(r: Fraction) -> bool:
    """gcd(a, 3b) = 1 for r = a/b in lowest terms (conditional characterization)."""
    if r <= 0:
        raise ValueError(f"expected r > 0, got {r}")
    return gcd(r.numerator, 3 * r.denominator) == 1


@dataclass(frozen=True)
class WildSearchResult:
    cert: WildCert | None
    j: int | None = None
    # 1 is the unit of W and is not certified through generators
    unit: bool = False
    # True when every smaller j was decided NonMember by a complete search
    exact: bool = False
    decisions: tuple[tuple[int, Verdict, int], ...] = ()


def wild_integer_cert(m: int, max_exp: int, cfg: SearchConfig | None = None) -> WildSearchResult:
    """
    Search j = 0..max_exp for 2^j * m in W0; the smallest hit j gives a wild
    certificate of m with two_exponent -j.
    """
    if m < 1 or m % 2 == 0:
        raise ValueError(f"wild_integer_cert expects a positive odd integer, got {m}")
    if m == 1:
        return WildSearchResult(cert=None, unit=True)
    if m % 3 == 0:
        return WildSearchResult(cert=None)

    cfg = cfg or SearchConfig()
    all_complete = True
    trail: list[tuple[int, Verdict, int]] = []
    for j in range(max_exp + 1):
        target = Fraction(2**j * m)
        known = known_certificate(target)
        decision = Decision(Verdict.MEMBER, known) if known is not None else decide(target, cfg)
        trail.append((j, decision.verdict, decision.nodes))
        if decision.is_member:
            assert decision.cert is not None
            cert = WildCert(decision.cert, -j)
            log.info("wild certificate for %d at j=%d (exact=%s)", m, j, all_complete)
            return WildSearchResult(cert=cert, j=j, exact=all_complete, decisions=tuple(trail))
        if decision.verdict is Verdict.UNDECIDED:
            all_complete = False
    return WildSearchResult(cert=None, decisions=tuple(trail))


@dataclass(frozen=True)
class WildNumberReport:
    p: int
    prime: bool
    conjectural_wild: bool
    basis: str = CHARACTERIZATION_BASIS
    cert: WildCert | None = None
    j: int | None = None
    source: str | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "prime": self.prime,
            "conjectural_wild": self.conjectural_wild,
            "basis": self.basis,
            "constructive": self.cert is not None,
            "cert": serialize(self.cert, Fraction(self.p)) if self.cert is not None else None,
            "j": self.j,
            "source": self.source,
            "notes": list(self.notes),
        }


def _corpus_cert(p: int, max_exp: int) -> tuple[WildCert, int] | None:
    for j in range(max_exp + 1):
        known = known_certificate(Fraction(2**j * p))
        if known is not None:
            return WildCert(known, -j), j
    return None


def wild_number_check(p: int, cfg: SearchConfig | None = None, max_exp: int = 16) -> WildNumberReport:
    """
    Conjectural verdict (prime and != 3) and constructive certificate are
    reported side by side. Known identities are tried before searching.
    """
    if p < 1:
        raise ValueError(f"expected a positive integer, got {p}")
    prime = is_prime(p)
    conjectural = prime and p != 3
    notes: list[str] = []

    if p == 2:
        # 2 = g(0) is in W0 itself
        cert = WildCert(WooleyCert(((0, 1),)), 0)
        return WildNumberReport(p, prime, conjectural, cert=cert, j=0, source="generator")
    if p % 2 == 0 or p % 3 == 0 or p == 1:
        notes.append("no generator certificate attempted")
        return WildNumberReport(p, prime, conjectural, notes=notes)

    hit = _corpus_cert(p, max_exp)
    if hit is not None:
        cert, j = hit
        return WildNumberReport(p, prime, conjectural, cert=cert, j=j, source="corpus")

    result = wild_integer_cert(p, max_exp, cfg)
    if result.cert is None:
        notes.append(f"no certificate with j <= {max_exp} within budget")
        return WildNumberReport(p, prime, conjectural, notes=notes)
    if not verify(result.cert, Fraction(p)):
        raise RuntimeError(f"wild certificate for {p} does not verify")
    if not result.exact:
        notes.append("j is an upper bound: a smaller exponent was undecided")
    return WildNumberReport(p, prime, conjectural, cert=result.cert, j=result.j, source="search", notes=notes)
