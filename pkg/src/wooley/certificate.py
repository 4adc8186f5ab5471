"""
Factorization certificates for the Wooley semigroup, the wild semigroup and
the inverse semigroup, plus the built-in corpus of known identities.

Text form, one certificate per line:

    20 = g(3)^2 * g(5) * g(8) * g(27) * g(32) * g(41)      (Wooley)
    5 = 2^-2 * g(3)^2 * g(5) * g(8) * g(27) * g(32) * g(41) (wild)
    5 = 2^3 * g(2)^-1                                      (inverse)

JSON form, one object per file, with decimal strings for every integer.
"""

from __future__ import annotations

import json
import logging
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Union

from wooley.arith import format_rat, generator_value, parse_rat


log = logging.getLogger(__name__)

Pairs = tuple[tuple[int, int], ...]


class CertificateSyntaxError(ValueError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _normalize(pairs: Iterable[tuple[int, int]]) -> Pairs:
    merged: Counter[int] = Counter()
    for n, e in pairs:
        if n < 0:
            raise ValueError(f"generator index must be >= 0, got {n}")
        if e <= 0:
            raise ValueError(f"exponent must be positive, got {e} for g({n})")
        merged[n] += e
    return tuple(sorted(merged.items()))


def _check_canonical(pairs: Pairs) -> None:
    prev = -1
    for n, e in pairs:
        if n <= prev:
            raise ValueError("factor indices must be strictly increasing; use from_pairs()")
        if e <= 0:
            raise ValueError(f"exponent must be positive, got {e} for g({n})")
        prev = n


def _product(pairs: Pairs) -> Fraction:
    num = den = 1
    for n, e in pairs:
        num *= (3 * n + 2) ** e
        den *= (2 * n + 1) ** e
    return Fraction(num, den)


@dataclass(frozen=True)
class WooleyCert:
    """Product of generators g(n)^e; canonical (sorted, merged) and nonempty."""

    factors: Pairs

    def __post_init__(self) -> None:
        if not self.factors:
            raise ValueError("a Wooley certificate needs at least one generator")
        _check_canonical(self.factors)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> WooleyCert:
        return cls(_normalize(pairs))

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> WooleyCert:
        return cls(_normalize((n, 1) for n in indices))

    def value(self) -> Fraction:
        return _product(self.factors)

    def factor_count(self) -> int:
        return sum(e for _, e in self.factors)

    def indices(self) -> list[int]:
        """Expanded nondecreasing index sequence."""
        return [n for n, e in self.factors for _ in range(e)]


@dataclass(frozen=True)
class WildCert:
    """2^two_exponent times an optional Wooley product."""

    wooley: WooleyCert | None
    two_exponent: int

    def __post_init__(self) -> None:
        if self.wooley is None and self.two_exponent == 0:
            raise ValueError("a wild certificate without generators needs two_exponent != 0")

    def value(self) -> Fraction:
        base = self.wooley.value() if self.wooley is not None else Fraction(1)
        return base * Fraction(2) ** self.two_exponent


@dataclass(frozen=True)
class InverseCert:
    """2^two_exponent times a product of inverse generators (2n+1)/(3n+2)."""

    inv_factors: Pairs
    two_exponent: int

    def __post_init__(self) -> None:
        if self.two_exponent < 0:
            raise ValueError("inverse certificates use nonnegative powers of 2")
        _check_canonical(self.inv_factors)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]], two_exponent: int) -> InverseCert:
        return cls(_normalize(pairs), two_exponent)

    def value(self) -> Fraction:
        if not self.inv_factors:
            return Fraction(2**self.two_exponent)
        return Fraction(2**self.two_exponent) / _product(self.inv_factors)


Certificate = Union[WooleyCert, WildCert, InverseCert]


@dataclass(frozen=True)
class CertRecord:
    target: Fraction | None
    cert: Certificate


def cert_value(cert: Certificate) -> Fraction:
    return cert.value()


def verify(cert: Certificate, target: Fraction) -> bool:
    return cert.value() == target


def compose(a: WooleyCert, b: WooleyCert) -> WooleyCert:
    """Multiset union of factors; value(compose(a, b)) = value(a) * value(b)."""
    return WooleyCert.from_pairs(a.factors + b.factors)


def compose_all(*certs: WooleyCert) -> WooleyCert:
    if not certs:
        raise ValueError("compose_all needs at least one certificate")
    return WooleyCert.from_pairs(pair for c in certs for pair in c.factors)


def kind_of(cert: Certificate) -> str:
    if isinstance(cert, WooleyCert):
        return "wooley"
    if isinstance(cert, WildCert):
        return "wild"
    if isinstance(cert, InverseCert):
        return "inverse"
    raise TypeError(f"not a certificate: {cert!r}")


# --- text form --------------------------------------------------------------

_TERM = re.compile(
    r"\s*(?:g\s*\(\s*(?P<n>\d+)\s*\)|(?P<two>2))"
    r"(?:\s*\^\s*(?P<e>[+-]?\d+))?\s*"
)


def _format_term(n: int, e: int) -> str:
    return f"g({n})" if e == 1 else f"g({n})^{e}"


def _format_target(target: Fraction) -> str:
    return format_rat(target, machine=False)


def serialize(cert: Certificate, target: Fraction | None = None) -> str:
    if target is None:
        target = cert.value()
    terms: list[str] = []
    if isinstance(cert, WooleyCert):
        terms = [_format_term(n, e) for n, e in cert.factors]
    elif isinstance(cert, WildCert):
        terms.append(f"2^{cert.two_exponent}")
        if cert.wooley is not None:
            terms += [_format_term(n, e) for n, e in cert.wooley.factors]
    elif isinstance(cert, InverseCert):
        if cert.two_exponent or not cert.inv_factors:
            terms.append(f"2^{cert.two_exponent}")
        terms += [f"g({n})^-{e}" for n, e in cert.inv_factors]
    else:
        raise TypeError(f"not a certificate: {cert!r}")
    return f"{_format_target(target)} = " + " * ".join(terms)


def parse(text: str) -> CertRecord:
    """
    Parse one certificate line. Unsorted or repeated factors are normalized.
    The product side is checked before the target.
    """
    line = text.rstrip("\r\n")
    eq = line.find("=")
    if eq < 0:
        raise CertificateSyntaxError("expected '='", len(line))

    gterms: list[tuple[int, int, int]] = []
    two_exponent = 0
    saw_two = False
    pos = eq + 1
    while True:
        m = _TERM.match(line, pos)
        if m is None or m.end() == pos:
            raise CertificateSyntaxError("expected 'g(<n>)' or '2^<k>'", pos)
        e = int(m.group("e")) if m.group("e") is not None else 1
        if m.group("two") is not None:
            saw_two = True
            two_exponent += e
        else:
            if e == 0:
                raise CertificateSyntaxError("zero exponent", m.start("e"))
            gterms.append((int(m.group("n")), e, m.start()))
        pos = m.end()
        if pos == len(line):
            break
        if line[pos] != "*":
            raise CertificateSyntaxError("expected '*'", pos)
        pos += 1

    target_text = line[:eq].strip()
    target: Fraction | None = None
    if target_text:
        try:
            target = parse_rat(target_text)
        except ValueError as e:
            raise CertificateSyntaxError(f"bad target: {e}", 0) from e

    negative = [t for t in gterms if t[1] < 0]
    if negative:
        if len(negative) != len(gterms):
            raise CertificateSyntaxError("mixed signs on generator exponents", gterms[0][2])
        if two_exponent < 0:
            raise CertificateSyntaxError("inverse certificates need a nonnegative power of 2", eq + 1)
        cert: Certificate = InverseCert.from_pairs(((n, -e) for n, e, _ in gterms), two_exponent)
    elif saw_two:
        wooley = WooleyCert.from_pairs((n, e) for n, e, _ in gterms) if gterms else None
        try:
            cert = WildCert(wooley, two_exponent)
        except ValueError as e:
            raise CertificateSyntaxError(str(e), eq + 1) from e
    else:
        cert = WooleyCert.from_pairs((n, e) for n, e, _ in gterms)
    return CertRecord(target=target, cert=cert)


# --- JSON form --------------------------------------------------------------


def to_json(cert: Certificate, target: Fraction | None = None) -> dict[str, Any]:
    if target is None:
        target = cert.value()
    if isinstance(cert, WooleyCert):
        pairs, two = cert.factors, 0
    elif isinstance(cert, WildCert):
        pairs = cert.wooley.factors if cert.wooley is not None else ()
        two = cert.two_exponent
    else:
        pairs, two = cert.inv_factors, cert.two_exponent
    return {
        "target": {"num": str(target.numerator), "den": str(target.denominator)},
        "kind": kind_of(cert),
        "factors": [{"n": str(n), "e": str(e)} for n, e in pairs],
        "two_exponent": str(two),
    }


def from_json(obj: dict[str, Any]) -> CertRecord:
    try:
        kind = obj["kind"]
        pairs = [(int(f["n"]), int(f["e"])) for f in obj.get("factors", [])]
        two = int(obj.get("two_exponent", "0"))
        target = None
        if "target" in obj:
            target = Fraction(int(obj["target"]["num"]), int(obj["target"]["den"]))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise ValueError(f"malformed certificate JSON: {e}") from e

    if kind == "wooley":
        if two != 0:
            raise ValueError("wooley certificates carry two_exponent 0")
        cert: Certificate = WooleyCert.from_pairs(pairs)
    elif kind == "wild":
        cert = WildCert(WooleyCert.from_pairs(pairs) if pairs else None, two)
    elif kind == "inverse":
        cert = InverseCert.from_pairs(pairs, two)
    else:
        raise ValueError(f"unknown certificate kind: {kind!r}")
    return CertRecord(target=target, cert=cert)


def dumps(cert: Certificate, target: Fraction | None = None) -> str:
    return json.dumps(to_json(cert, target), sort_keys=True)


def loads(text: str) -> CertRecord:
    return from_json(json.loads(text))


# --- built-in corpus --------------------------------------------------------


@dataclass(frozen=True)
class Table1Row:
    label: str
    two_power: int
    prime: int
    cert: WooleyCert
    note: str = ""

    @property
    def target(self) -> Fraction:
        return Fraction(2**self.two_power * self.prime)


_TABLE1: tuple[tuple[int, int, Pairs, str], ...] = (
    (2, 5, ((3, 2), (5, 1), (8, 1), (27, 1), (32, 1), (41, 1)), ""),
    (2, 7, ((3, 1), (8, 1), (11, 1), (71, 1), (99, 1), (107, 1), (123, 1), (132, 1)), ""),
    (2, 11, ((3, 2), (8, 1), (11, 1), (71, 1), (99, 1), (107, 1), (123, 1), (132, 1)), ""),
    (
        3,
        13,
        ((3, 2), (5, 1), (8, 2), (11, 1), (71, 1), (99, 1), (107, 1), (123, 1), (132, 1)),
        "printed with g(5)^3 in both lines, which evaluates to 104*17^2/11^2; g(5)^1 gives 104",
    ),
    (2, 17, ((3, 2), (5, 1), (8, 1), (27, 1), (32, 1), (41, 1), (47, 1), (71, 1), (107, 1)), ""),
    (5, 19, ((3, 4), (5, 2), (8, 2), (12, 1), (27, 2), (32, 2), (41, 2)), ""),
    (
        5,
        23,
        (
            (3, 1), (8, 1), (11, 1), (15, 1), (45, 1), (51, 1), (68, 1), (71, 1),
            (99, 2), (107, 1), (117, 1), (123, 1), (132, 2), (176, 1),
        ),
        "index line wraps; indices matched to all printed fractions",
    ),
    (5, 29, ((3, 4), (5, 2), (8, 2), (9, 1), (12, 1), (27, 2), (32, 2), (41, 2)), ""),
    (
        11,
        31,
        (
            (3, 6), (5, 3), (8, 3), (9, 1), (12, 1), (20, 1),
            (27, 3), (32, 3), (41, 3), (54, 1), (72, 1),
        ),
        "fraction line omits (26/17)^3; index line embedded",
    ),
    (5, 37, ((3, 2), (8, 2), (11, 2), (24, 1), (71, 2), (99, 2), (107, 2), (123, 2), (132, 2)), ""),
    (
        10,
        41,
        ((3, 6), (5, 3), (8, 3), (9, 1), (12, 1), (27, 3), (32, 3), (41, 3), (54, 1), (72, 1)),
        "",
    ),
    (
        11,
        43,
        (
            (3, 5), (5, 2), (8, 3), (9, 1), (11, 1), (12, 1), (27, 2), (32, 2), (41, 2),
            (71, 1), (99, 1), (101, 1), (107, 1), (114, 1), (123, 1), (132, 1), (152, 1),
        ),
        "fraction line prints 125/87 where g(41) = 125/83; index line embedded",
    ),
    (
        11,
        47,
        (
            (3, 6), (5, 3), (8, 3), (9, 1), (12, 1), (15, 1), (20, 1),
            (27, 3), (32, 3), (41, 3), (54, 1), (72, 1),
        ),
        "",
    ),
)

# g(29) g(44) g(69) g(78) g(92) g(104) = 2^5 * 67 / (5 * 37)
SIXTY_SEVEN_IDENTITY: Pairs = ((29, 1), (44, 1), (69, 1), (78, 1), (92, 1), (104, 1))
# g(423) = 1271/847 = (31 * 41) / (7 * 11^2)
NONFREE_GENERATOR = 423


@lru_cache(maxsize=1)
def table1_rows() -> tuple[Table1Row, ...]:
    rows = []
    for k, p, pairs, note in _TABLE1:
        rows.append(Table1Row(label=f"2^{k}*{p}", two_power=k, prime=p, cert=WooleyCert(pairs), note=note))
    return tuple(rows)


def builtin_table1() -> list[tuple[Fraction, WooleyCert]]:
    return [(row.target, row.cert) for row in table1_rows()]


def table1_cert(two_power: int, prime: int) -> WooleyCert:
    for row in table1_rows():
        if row.two_power == two_power and row.prime == prime:
            return row.cert
    raise KeyError(f"no corpus row for 2^{two_power}*{prime}")


@lru_cache(maxsize=1)
def composed_certificates() -> dict[int, WooleyCert]:
    """Certificates assembled from corpus rows and two extra identities."""
    c67 = compose(
        compose(table1_cert(2, 5), table1_cert(5, 37)),
        WooleyCert(SIXTY_SEVEN_IDENTITY),
    )
    c_nonfree = compose(
        compose(table1_cert(2, 7), compose(table1_cert(2, 11), table1_cert(2, 11))),
        WooleyCert(((NONFREE_GENERATOR, 1),)),
    )
    out = {2**12 * 67: c67, 2**6 * 31 * 41: c_nonfree}
    for target, cert in out.items():
        if not verify(cert, Fraction(target)):
            raise RuntimeError(f"composed certificate for {target} does not verify")
    return out


@lru_cache(maxsize=1)
def known_certificates() -> dict[int, WooleyCert]:
    known = {int(row.target): row.cert for row in table1_rows()}
    known.update(composed_certificates())
    return known


def known_certificate(target: Fraction) -> WooleyCert | None:
    """Verified corpus certificate for an integer target, if any."""
    if target.denominator != 1:
        return None
    cert = known_certificates().get(target.numerator)
    if cert is not None and not verify(cert, target):
        log.warning("corpus certificate for %s does not verify; ignoring", target)
        return None
    return cert


def generator_fraction_line(cert: WooleyCert) -> str:
    """Human form with fractions, e.g. (11/7)^2 * 17/11."""
    parts = []
    for n, e in cert.factors:
        g = generator_value(n)
        frac = f"{g.numerator}/{g.denominator}"
        parts.append(frac if e == 1 else f"({frac})^{e}")
    return " * ".join(parts)
