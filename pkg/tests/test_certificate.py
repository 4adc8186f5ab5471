import random
from fractions import Fraction

import pytest

from wooley.arith import generator_value
from wooley.certificate import (
    CertificateSyntaxError,
    InverseCert,
    WildCert,
    WooleyCert,
    builtin_table1,
    cert_value,
    compose,
    compose_all,
    composed_certificates,
    dumps,
    from_json,
    generator_fraction_line,
    kind_of,
    known_certificate,
    loads,
    parse,
    serialize,
    table1_cert,
    table1_rows,
    to_json,
    verify,
)

EXAMPLE_20 = "20 = g(3)^2 * g(5) * g(8) * g(27) * g(32) * g(41)"


def test_certificates_are_canonical():
    cert = WooleyCert.from_indices([5, 3, 3])
    assert cert.factors == ((3, 2), (5, 1))
    assert cert.indices() == [3, 3, 5]
    assert cert.factor_count() == 3
    assert WooleyCert.from_pairs([(5, 1), (3, 1), (3, 1)]) == cert


def test_noncanonical_or_empty_certificates_rejected():
    with pytest.raises(ValueError):
        WooleyCert(())
    with pytest.raises(ValueError):
        WooleyCert(((5, 1), (3, 1)))
    with pytest.raises(ValueError):
        WooleyCert.from_pairs([(3, 0)])
    with pytest.raises(ValueError):
        WildCert(None, 0)
    with pytest.raises(ValueError):
        InverseCert.from_pairs([(2, 1)], -1)


def test_table1_has_thirteen_verified_rows():
    rows = table1_rows()
    assert len(rows) == 13
    for row in rows:
        assert row.target == 2**row.two_power * row.prime
        assert verify(row.cert, row.target), row.label
    assert [target for target, _ in builtin_table1()] == [row.target for row in rows]


def test_table1_row_2_13_printed_exponent_is_corrected():
    cert = table1_cert(3, 13)
    assert dict(cert.factors)[5] == 1
    printed = WooleyCert.from_pairs([(n, 3 if n == 5 else e) for n, e in cert.factors])
    assert printed.value() == Fraction(104 * 17**2, 11**2)
    assert cert.value() == 104


def test_table1_row_2_43_uses_the_index_form():
    cert = table1_cert(11, 43)
    assert 41 in dict(cert.factors)
    assert generator_value(41) == Fraction(125, 83)
    assert verify(cert, Fraction(2**11 * 43))


def test_table1_row_2_31_includes_g8_cubed():
    cert = table1_cert(11, 31)
    assert dict(cert.factors)[8] == 3
    assert generator_value(8) == Fraction(26, 17)
    without = WooleyCert.from_pairs([(n, e) for n, e in cert.factors if n != 8])
    assert without.value() * Fraction(26, 17) ** 3 == 2**11 * 31


def test_table1_cert_missing_row():
    with pytest.raises(KeyError):
        table1_cert(2, 3)


def test_composed_certificates():
    composed = composed_certificates()
    assert set(composed) == {274432, 81344}
    assert 2**12 * 67 == 274432 and 2**6 * 31 * 41 == 81344
    for target, cert in composed.items():
        assert verify(cert, Fraction(target))
    assert dict(composed[81344].factors)[423] == 1


def test_known_certificate_lookup():
    assert verify(known_certificate(Fraction(20)), Fraction(20))
    assert known_certificate(Fraction(21)) is None
    assert known_certificate(Fraction(1, 2)) is None


def test_compose_multiplies_values():
    a, b = table1_cert(2, 5), table1_cert(2, 7)
    assert compose(a, b).value() == 20 * 28
    assert compose_all(a, b, a).value() == 20 * 28 * 20
    with pytest.raises(ValueError):
        compose_all()


def test_compose_is_commutative_and_associative():
    rng = random.Random(3)

    def random_cert():
        return WooleyCert.from_indices([rng.randrange(0, 200) for _ in range(rng.randrange(1, 6))])

    for _ in range(200):
        a, b, c = random_cert(), random_cert(), random_cert()
        assert compose(a, b).value() == compose(b, a).value()
        assert compose(compose(a, b), c).value() == compose(a, compose(b, c)).value()
        # canonical form makes them equal as certificates too
        assert compose(a, b) == compose(b, a)
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_certificate_soundness_on_random_certificates():
    rng = random.Random(0)
    for _ in range(1000):
        indices = [rng.randrange(0, 500) for _ in range(rng.randrange(1, 8))]
        cert = WooleyCert.from_indices(indices)
        expected = Fraction(1)
        for n in indices:
            expected *= Fraction(3 * n + 2, 2 * n + 1)
        assert cert_value(cert) == expected
        assert verify(cert, expected)
        assert not verify(cert, expected * 2)


def test_serialize_example():
    assert serialize(table1_cert(2, 5), Fraction(20)) == EXAMPLE_20
    # target defaults to the certificate's value
    assert serialize(WooleyCert(((1, 1),))) == "5/3 = g(1)"


def test_parse_round_trip():
    rec = parse(EXAMPLE_20)
    assert rec.target == 20
    assert rec.cert == table1_cert(2, 5)
    assert serialize(rec.cert, rec.target) == EXAMPLE_20


def test_parse_normalizes_order_and_repeats():
    rec = parse("20 = g(41) * g(3) * g(5) * g(8) * g(27) * g(32) * g(3)")
    assert rec.cert == table1_cert(2, 5)


def test_parse_random_round_trip():
    rng = random.Random(1)
    for _ in range(200):
        cert = WooleyCert.from_indices(rng.randrange(0, 10**6) for _ in range(rng.randrange(1, 6)))
        assert parse(serialize(cert)).cert == cert


def test_parse_wild_and_inverse():
    wild = parse("5 = 2^-2 * g(3)^2 * g(5) * g(8) * g(27) * g(32) * g(41)")
    assert isinstance(wild.cert, WildCert)
    assert wild.cert.two_exponent == -2
    assert verify(wild.cert, wild.target)

    inverse = parse("5 = 2^3 * g(2)^-1")
    assert isinstance(inverse.cert, InverseCert)
    assert inverse.cert.inv_factors == ((2, 1),)
    assert verify(inverse.cert, Fraction(5))
    assert serialize(inverse.cert, Fraction(5)) == "5 = 2^3 * g(2)^-1"


def test_parse_rational_target():
    rec = parse("55/21 = g(1) * g(3)")
    assert rec.target == Fraction(55, 21)
    assert verify(rec.cert, rec.target)


@pytest.mark.parametrize(
    "line, position",
    [
        ("8 = g(0)^0", 9),
        ("g(3)", 4),
        ("20 = g(3) + g(5)", 10),
        ("x = g(0)", 0),
        ("2 = ", 3),
    ],
)
def test_parse_errors_carry_position(line, position):
    with pytest.raises(CertificateSyntaxError) as exc:
        parse(line)
    assert exc.value.position == position


def test_parse_rejects_mixed_signs():
    with pytest.raises(CertificateSyntaxError):
        parse("1 = g(1) * g(2)^-1")


def test_json_round_trip():
    cert = table1_cert(5, 19)
    obj = to_json(cert, Fraction(608))
    assert obj["kind"] == "wooley"
    assert obj["target"] == {"num": "608", "den": "1"}
    assert all(isinstance(f["n"], str) for f in obj["factors"])
    rec = loads(dumps(cert, Fraction(608)))
    assert rec.cert == cert and rec.target == 608


def test_json_wild_and_inverse():
    wild = WildCert(table1_cert(2, 5), -2)
    assert from_json(to_json(wild)).cert == wild
    inverse = InverseCert.from_pairs([(2, 1)], 3)
    assert from_json(to_json(inverse)).cert == inverse


@pytest.mark.parametrize(
    "obj",
    [
        {"kind": "bogus", "factors": []},
        {"factors": []},
        {"kind": "wooley", "factors": [{"n": "x", "e": "1"}]},
        {"kind": "wooley", "factors": [{"n": "1", "e": "1"}], "two_exponent": "2"},
    ],
)
def test_json_rejects_malformed(obj):
    with pytest.raises(ValueError):
        from_json(obj)


def test_kind_of():
    assert kind_of(table1_cert(2, 5)) == "wooley"
    assert kind_of(WildCert(None, -1)) == "wild"
    assert kind_of(InverseCert((), 1)) == "inverse"
    with pytest.raises(TypeError):
        kind_of("g(1)")


def test_generator_fraction_line():
    assert generator_fraction_line(WooleyCert(((3, 2), (5, 1)))) == "(11/7)^2 * 17/11"
