import json
from fractions import Fraction

import pytest

from wooley.certificate import dumps, from_json, table1_cert, verify
from wooley.decider import Verdict
from wooley.survey import SurveyRecord
from wooley.wild import collatz_inverse_cert
from wooley.main import main


@pytest.fixture(autouse=True)
def _no_env_budget(monkeypatch):
    monkeypatch.delenv("WOOLEY_BUDGET", raising=False)


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_decide_non_member(capsys):
    code, out = _run(capsys, "decide", "5")
    assert code == 0
    assert out == "non-member\n"


def test_decide_member_text(capsys):
    code, out = _run(capsys, "decide", "4")
    assert code == 0
    assert out.splitlines() == ["member", "4 = g(0)^2"]


def test_decide_json_round_trips(capsys):
    code, out = _run(capsys, "decide", "55/21", "--json")
    assert code == 0
    obj = json.loads(out)
    assert obj["verdict"] == "member"
    assert obj["target"] == "55/21"
    rec = from_json(obj["cert"])
    assert verify(rec.cert, rec.target)


def test_decide_undecided_exit_code(capsys):
    code, out = _run(capsys, "decide", "1000000000001", "--budget", "10")
    assert code == 2
    assert out == "undecided\n"


@pytest.mark.parametrize(
    "argv",
    [
        ["decide", "3/0"],
        ["decide", "5", "--budget", "0"],
        ["frobnicate"],
        ["decide"],
        ["decide", "5", "--mode", "fast"],
    ],
)
def test_usage_errors_exit_one(capsys, argv):
    assert main(argv) == 1


def test_env_budget_and_flag_precedence(capsys, monkeypatch):
    monkeypatch.setenv("WOOLEY_BUDGET", "0")
    assert main(["decide", "5"]) == 1
    assert main(["decide", "1000000000001", "--budget", "10"]) == 2
    monkeypatch.setenv("WOOLEY_BUDGET", "10")
    assert main(["decide", "1000000000001"]) == 2


def test_config_file(capsys, tmp_path):
    path = tmp_path / "config.toml"
    path.write_text("[search]\nnode_budget = 10\n\n[output]\njson = true\n", encoding="utf-8")
    code, out = _run(capsys, "decide", "1000000000001", "--config", str(path))
    assert code == 2
    assert json.loads(out)["verdict"] == "undecided"


def test_heuristic_mode_flag(capsys):
    code, out = _run(capsys, "decide", "5", "--mode", "heuristic", "--budget", "1000")
    assert code == 2
    assert out == "undecided\n"


def test_verify_file(capsys, tmp_path):
    path = tmp_path / "certs.txt"
    path.write_text(
        "# known identities\n"
        "20 = g(3)^2 * g(5) * g(8) * g(27) * g(32) * g(41)\n"
        "\n"
        "5 = 2^3 * g(2)^-1\n",
        encoding="utf-8",
    )
    code, out = _run(capsys, "verify", str(path))
    assert code == 0
    assert out.splitlines()[-1] == "2/2 verified"


def test_verify_file_with_failures(capsys, tmp_path):
    path = tmp_path / "certs.txt"
    path.write_text("4 = g(0)^2\n5 = g(0)^2\n6 = g(0) +\n", encoding="utf-8")
    code, out = _run(capsys, "verify", str(path))
    assert code == 1
    lines = out.splitlines()
    assert lines[0] == "line 1: ok 4/1"
    assert lines[1].startswith("line 2: FAIL")
    assert lines[2].startswith("line 3: syntax error")
    assert lines[-1] == "1/3 verified"


def test_verify_json_file(capsys, tmp_path):
    path = tmp_path / "cert.json"
    path.write_text(dumps(table1_cert(2, 5), Fraction(20)) + "\n", encoding="utf-8")
    code, out = _run(capsys, "verify", str(path))
    assert code == 0
    assert out.splitlines() == ["json: ok 20/1", "1/1 verified"]


def test_verify_json_inverse_cert(capsys, tmp_path):
    path = tmp_path / "cert.json"
    path.write_text(dumps(collatz_inverse_cert(7), Fraction(7)), encoding="utf-8")
    code, out = _run(capsys, "verify", str(path))
    assert code == 0
    assert out.splitlines()[-1] == "1/1 verified"


def test_verify_json_wrong_target(capsys, tmp_path):
    path = tmp_path / "cert.json"
    path.write_text(dumps(table1_cert(2, 5), Fraction(21)), encoding="utf-8")
    code, out = _run(capsys, "verify", str(path))
    assert code == 1
    assert out.splitlines()[0].startswith("json: FAIL 21/1")


def test_verify_malformed_json(capsys, tmp_path):
    path = tmp_path / "cert.json"
    path.write_text('{"kind": "wooley"', encoding="utf-8")
    code, out = _run(capsys, "verify", str(path))
    assert code == 1
    assert out.splitlines()[-1] == "0/1 verified"


def test_verify_missing_file(capsys, tmp_path):
    assert main(["verify", str(tmp_path / "nope.txt")]) == 1


def test_table1(capsys):
    code, out = _run(capsys, "table1")
    assert code == 0
    assert out.splitlines()[-1] == "13/13 verified"
    assert "note:" in out


def test_table1_json(capsys):
    code, out = _run(capsys, "table1", "--json")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 14
    assert all(json.loads(line)["verified"] for line in lines[:13])


def test_ep(capsys):
    code, out = _run(capsys, "ep", "5", "--max-exp", "4")
    assert code == 0
    assert out == "e(5) = 2\n"


def test_ep_rejects_three(capsys):
    assert main(["ep", "3"]) == 1


def test_collatz_cert(capsys):
    code, out = _run(capsys, "collatz-cert", "5")
    assert code == 0
    assert out == "5 = 2^3 * g(2)^-1\n"


def test_collatz_cert_step_cap(capsys):
    code, _ = _run(capsys, "collatz-cert", "27", "--max-steps", "5")
    assert code == 2


def test_collatz_cert_27_json(capsys):
    code, out = _run(capsys, "collatz-cert", "27", "--json")
    assert code == 0
    rec = from_json(json.loads(out)["cert"])
    assert rec.cert.value() == 27


def test_smooth_count(capsys):
    code, out = _run(capsys, "smooth-count", "11", "--mult", "6", "--json", "--list")
    assert code == 0
    obj = json.loads(out)
    assert (obj["smooth_count"], obj["phi"]) == (6, 20)
    assert obj["non_smooth"][:3] == [13, 17, 19]


def test_smooth_count_large(capsys):
    code, out = _run(capsys, "smooth-count", "10007", "--mult", "6")
    assert code == 0
    assert "majority=true" in out


def test_pigeonhole(capsys):
    code, out = _run(capsys, "pigeonhole", "12347", "10007", "--json")
    assert code == 0
    s, s_prime = json.loads(out)["pair"]
    assert s * s_prime % 60042 == 12347


def test_pigeonhole_non_invertible(capsys):
    assert main(["pigeonhole", "12345", "10007"]) == 1


def test_count_streams_records(capsys, tmp_path):
    csv_path = tmp_path / "survey.csv"
    code, out = _run(capsys, "count", "10", "--threads", "1", "--csv", str(csv_path))
    assert code == 0
    records = [json.loads(line) for line in out.splitlines()]
    assert [r["n"] for r in records] == list(range(2, 11))
    assert records[0]["verdict"] == "member"
    assert csv_path.read_text(encoding="utf-8").startswith("n,verdict,cert,nodes")


def test_count_prints_each_record_as_it_arrives(capsys, monkeypatch):
    printed_before_second = []

    def records(x, cfg, workers, use_known):
        yield SurveyRecord(2, Verdict.MEMBER, source="corpus")
        printed_before_second.append(capsys.readouterr().out)
        yield SurveyRecord(3, Verdict.NON_MEMBER, source="filter")

    monkeypatch.setattr("wooley.main.iter_wooley_integers", records)
    code, out = _run(capsys, "count", "3")
    assert code == 0
    assert json.loads(printed_before_second[0])["n"] == 2
    assert json.loads(out)["n"] == 3


def test_irreducible(capsys):
    code, out = _run(capsys, "irreducible", "20")
    assert code == 0
    assert out == "wooley-number\n"
    code, out = _run(capsys, "irreducible", "4")
    assert out == "reducible (2 * 2)\n"


def test_nonfree(capsys):
    code, out = _run(capsys, "nonfree", "--budget", "1000")
    assert code == 0
    assert "81344 = " in out and "verified" in out
    assert "g(423) = 1271/847" in out


def test_h_seq(capsys):
    code, out = _run(capsys, "h-seq", "3")
    assert code == 0
    lines = out.splitlines()
    assert lines[:3] == ["1 8", "2 38", "3 188"]
    assert lines[3] == "recurrence ok, identity ok"


def test_wild_check_67(capsys):
    code, out = _run(capsys, "wild-check", "67")
    assert code == 0
    assert "[corpus]" in out
    assert "67 = 2^-12 * " in out


def test_witness(capsys):
    code, out = _run(capsys, "witness", "101", "--mult", "9", "--limit", "100000", "--json")
    assert code == 0
    w = json.loads(out)["witness"]
    assert w["multiple"] % 101 == 0
    assert 3 * w["n"] + 2 == w["smooth_part"]
