from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from wooley.arith import format_rat, parse_rat
from wooley.certificate import (
    CertificateSyntaxError,
    CertRecord,
    generator_fraction_line,
    loads,
    parse,
    serialize,
    table1_rows,
    to_json,
    verify,
)
from wooley.config import AppConfig, apply_env, load_config
from wooley.decider import SearchConfig, SearchMode, decide
from wooley.logging_setup import enable_transcript, setup_logging
from wooley.smooth import (
    inverse_progression_witness,
    non_smooth_residues,
    pigeonhole_product,
    smooth_residue_report,
    suggested_scan_limit,
    wild_progression_witness,
)
from wooley.survey import (
    Irreducibility,
    counting_function,
    h_sequence,
    is_wooley_number,
    iter_wooley_integers,
    min_two_exponent,
    nonfree_witness,
    write_csv,
)
from wooley.wild import collatz_inverse_cert, wild_number_check


log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNDECIDED = 2


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with status 2, which is reserved for Undecided
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class _Run:
    config: AppConfig
    search: SearchConfig
    json: bool

    def emit(self, obj: dict[str, Any], text: str) -> None:
        print(json.dumps(obj, sort_keys=True) if self.json else text)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


# --- subcommands ------------------------------------------------------------


def _cmd_decide(args: argparse.Namespace, run: _Run) -> int:
    target = parse_rat(args.r)
    d = decide(target, run.search)
    text = d.verdict.value
    if d.cert is not None:
        text += "\n" + serialize(d.cert, target)
    run.emit(
        {
            "verdict": d.verdict.value,
            "target": format_rat(target),
            "cert": to_json(d.cert, target) if d.cert is not None else None,
            "nodes": d.nodes,
        },
        text,
    )
    return EXIT_OK if d.is_definitive else EXIT_UNDECIDED


def _check_record(label: str, rec: CertRecord) -> bool:
    if rec.target is None:
        print(f"{label}: missing target")
        return False
    if verify(rec.cert, rec.target):
        print(f"{label}: ok {format_rat(rec.target)}")
        return True
    print(f"{label}: FAIL {format_rat(rec.target)} != {format_rat(rec.cert.value())}")
    return False


def _cmd_verify(args: argparse.Namespace, run: _Run) -> int:
    text = Path(args.file).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        # one JSON object per file
        try:
            rec = loads(text)
        except ValueError as e:
            print(f"json: {e}")
            print("0/1 verified")
            return EXIT_ERROR
        ok = _check_record("json", rec)
        print(f"{int(ok)}/1 verified")
        return EXIT_OK if ok else EXIT_ERROR

    ok = total = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        total += 1
        try:
            rec = parse(line)
        except CertificateSyntaxError as e:
            print(f"line {lineno}: syntax error at column {e.position}: {e}")
            continue
        ok += _check_record(f"line {lineno}", rec)
    print(f"{ok}/{total} verified")
    return EXIT_OK if ok == total else EXIT_ERROR


def _cmd_table1(args: argparse.Namespace, run: _Run) -> int:
    rows = table1_rows()
    ok = 0
    for row in rows:
        good = verify(row.cert, row.target)
        ok += good
        if run.json:
            print(json.dumps({"label": row.label, "verified": good, "cert": to_json(row.cert, row.target), "note": row.note}, sort_keys=True))
            continue
        print(f"{row.label:>8} {'ok' if good else 'FAIL'}  {generator_fraction_line(row.cert)}")
        if row.note:
            print(f"{'':>8} note: {row.note}")
    print(f"{ok}/{len(rows)} verified")
    return EXIT_OK if ok == len(rows) else EXIT_ERROR


def _cmd_ep(args: argparse.Namespace, run: _Run) -> int:
    max_e = args.max_exp if args.max_exp is not None else run.config.output.max_exp
    report = min_two_exponent(args.p, max_e, run.search, run.config.survey.use_known)
    if report.e is not None:
        text = f"e({args.p}) {'=' if report.exact else '<='} {report.e}"
    elif report.exact:
        text = f"e({args.p}) > {max_e}"
    else:
        text = f"e({args.p}) undetermined up to {max_e}"
    run.emit(report.to_dict(), text)
    return EXIT_OK if report.exact else EXIT_UNDECIDED


def _cmd_collatz_cert(args: argparse.Namespace, run: _Run) -> int:
    max_steps = args.max_steps if args.max_steps is not None else run.config.output.max_steps
    cert = collatz_inverse_cert(args.n, max_steps)
    if cert is None:
        run.emit({"n": args.n, "cert": None}, f"no trajectory to 1 within {max_steps} steps")
        return EXIT_UNDECIDED
    target = Fraction(args.n)
    run.emit({"n": args.n, "cert": to_json(cert, target)}, serialize(cert, target))
    return EXIT_OK


def _cmd_smooth_count(args: argparse.Namespace, run: _Run) -> int:
    report = smooth_residue_report(args.q, args.mult)
    obj = report.to_dict()
    text = (
        f"mod {report.modulus}: {report.smooth_count} of {report.phi_N} invertible classes "
        f"are {report.q}-smooth (majority={str(report.majority).lower()})"
    )
    if args.list:
        exceptions = non_smooth_residues(args.q, args.mult)[: run.config.output.limit]
        obj["non_smooth"] = exceptions
        text += "\nnon-smooth: " + " ".join(str(r) for r in exceptions)
    run.emit(obj, text)
    return EXIT_OK


def _cmd_pigeonhole(args: argparse.Namespace, run: _Run) -> int:
    # only used to validate q and the multiplier
    smooth_residue_report(args.q, args.mult)
    N = args.mult * args.q
    pair = pigeonhole_product(args.r, N, args.q)
    if pair is None:
        run.emit({"r": args.r, "modulus": N, "pair": None}, f"no {args.q}-smooth majority mod {N}")
        return EXIT_OK
    s, s_prime = pair
    run.emit({"r": args.r, "modulus": N, "pair": [s, s_prime]}, f"{args.r} = {s} * {s_prime} (mod {N})")
    return EXIT_OK


def _cmd_count(args: argparse.Namespace, run: _Run) -> int:
    workers = run.config.survey.workers
    records = []
    for rec in iter_wooley_integers(args.x, run.search, workers, run.config.survey.use_known):
        print(json.dumps(rec.to_dict(), sort_keys=True), flush=True)
        records.append(rec)
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            write_csv(records, fh)
    _, confirmed, undecided = counting_function(records)[-1]
    log.info("count %d: confirmed=%d undecided=%d", args.x, confirmed, undecided)
    return EXIT_UNDECIDED if undecided else EXIT_OK


def _cmd_irreducible(args: argparse.Namespace, run: _Run) -> int:
    report = is_wooley_number(args.n, run.search, run.config.survey.use_known)
    text = report.verdict.value
    if report.witness is not None:
        text += f" ({report.witness[0]} * {report.witness[1]})"
    run.emit(report.to_dict(), text)
    return EXIT_UNDECIDED if report.verdict is Irreducibility.UNDECIDED else EXIT_OK


def _cmd_nonfree(args: argparse.Namespace, run: _Run) -> int:
    cfg = run.search
    if args.budget is None:
        cfg = replace(cfg, node_budget=run.config.survey.probe_budget)
    report = nonfree_witness(cfg, args.max_sum)
    lines = [
        f"{serialize(report.cert, Fraction(report.target))}  {'verified' if report.verified else 'FAILED'}",
        f"g(423) = {report.generator_value}",
    ]
    lines += [f"2^{a}*{p}: {v.value} ({nodes} nodes)" for p, a, v, nodes in report.probes]
    lines.append(f"pairs with a + b <= {report.max_sum}: {report.blocking_pairs or 'none'}")
    run.emit(report.to_dict(), "\n".join(lines))
    return EXIT_OK if report.verified else EXIT_ERROR


def _cmd_h_seq(args: argparse.Namespace, run: _Run) -> int:
    report = h_sequence(args.k, with_divisors=not args.no_divisors)
    lines = [f"{k} {h}" for k, h in report.values]
    lines.append(f"recurrence {'ok' if report.recurrence_ok else 'FAILED'}, identity {'ok' if report.identity_ok else 'FAILED'}")
    if report.prime_divisors:
        lines.append("primes: " + " ".join(str(p) for p in report.prime_divisors))
    run.emit(report.to_dict(), "\n".join(lines))
    return EXIT_OK if report.recurrence_ok and report.identity_ok else EXIT_ERROR


def _cmd_wild_check(args: argparse.Namespace, run: _Run) -> int:
    max_e = args.max_exp if args.max_exp is not None else run.config.output.max_exp
    report = wild_number_check(args.p, run.search, max_e)
    lines = [f"{args.p}: {'wild number' if report.conjectural_wild else 'not a wild number'} ({report.basis})"]
    if report.cert is not None:
        lines.append(f"{serialize(report.cert, Fraction(args.p))}  [{report.source}]")
    lines += report.notes
    run.emit(report.to_dict(), "\n".join(lines))
    if report.conjectural_wild and report.cert is None:
        return EXIT_UNDECIDED
    return EXIT_OK


def _cmd_witness(args: argparse.Namespace, run: _Run) -> int:
    finder = wild_progression_witness if args.mult == 6 else inverse_progression_witness
    limit = args.limit if args.limit is not None else suggested_scan_limit(args.mult * args.q, args.q)
    w = finder(args.q, limit)
    if w is None:
        run.emit({"q": args.q, "witness": None}, f"no witness within {limit} terms")
        return EXIT_UNDECIDED
    if args.mult == 6:
        text = f"n = {w.n}: 3n+2 = {w.multiple} = g({w.n}) * {w.smooth_part}"
    else:
        text = f"n = {w.n}: 2n+1 = {w.multiple}, 3n+2 = {w.smooth_part}"
    run.emit({"q": args.q, "witness": w.to_dict()}, text)
    return EXIT_OK


# --- parser -----------------------------------------------------------------


def _common_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default=None, help="Path to config.toml or config.yaml")
    p.add_argument("--log-level", default="INFO", help="DEBUG|INFO|WARNING|ERROR")
    p.add_argument("--log-file", default=None, help="Also append log records to this file")
    p.add_argument("--transcript", action="store_true", default=None, help="Log every search node at DEBUG")
    p.add_argument("--budget", type=int, default=None, help="Node budget per decision (env: WOOLEY_BUDGET)")
    p.add_argument("--mode", choices=[m.value for m in SearchMode], default=None)
    p.add_argument("--seed", type=int, default=None, help="Seed for heuristic restarts")
    p.add_argument("--json", action="store_true", default=None, help="Machine-readable output")
    p.add_argument("--threads", type=int, default=None, help="Survey workers (0 = all CPUs)")
    return p


def _build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    p = _ArgumentParser(prog="wooley", description="Membership in the Wooley semigroup and related probes")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable[[argparse.Namespace, _Run], int], help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(handler=handler)
        return sp

    sp = add("decide", _cmd_decide, "decide r in W0")
    sp.add_argument("r", help="integer or a/b")

    sp = add("verify", _cmd_verify, "check every certificate line in FILE")
    sp.add_argument("file")

    add("table1", _cmd_table1, "verify the 13 built-in 2^k * p certificates")

    sp = add("ep", _cmd_ep, "smallest e with 2^e * p a Wooley integer")
    sp.add_argument("p", type=int)
    sp.add_argument("--max-exp", type=int, default=None)

    sp = add("collatz-cert", _cmd_collatz_cert, "inverse certificate from the 3x+1 trajectory")
    sp.add_argument("n", type=_positive_int)
    sp.add_argument("--max-steps", type=_positive_int, default=None)

    sp = add("smooth-count", _cmd_smooth_count, "count q-smooth invertible classes mod mult*q")
    sp.add_argument("q", type=int)
    sp.add_argument("--mult", type=int, choices=[6, 9], default=6)
    sp.add_argument("--list", action="store_true", help="also list non-smooth classes")

    sp = add("pigeonhole", _cmd_pigeonhole, "write r as a product of two q-smooth classes mod mult*q")
    sp.add_argument("r", type=int)
    sp.add_argument("q", type=int)
    sp.add_argument("--mult", type=int, choices=[6, 9], default=6)

    sp = add("count", _cmd_count, "survey Wooley integers up to X as JSON lines")
    sp.add_argument("x", type=int)
    sp.add_argument("--csv", default=None, help="also write a CSV file")

    sp = add("irreducible", _cmd_irreducible, "test whether n is a Wooley number")
    sp.add_argument("n", type=int)

    sp = add("nonfree", _cmd_nonfree, "verify the 2^6*31*41 identity and probe its side conditions")
    sp.add_argument("--max-sum", type=int, default=6)

    sp = add("h-seq", _cmd_h_seq, "h(k) = (3*5^k + 1)/2 with its recurrence")
    sp.add_argument("k", type=_positive_int)
    sp.add_argument("--no-divisors", action="store_true")

    sp = add("wild-check", _cmd_wild_check, "wild-number verdict and constructive certificate for p")
    sp.add_argument("p", type=_positive_int)
    sp.add_argument("--max-exp", type=int, default=None)

    sp = add("witness", _cmd_witness, "smooth witness in the progression mod mult*q")
    sp.add_argument("q", type=int)
    sp.add_argument("--mult", type=int, choices=[6, 9], default=6)
    sp.add_argument("--limit", type=_positive_int, default=None)
    return p


def _resolve_config(args: argparse.Namespace) -> AppConfig:
    """defaults < config file < WOOLEY_BUDGET < flags"""
    config = load_config(args.config) if args.config else AppConfig()
    if args.budget is None:
        config = apply_env(config)
    search = config.search
    if args.budget is not None:
        search = replace(search, node_budget=args.budget)
    if args.mode is not None:
        search = replace(search, mode=args.mode)
    if args.seed is not None:
        search = replace(search, seed=args.seed)
    if args.transcript is not None:
        search = replace(search, transcript=args.transcript)
    survey = config.survey if args.threads is None else replace(config.survey, workers=args.threads)
    output = config.output if args.json is None else replace(config.output, json=args.json)
    return replace(config, search=search, survey=survey, output=output)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_ERROR
    try:
        setup_logging(args.log_level, args.log_file)
    except OSError as e:
        print(f"error: cannot open log file: {e}", file=sys.stderr)
        return EXIT_ERROR

    try:
        config = _resolve_config(args)
        if config.search.transcript:
            enable_transcript()
        run = _Run(config=config, search=config.search_config(), json=config.output.json)
        return args.handler(args, run)
    except (ValueError, OSError, RuntimeError) as e:
        log.error("%s failed: %s", args.command, e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
