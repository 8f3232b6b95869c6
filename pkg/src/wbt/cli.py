"""Command-line front end: ``wbt <subcommand> [options]``.

JSON goes to stdout (or ``--out``), a short human summary to stderr.
Exit codes: 0 all verdicts true, 1 some verdict false or inconclusive,
2 usage error, 3 resource or I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from . import constants, prime_sums, sieve_core, sweep
from .arith_tab import DEFAULT_SEGMENT_LENGTH, dump_table, q_error_sweep, tabulate
from .errors import PreconditionError, ResourceError
from .reports import SCHEMA_VERSION, BoundReport, ConstantsReport, dumps
from .weights import SHAPES, Interval, WeightFunction, builtin, parse_weight_text

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
TABLE_ROWS_LIMIT = 10_000

log = logging.getLogger("wbt")


def _int(text: str) -> int:
    """Integers, also written as 2e6 or 2_000_000."""
    try:
        return int(text.replace("_", ""))
    except ValueError:
        value = float(text)
        if not value.is_integer():
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        return int(value)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--out", metavar="PATH", help="write the JSON report here instead of stdout")
    mode = g.add_mutually_exclusive_group()
    mode.add_argument("--quick", dest="mode", action="store_const", const="quick")
    mode.add_argument("--full", dest="mode", action="store_const", const="full")
    g.add_argument("--threads", type=int, default=1, metavar="N")
    g.add_argument("--seed", type=int, default=0, metavar="N", help="corpus randomization seed")
    g.add_argument("--resume", metavar="PATH", help="checkpoint file to resume a sweep from")
    g.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(mode="quick")
    return p


def _weight_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shape", choices=SHAPES, default="constant")
    p.add_argument("--weights", metavar="FILE", help="custom weight: one 't value' pair per line")
    p.add_argument("--x", default="0", help="left endpoint (exact decimal)")
    p.add_argument("--y", default="1000", help="interval length (exact decimal)")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--resolution", type=_int, default=64)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="wbt", description="Weighted Brun-Titchmarsh bounds and their numerical verification."
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("tabulate", parents=[common], help="tabulate mu, phi, sigma, omega")
    p.add_argument("--lo", type=_int, default=1)
    p.add_argument("--hi", type=_int, required=True)
    p.add_argument("--segment-length", type=_int, default=DEFAULT_SEGMENT_LENGTH)
    p.add_argument("--dump", metavar="PATH", help="also write the binary WBT1 table")

    p = sub.add_parser("sieve-sums", parents=[common], help="S_k(z) and H_k(z)")
    p.add_argument("--k", type=_int, default=1)
    p.add_argument("--z", type=_int, required=True)

    p = sub.add_parser("constants", parents=[common], help="explicit constants behind the H_1 and S_1 estimates")
    p.add_argument("--all", action="store_true", help="run every constants check (default)")

    p = sub.add_parser("verify-q", parents=[common], help="squarefree-count error bound")
    p.add_argument("--z-max", type=_int, default=10**6)

    p = sub.add_parser("verify-h", parents=[common], help="H_1(z) error bound, every z")
    p.add_argument("--z-max", type=_int, default=10**6)

    p = sub.add_parser("verify-s", parents=[common], help="S_1(z) asymptotic")
    p.add_argument("--samples", type=_int, nargs="+", help="z values (default depends on mode)")

    p = sub.add_parser("verify-test", parents=[common], help="sweep of the large-range inequality")
    p.add_argument("--z-min", type=_int, default=sweep.SWEEP_Z_MIN)
    p.add_argument("--z-max", type=_int, help="exclusive; default 2e6 (quick) or 2e9 (full)")
    p.add_argument("--checkpoint-stride", type=_int, default=sweep.DEFAULT_CHECKPOINT_STRIDE)
    p.add_argument("--checkpoint-file", metavar="PATH")
    p.add_argument("--segment-length", type=_int, default=DEFAULT_SEGMENT_LENGTH)

    for name, text in (("theorem4", "bounds for primes in a progression"), ("theorem5", "bound for k = 1")):
        p = sub.add_parser(name, parents=[common], help=text)
        _weight_args(p)
        if name == "theorem4":
            p.add_argument("--k", type=_int, default=1)
            p.add_argument("--l", type=_int, default=1)

    p = sub.add_parser("corpus", parents=[common], help="theorem4/theorem5 bounds over a corpus of weights")
    p.add_argument("--file", metavar="PATH", help="corpus file: 'shape k l x y scale resolution'")
    p.add_argument("--random", type=_int, default=0, metavar="N", help="add N random cases")
    return parser


# -- subcommands -------------------------------------------------------------


def _envelope(command: str, reports: list[Any], **extra: Any) -> dict[str, Any]:
    verdicts = [_verdict_of(r) for r in reports]
    verdicts = [v for v in verdicts if v is not None]
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "verdict": all(verdicts),
        "reports": [r.to_dict() for r in reports],
        **extra,
    }


def _verdict_of(r: Any) -> bool | None:
    if isinstance(r, BoundReport):
        return r.holds
    if isinstance(r, ConstantsReport):
        return r.verdict
    return None


def cmd_tabulate(args) -> dict[str, Any]:
    tab = tabulate(args.lo, args.hi, args.segment_length)
    if args.dump:
        dump_table(tab, args.dump)
    out: dict[str, Any] = {
        "schema": SCHEMA_VERSION,
        "command": "tabulate",
        "lo": tab.lo,
        "hi": tab.hi,
        "squarefree": int((tab.mu != 0).sum()),
        "primes": int(tab.is_prime.sum()),
    }
    if len(tab) <= TABLE_ROWS_LIMIT:
        out["rows"] = {
            "n": tab.numbers.tolist(),
            "mu": tab.mu.tolist(),
            "phi": tab.phi.tolist(),
            "sigma": tab.sigma.tolist(),
            "omega": tab.omega.tolist(),
        }
    return out


def cmd_sieve_sums(args) -> dict[str, Any]:
    p = sieve_core.SieveParams(args.k, 1, args.z)
    tab = tabulate(1, args.z)
    return {
        "schema": SCHEMA_VERSION,
        "command": "sieve-sums",
        "k": args.k,
        "z": args.z,
        "S": sieve_core.sieve_sum_S(p, tab),
        "H": sieve_core.sieve_sum_H(p, tab),
    }


def cmd_constants(args) -> dict[str, Any]:
    return _envelope("constants", constants.all_constants(quick=args.mode != "full"))


def cmd_verify_q(args) -> dict[str, Any]:
    return _envelope("verify-q", [q_error_sweep(args.z_max)])


def cmd_verify_h(args) -> dict[str, Any]:
    return _envelope("verify-h", [constants.verify_H_dense(args.z_max)])


def cmd_verify_s(args) -> dict[str, Any]:
    full = args.mode == "full"
    samples = args.samples or (
        [10**e for e in range(3, 10)] if full else [10**e for e in range(3, 7)]
    )
    B = constants.constant_B(10**8 if full else 10**6)
    reports, residuals = constants.verify_S_asymptotic(samples, B=B)
    return _envelope(
        "verify-s",
        reports,
        B={"value": B.value, "tail_bound": B.tail_bound, "prime_cutoff": B.prime_cutoff},
        residuals=residuals,
    )


def cmd_verify_test(args) -> dict[str, Any]:
    overrides = {
        "z_min": args.z_min,
        "checkpoint_stride": args.checkpoint_stride,
        "segment_length": args.segment_length,
        "threads": args.threads,
        "checkpoint_path": args.checkpoint_file,
        "resume_path": args.resume,
        "output_path": args.out,
    }
    if args.z_max is not None:
        overrides["z_max"] = args.z_max
    cfg = sweep.CampaignConfig.for_mode(args.mode, **overrides)
    report = sweep.run_campaign(cfg)
    return {"command": "verify-test", **report.to_dict()}


def _weight(args) -> WeightFunction:
    if args.weights:
        f = parse_weight_text(Path(args.weights).read_text())
    else:
        f = builtin(args.shape, Interval(args.x, args.y), args.resolution)
    return f.scaled(args.scale) if args.scale != 1.0 else f


def cmd_theorem4(args) -> dict[str, Any]:
    f = _weight(args)
    reports = prime_sums.theorem_reports(f, args.k, args.l, with_t5=False, params={"interval": str(f.domain)})
    return _envelope("theorem4", reports)


def cmd_theorem5(args) -> dict[str, Any]:
    f = _weight(args)
    reports = prime_sums.theorem_reports(f, 1, 1, params={"interval": str(f.domain)})
    return _envelope("theorem5", [r for r in reports if r.label == "T5"])


def cmd_corpus(args) -> dict[str, Any]:
    if args.file:
        cases = prime_sums.parse_corpus(Path(args.file).read_text())
    else:
        cases = prime_sums.default_corpus()
    cases += prime_sums.random_corpus(args.random, args.seed)
    reports = prime_sums.theorem_corpus_check(cases)
    summary = prime_sums.CorpusSummary.of(reports)
    return _envelope(
        "corpus",
        reports,
        summary={
            "cases": len(cases),
            "checked": summary.checked,
            "passed": summary.passed,
            "inapplicable": summary.inapplicable,
            "min_rel_margin": summary.min_rel_margin if summary.checked else None,
        },
    )


COMMANDS = {
    "tabulate": cmd_tabulate,
    "sieve-sums": cmd_sieve_sums,
    "constants": cmd_constants,
    "verify-q": cmd_verify_q,
    "verify-h": cmd_verify_h,
    "verify-s": cmd_verify_s,
    "verify-test": cmd_verify_test,
    "theorem4": cmd_theorem4,
    "theorem5": cmd_theorem5,
    "corpus": cmd_corpus,
}


def _summary(payload: dict[str, Any]) -> str:
    verdict = payload.get("verdict")
    parts = [f"{payload.get('command')}:"]
    parts.append({True: "PASS", False: "FAIL", None: "done"}[verdict if isinstance(verdict, bool) else None])
    if "n_checks" in payload:
        parts.append(
            f"checks={payload['n_checks']} min_margin={payload['min_margin']:.6g} "
            f"min_rel_margin={payload['min_rel_margin']:.3e} inconclusive={payload['n_inconclusive']}"
        )
    elif "reports" in payload:
        fails = [r for r in payload["reports"] if r.get("holds") is False or r.get("verdict") is False]
        parts.append(f"reports={len(payload['reports'])} failing={len(fails)}")
    return " ".join(parts)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    started = time.perf_counter()
    try:
        payload = COMMANDS[args.command](args)
    except ResourceError as exc:
        print(f"wbt: resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except PreconditionError as exc:
        print(f"wbt: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"wbt: I/O error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    text = dumps(payload)
    try:
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"wbt: cannot write report: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    print(f"{_summary(payload)} ({time.perf_counter() - started:.1f}s)", file=sys.stderr)
    verdict = payload.get("verdict")
    return EXIT_FAIL if verdict is False else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
