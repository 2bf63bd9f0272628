"""
Command-line front end.

    tetra-verify strata   [--emit text|json|csv]
    tetra-verify counts   [--table FILE] [--emit text|json|csv]
    tetra-verify oracle   [--primes 2,3,5,7] [--types X0,A,Astar,B] [--workers N]
    tetra-verify ring     [--field f2|q] [--check hilbert,pairing,witness,s4]
                          [--truncation-degree N] [--max-seconds N] [--max-pairs N]
    tetra-verify report   [--timings] [--output report.json]
    tetra-verify validate [--divisors F] [--strata-types F] [--table F]

Exit codes: 0 all checks passed, 1 a check failed, 2 usage or data error.
"""

from datetime import datetime
from typing import List, Optional, Sequence
import argparse
import asyncio
import logging
import os
import sys

from sympy import isprime

from .cohomology import RING_CHECKS
from .counting import counts_to_csv, load_count_table
from .projgeom import DEFAULT_PRIMES, MAX_PRIME, ORACLE_TYPES
from .strata import enumerate_strata, strata_to_csv
from .tetra_common import (
    COUNT_TABLE_FILE,
    DEFAULT_GROEBNER_MAX_PAIRS,
    DEFAULT_GROEBNER_MAX_SECONDS,
    DEFAULT_TRUNCATION_DEGREE,
    DIVISORS_FILE,
    SECTION_NAMES,
    STRATA_TYPES_FILE,
    BudgetExceededError,
    SectionReport,
    TetraError,
    VerificationError,
    VerificationReport,
    ensure_reports_dir,
    get_default_engine_config,
    report_to_json,
    save_report,
)
from .verification_service import build_report, run_section, validate_data

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

FIELD_NAMES = {"f2": "GF2", "gf2": "GF2", "q": "QQ", "qq": "QQ"}
BUDGET_FLAGS = {
    "truncation_degree": "truncation_degree",
    "groebner_max_seconds": "max_seconds",
    "groebner_max_pairs": "max_pairs",
}


def _csv_list(text: str) -> List[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def primes_arg(text: str) -> List[int]:
    try:
        primes = [int(t) for t in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"primes must be integers: {text!r}")
    bad = [p for p in primes if not isprime(p) or p >= MAX_PRIME]
    if bad or not primes:
        raise argparse.ArgumentTypeError(f"not usable primes: {bad or text!r}")
    return primes


def types_arg(text: str) -> List[str]:
    types = _csv_list(text)
    bad = [t for t in types if t not in ORACLE_TYPES]
    if bad or not types:
        raise argparse.ArgumentTypeError(
            f"unknown oracle types {bad}, expected some of {','.join(ORACLE_TYPES)}"
        )
    return types


def field_arg(text: str) -> str:
    try:
        return FIELD_NAMES[text.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(f"field must be f2 or q, got {text!r}")


def positive_int_arg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def checks_arg(text: str) -> List[str]:
    checks = _csv_list(text)
    bad = [c for c in checks if c not in RING_CHECKS]
    if bad or not checks:
        raise argparse.ArgumentTypeError(
            f"unknown ring checks {bad}, expected some of {','.join(RING_CHECKS)}"
        )
    return checks


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tetra-verify",
        description="Verify the stratification, point counts and cohomology ring "
        "of the space of complete tetrahedra.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def output(p):
        p.add_argument("--output", help="write the JSON (or CSV) result to this path")

    def emit(p, choices=("text", "json", "csv")):
        p.add_argument("--emit", choices=choices, default="text")

    def table(p):
        p.add_argument("--table", help="count table to use instead of the embedded one")

    def oracle_options(p):
        p.add_argument("--primes", type=primes_arg, default=list(DEFAULT_PRIMES))
        p.add_argument("--types", type=types_arg, default=list(ORACLE_TYPES))
        p.add_argument("--workers", type=int, default=None, help="oracle process pool size")

    def ring_options(p):
        p.add_argument("--field", type=field_arg, default="GF2", help="f2 (default) or q")
        p.add_argument("--check", type=checks_arg, default=list(RING_CHECKS))
        p.add_argument(
            "--rationals", action="store_true", help="also compare the Hilbert function over Q"
        )
        p.add_argument(
            "--truncation-degree",
            type=positive_int_arg,
            default=None,
            help=f"Gröbner truncation degree (default {DEFAULT_TRUNCATION_DEGREE})",
        )
        p.add_argument(
            "--max-seconds",
            type=positive_int_arg,
            default=None,
            help=f"wall-clock budget per basis (default {DEFAULT_GROEBNER_MAX_SECONDS})",
        )
        p.add_argument(
            "--max-pairs",
            type=positive_int_arg,
            default=None,
            help=f"S-pair budget per basis (default {DEFAULT_GROEBNER_MAX_PAIRS})",
        )

    p = sub.add_parser("strata", help="enumerate and verify the strata")
    emit(p)
    output(p)

    p = sub.add_parser("counts", help="verify the point-count table, Betti numbers and zeta")
    table(p)
    emit(p)
    output(p)

    p = sub.add_parser("oracle", help="brute-force counts over small prime fields")
    table(p)
    oracle_options(p)
    emit(p, ("text", "json"))
    output(p)

    p = sub.add_parser("ring", help="Gröbner basis, Hilbert function and duality checks")
    ring_options(p)
    emit(p, ("text", "json"))
    output(p)

    p = sub.add_parser("report", help="full pipeline")
    table(p)
    oracle_options(p)
    ring_options(p)
    p.add_argument(
        "--sections", type=_csv_list, default=list(SECTION_NAMES),
        help=f"subset of {','.join(SECTION_NAMES)}",
    )
    p.add_argument("--timings", action="store_true", help="add a timings block")
    emit(p, ("text", "json"))
    output(p)

    p = sub.add_parser("validate", help="check the data files")
    p.add_argument("--divisors", default=DIVISORS_FILE)
    p.add_argument("--strata-types", default=STRATA_TYPES_FILE)
    p.add_argument("--table", default=COUNT_TABLE_FILE)
    return parser


# ---------------------------------------------------------------------------
# Text views


def _line(values: Sequence) -> str:
    return " ".join(str(v) for v in values)


def format_section(section: SectionReport) -> List[str]:
    data = section.data
    lines: List[str] = []
    if section.section == "strata":
        lines.append(
            f"{data['strata']} strata, {data['divisors']} divisors, max codim {data['max_codim']}"
        )
    elif section.section == "counts":
        if "even_betti" in data:
            betti = [0] * (2 * len(data["even_betti"]) - 1)
            betti[::2] = data["even_betti"]
            lines.append("b: " + _line(betti))
            lines.append(f"euler characteristic: {data['euler_characteristic']}")
            lines.append("zeta exponents: " + _line(a for _, a in data["zeta_exponents"]))
    elif section.section == "oracle":
        for r in data.get("results", []):
            status = "ok" if r["match"] else "MISMATCH"
            lines.append(
                f"{r['type']} q={r['q']}: oracle={r['oracle_count']} table={r['table_count']} {status}"
            )
        if data.get("small_prime_failures"):
            lines.append("small-prime exceptions: " + ", ".join(data["small_prime_failures"]))
    elif section.section == "ring":
        if "hilbert" in data:
            lines.append("hilbert: " + _line(data["hilbert"]))
        if "pairing_ranks" in data:
            lines.append("pairing ranks: " + _line(data["pairing_ranks"]))
        if "witness" in data:
            lines.append(f"socle witness: {data['witness']['normal_form']}")
    passed = sum(1 for c in section.checks if c.passed)
    lines.append(
        f"[{section.section}] {passed}/{len(section.checks)} checks passed"
        + ("" if section.passed else f"; failed: {', '.join(section.failures)}")
    )
    return lines


def _emit(result, emit: str, output_path: Optional[str], csv_text: Optional[str] = None) -> None:
    if emit == "csv":
        if output_path:
            with open(output_path, "w", encoding="utf-8") as f:
                f.write(csv_text)
            logger.info(f"[REPORT] CSV saved as: {output_path}")
        else:
            sys.stdout.write(csv_text)
        return
    if output_path:
        save_report(result, output_path)
    if emit == "json":
        print(report_to_json(result))
        return
    sections = result.sections if isinstance(result, VerificationReport) else [result]
    for section in sections:
        for line in format_section(section):
            print(line)


# ---------------------------------------------------------------------------
# Commands


def _run(args: argparse.Namespace) -> int:
    config = get_default_engine_config()
    for key, flag in BUDGET_FLAGS.items():
        if getattr(args, flag, None) is not None:
            config[key] = getattr(args, flag)
    workers = getattr(args, "workers", None)
    if getattr(args, "output", None) and not os.path.dirname(args.output):
        # bare file names go to the reports directory
        args.output = os.path.join(ensure_reports_dir(config["reports_dir"]), args.output)

    if args.command == "validate":
        problems = validate_data(args.divisors, args.strata_types, args.table)
        for problem in problems:
            print(problem, file=sys.stderr)
        if not problems:
            print("data files valid")
        return EXIT_USAGE if problems else EXIT_OK

    if args.command == "report":
        unknown = [s for s in args.sections if s not in SECTION_NAMES]
        if unknown:
            print(f"error: unknown sections {unknown}", file=sys.stderr)
            return EXIT_USAGE
        report = asyncio.run(
            build_report(
                sections=args.sections,
                primes=args.primes,
                types=args.types,
                table_path=args.table,
                field=args.field,
                include_rationals=args.rationals,
                ring_checks=args.check,
                workers=workers,
                timings=args.timings,
                config=config,
            )
        )
        _emit(report, args.emit, args.output)
        for failure in report.failures():
            print(f"FAILED {failure}", file=sys.stderr)
        return EXIT_OK if report.passed else EXIT_FAILED

    section = asyncio.run(
        run_section(
            args.command,
            primes=getattr(args, "primes", DEFAULT_PRIMES),
            types=getattr(args, "types", ORACLE_TYPES),
            table_path=getattr(args, "table", None),
            field=getattr(args, "field", "GF2"),
            include_rationals=getattr(args, "rationals", False),
            ring_checks=getattr(args, "check", RING_CHECKS),
            workers=workers or config["workers"],
            config=config,
        )
    )
    csv_text = None
    if args.emit == "csv":
        if args.command == "strata":
            csv_text = strata_to_csv(enumerate_strata())
        else:
            table = load_count_table(args.table) if args.table else None
            csv_text = counts_to_csv(table, enumerate_strata())
    _emit(section, args.emit, args.output, csv_text)
    for name in section.failures:
        print(f"FAILED {section.section}:{name}", file=sys.stderr)
    return EXIT_OK if section.passed else EXIT_FAILED


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    start_time = datetime.now()
    try:
        code = _run(args)
    except (BudgetExceededError, VerificationError) as e:
        logger.error(f"[ERROR] {e}")
        print(f"FAILED {e}", file=sys.stderr)
        return EXIT_FAILED
    except (TetraError, ValueError, OSError) as e:
        elapsed = (datetime.now() - start_time).total_seconds()
        logger.error(f"[ERROR] {args.command} failed after {elapsed:.2f}s: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    elapsed = (datetime.now() - start_time).total_seconds()
    logger.info(f"[SUCCESS] {args.command} finished in {elapsed:.2f}s with exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
