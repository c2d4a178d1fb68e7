"""
Command line front end: verification reports, formula tables and class numbers.

Exit codes: 0 when every non-skipped check passes, 1 when a check fails and 2 on
invalid input.
"""
import argparse
import csv
import io
import json
import logging
import sys
from datetime import datetime, timezone

from heckelie.cuspspace import mult_sum_closed_form
from heckelie.heckeverify import (
    class_number_dirichlet,
    class_number_forms,
    gross_identity_check,
    n_diff_formula,
    odd_primes,
    solve_multiplicities,
    sweep,
)
from heckelie.modmat import resolve_nonresidue
from heckelie.utils import ConsistencyError, InvalidInputError, verify_level, verify_odd_prime

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"

FORMATS = ["json", "csv", "text"]

TABLE_COLUMNS = ["p", "r", "h", "n_diff", "n_sum", "n_plus", "n_minus", "parity_ok"]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2


def _json_text(document):
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _stamp(document, timestamp):
    if timestamp:
        document["generated_at"] = datetime.now(timezone.utc).isoformat()
    return document


def report_document(reports, timestamp=False):
    """Assemble the JSON document for a list of VerificationReports."""
    checks = [c for report in reports for c in report.checks]
    document = {
        "schema_version": SCHEMA_VERSION,
        "generated_for": [[str(r.p), str(r.r)] for r in reports],
        "entries": [r.as_dict() for r in reports],
        "summary": {
            "total": str(len(checks)),
            "passed": str(sum(1 for c in checks if c.status == "pass")),
            "failed": str(sum(1 for c in checks if c.status == "fail")),
            "skipped": str(sum(1 for c in checks if c.status == "skipped")),
        },
    }
    return _stamp(document, timestamp)


def _reports_as_text(reports):
    lines = []
    for report in reports:
        lines.append(
            f"p={report.p} r={report.r} h={report.h if report.h is not None else '-'} "
            f"n_diff={report.n_diff} n_sum={report.n_sum} "
            f"n_plus={report.n_plus} n_minus={report.n_minus}"
        )
        for check in report.checks:
            lines.append(f"  [{check.status:7}] {check.name}: {check.lhs} | {check.rhs}")
    return "\n".join(lines) + "\n"


def _rows_as_csv(rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TABLE_COLUMNS)
    for row in rows:
        writer.writerow([row[column] for column in TABLE_COLUMNS])
    return buffer.getvalue()


def _rows_as_text(rows):
    table = [TABLE_COLUMNS] + [[row[column] for column in TABLE_COLUMNS] for row in rows]
    widths = [max(len(line[k]) for line in table) for k in range(len(TABLE_COLUMNS))]
    return "\n".join(
        "  ".join(value.rjust(width) for value, width in zip(line, widths)) for line in table
    ) + "\n"


def table_row(p, r, nonresidue=None):
    """Formula-only row of the table command, every value as a string."""
    n_sum = mult_sum_closed_form(p, r)
    n_diff = n_diff_formula(p, r, nonresidue)
    n_plus, n_minus = solve_multiplicities(p, r, nonresidue, n_diff=n_diff)
    return {
        "p": str(p),
        "r": str(r),
        "h": str(class_number_forms(p)) if p % 4 == 3 else "-",
        "n_diff": str(n_diff),
        "n_sum": str(n_sum),
        "n_plus": str(n_plus),
        "n_minus": str(n_minus),
        "parity_ok": str((n_sum % 2 == 1) == (p % 4 == 3)).lower(),
    }


# Subcommands


def cmd_verify(args):
    for p in args.p:
        verify_odd_prime("p", p)
        if args.nonresidue is not None:
            resolve_nonresidue(p, args.nonresidue)
    for r in args.r:
        verify_level("r", r)
    reports = list(sweep(args.p, args.r, deep=args.deep, nonresidue=args.nonresidue))

    if args.format == "json":
        text = _json_text(report_document(reports, args.timestamp))
    elif args.format == "csv":
        text = _rows_as_csv(
            [
                {
                    "p": str(r.p),
                    "r": str(r.r),
                    "h": "-" if r.h is None else str(r.h),
                    "n_diff": str(r.n_diff),
                    "n_sum": str(r.n_sum),
                    "n_plus": str(r.n_plus),
                    "n_minus": str(r.n_minus),
                    "parity_ok": str((r.n_sum % 2 == 1) == (r.p % 4 == 3)).lower(),
                }
                for r in reports
            ]
        )
    else:
        text = _reports_as_text(reports)
    _emit(text, args.out)

    failed = sum(r.count("fail") for r in reports)
    logger.info("%d reports, %d failed checks", len(reports), failed)
    return EXIT_FAILED if failed else EXIT_OK


def cmd_table(args):
    if args.pmax < 3:
        raise InvalidInputError(
            f"The value of {args.pmax} for the argument 'pmax' is below 3."
        )
    verify_level("r", args.r)
    rows = []
    for p in odd_primes(args.pmax):
        try:
            rows.append(table_row(p, args.r, _usable_nonresidue(p, args.nonresidue)))
        except ConsistencyError as error:
            logger.error("p=%d r=%d: %s", p, args.r, error)
            return EXIT_FAILED

    if args.format == "json":
        document = {"schema_version": SCHEMA_VERSION, "rows": rows}
        text = _json_text(_stamp(document, args.timestamp))
    elif args.format == "csv":
        text = _rows_as_csv(rows)
    else:
        text = _rows_as_text(rows)
    _emit(text, args.out)
    return EXIT_OK if all(row["parity_ok"] == "true" for row in rows) else EXIT_FAILED


def _usable_nonresidue(p, nonresidue):
    """A global --nonresidue override only applies to the primes it is a nonresidue for."""
    if nonresidue is None:
        return None
    try:
        return resolve_nonresidue(p, nonresidue)
    except InvalidInputError:
        return None


def cmd_classnum(args):
    p = args.p
    h = class_number_forms(p)
    if p == 3:
        dirichlet, gross = "skipped", "skipped"
    else:
        dirichlet = str(class_number_dirichlet(p) == h).lower()
        gross = str(gross_identity_check(p).passed).lower()
    result = {"p": str(p), "h": str(h), "dirichlet_agrees": dirichlet, "gross_agrees": gross}

    if args.format == "json":
        document = {"schema_version": SCHEMA_VERSION, **result}
        text = _json_text(_stamp(document, args.timestamp))
    elif args.format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(list(result))
        writer.writerow(list(result.values()))
        text = buffer.getvalue()
    else:
        text = f"{h}\ndirichlet: {dirichlet}\ngross: {gross}\n"
    _emit(text, args.out)
    return EXIT_FAILED if "false" in (dirichlet, gross) else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="heckelie",
        description="Exact checks of the multiplicities of the two regular nilpotent "
        "invariant characters in weight 2 cusp forms of level p^r.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_output_flags(sub, default_format):
        sub.add_argument("--format", choices=FORMATS, default=default_format)
        sub.add_argument("--out", metavar="FILE", default=None, help="Write to FILE")
        sub.add_argument(
            "--timestamp", action="store_true", help="Add a generation timestamp"
        )

    verify = subparsers.add_parser("verify", help="Run every check for (p, r)")
    verify.add_argument("--p", type=int, nargs="+", required=True)
    verify.add_argument("--r", type=int, nargs="+", default=[2])
    verify.add_argument(
        "--deep",
        action="store_true",
        help="Build character tables and enumerate groups up to the hard size guard",
    )
    verify.add_argument("--nonresidue", type=int, default=None, metavar="N")
    add_output_flags(verify, "json")
    verify.set_defaults(handler=cmd_verify)

    table = subparsers.add_parser("table", help="Formula-only table for odd primes p <= pmax")
    table.add_argument("--pmax", type=int, required=True)
    table.add_argument("--r", type=int, default=2)
    table.add_argument("--nonresidue", type=int, default=None, metavar="N")
    add_output_flags(table, "csv")
    table.set_defaults(handler=cmd_table)

    classnum = subparsers.add_parser("classnum", help="h(-p) by three methods")
    classnum.add_argument("--p", type=int, required=True)
    add_output_flags(classnum, "text")
    classnum.set_defaults(handler=cmd_classnum)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(logging.DEBUG if args.verbose else logging.INFO)
    try:
        return args.handler(args)
    except InvalidInputError as error:
        logger.error("%s", error)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
