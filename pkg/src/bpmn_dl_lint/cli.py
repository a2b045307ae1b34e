"""Command-line front end: bpmn-dl-lint validate DIAGRAM [options]."""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from typing import Optional

from . import __version__, bundled_tbox
from .checker import ValidationReport, check_all
from .errors import LintError
from .graph import load_diagram
from .ontology import parse_tbox, well_formed
from .ontology.tbox import TBox

ENV_TBOX = "BPMN_LINT_TBOX"


@dataclass
class RunConfig:
    diagram: Optional[str]
    tbox: Optional[str] = None
    format: str = "text"
    severity_floor: str = "error"
    max_violations: Optional[int] = None
    list_axioms: bool = False
    jobs: int = 1


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.prog}: error: {message}")


def _positive(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tbox", metavar="PATH",
                        help=f"TBox document to validate against (default: ${ENV_TBOX} or the bundled BPMN 1.1 TBox)")
    common.add_argument("--list-axioms", action="store_true",
                        help="print the axiom census (id, kind, severity, trace) and exit")
    parser = _Parser(prog="bpmn-dl-lint", parents=[common],
                     description="Check BPMN 1.1 diagrams against a description-logic TBox.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    v = sub.add_parser("validate", parents=[common], help="validate a diagram document")
    v.add_argument("diagram", nargs="?", help="diagram JSON document")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--severity-floor", choices=("warning", "error"), default="error",
                   help="lowest severity that makes the run fail (default: error)")
    v.add_argument("--max-violations", type=_positive, metavar="N",
                   help="list at most N violations in the text report")
    v.add_argument("--jobs", type=_positive, default=1, metavar="N", help="worker threads for checking")
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        diagram=getattr(args, "diagram", None),
        tbox=args.tbox or os.environ.get(ENV_TBOX) or None,
        format=getattr(args, "format", "text"),
        severity_floor=getattr(args, "severity_floor", "error"),
        max_violations=getattr(args, "max_violations", None),
        list_axioms=args.list_axioms,
        jobs=getattr(args, "jobs", 1),
    )


def load_tbox(path: Optional[str]) -> TBox:
    if path is None:
        return bundled_tbox()
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        raise LintError(f"cannot read TBox {path!r}: {e.strerror}") from None
    try:
        tbox = parse_tbox(raw)
    except LintError as e:
        raise LintError(f"{path}: {e}") from None
    findings = well_formed(tbox)
    if findings:
        shown = "\n  ".join(str(f) for f in findings[:20])
        more = f"\n  …and {len(findings) - 20} more" if len(findings) > 20 else ""
        raise LintError(f"{path}: TBox is not well formed:\n  {shown}{more}")
    return tbox


def list_axioms(tbox: TBox, out) -> None:
    for a in tbox.axioms:
        out.write(f"{a.id}\t{a.kind}\t{tbox.severity_of(a.id)}\t{a.trace}\n")
    for n in tbox.natives:
        out.write(f"{n.id}\tnative\t{tbox.severity_of(n.id)}\t{n.trace}\n")


def _plural(n, word):
    return f"{n} {word}" if n == 1 else f"{n} {word}s"


def render_text(report: ValidationReport, limit: Optional[int] = None) -> str:
    lines = []
    shown = report.violations if limit is None else report.violations[:limit]
    current = None
    for v in shown:
        if v.axiom_id != current:
            current = v.axiom_id
            lines.append(f"{v.axiom_id} [{v.severity}] {v.axiom_text}")
        lines.append(f"  {v.subject}: {v.message}")
    hidden = len(report.violations) - len(shown)
    if hidden:
        lines.append(f"…and {hidden} more")
    c = report.counts
    lines.append(f"{_plural(c['error'], 'error')}, {_plural(c['warning'], 'warning')}")
    return "\n".join(lines) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    """Run the CLI; returns 0 (clean), 1 (violations at/above the floor) or 2 (usage/input error)."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _Usage as e:
        stderr.write(parser.format_usage() + str(e) + "\n")
        return 2
    except SystemExit as e:  # --help / --version
        return 0 if not e.code else 2
    cfg = _config(args)
    try:
        tbox = load_tbox(cfg.tbox)
        if cfg.list_axioms:
            list_axioms(tbox, stdout)
            return 0
        if args.command != "validate" or not cfg.diagram:
            stderr.write(parser.format_usage() + "bpmn-dl-lint: error: expected 'validate DIAGRAM' or --list-axioms\n")
            return 2
        try:
            with open(cfg.diagram, "rb") as fh:
                raw = fh.read()
        except OSError as e:
            raise LintError(f"cannot read diagram {cfg.diagram!r}: {e.strerror}") from None
        try:
            graph = load_diagram(raw, tbox)
        except LintError as e:
            raise LintError(f"{cfg.diagram}: {e}") from None
        report = check_all(tbox, graph, workers=cfg.jobs)
    except LintError as e:
        stderr.write(f"bpmn-dl-lint: {e}\n")
        return 2
    except BrokenPipeError:
        raise
    except Exception as e:  # keep the exit-code contract even on internal faults
        stderr.write(f"bpmn-dl-lint: internal error: {type(e).__name__}: {e}\n")
        return 2
    if cfg.format == "json":
        stdout.write(report.to_json())
    else:
        stdout.write(render_text(report, cfg.max_violations))
    return 1 if report.at_or_above(cfg.severity_floor) else 0


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the final flush
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = 0
    sys.exit(code)


if __name__ == "__main__":
    main()
