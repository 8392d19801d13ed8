"""Command-line interface: ``catk validate | scan | reproduce | sample``.

Exit codes: 0 ok/holds, 1 malformed input or usage, 2 not a metric,
3 condition fails, 4 vacuous.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import spaces
from .conditions import (
    ConditionReport,
    SemimetricSpace,
    Verdict,
    check_gromov_class,
    check_k_euler,
    check_lower,
    check_metric,
    check_one_sided,
    check_upper,
)
from .errors import MalformedSpaceError
from .trials import CHECKS, run_trials

EXIT_OK, EXIT_USAGE, EXIT_NOT_METRIC, EXIT_FAILS, EXIT_VACUOUS = 0, 1, 2, 3, 4
CONDITIONS = ("upper", "lower", "one-sided", "euler", "gromov-plus", "gromov-minus")
TABLE_TOL = 1e-3


class UsageError(Exception):
    """Bad flags or unreadable input; maps to exit status 1."""


@dataclass(frozen=True)
class InputDocument:
    labels: tuple[str, ...]
    matrix: np.ndarray
    curvature: float | None
    digest: str

    def space(self) -> SemimetricSpace:
        return SemimetricSpace(self.labels, self.matrix)


# -- input --------------------------------------------------------------------------

def _fill_matrix(rows: list[list[float | None]], n: int, where: str) -> np.ndarray:
    """Square up full or lower-triangular rows; missing cells mirror their transpose."""
    if len(rows) != n:
        raise UsageError(f"{where}: expected {n} matrix rows, found {len(rows)}")
    M = np.full((n, n), np.nan)
    for i, row in enumerate(rows):
        if len(row) > n:
            raise UsageError(f"{where}: row {i + 1} has {len(row)} entries, expected at most {n}")
        for j, v in enumerate(row):
            if v is not None:
                M[i, j] = v
    M = np.where(np.isnan(M), M.T, M)
    np.fill_diagonal(M, np.where(np.isnan(np.diag(M)), 0.0, np.diag(M)))
    if np.isnan(M).any():
        i, j = np.argwhere(np.isnan(M))[0]
        raise UsageError(f"{where}: missing distance between rows {i + 1} and {j + 1}")
    return M


def _parse_csv(text: str) -> tuple[tuple[str, ...], np.ndarray]:
    reader = csv.reader(io.StringIO(text))
    lines = [(k + 1, row) for k, row in enumerate(reader) if any(cell.strip() for cell in row)]
    if not lines:
        raise UsageError("input: empty CSV")
    _, header = lines[0]
    labels = [h.strip() for h in header]
    if labels and labels[0] == "":
        labels = labels[1:]
    n = len(labels)
    rows = []
    for lineno, row in lines[1:]:
        cells = [c.strip() for c in row]
        offset = 0
        if cells and cells[0] in labels and len(rows) < n and cells[0] == labels[len(rows)]:
            cells, offset = cells[1:], 1
        parsed: list[float | None] = []
        for col, cell in enumerate(cells):
            if cell == "":
                parsed.append(None)
                continue
            try:
                parsed.append(float(cell))
            except ValueError:
                raise UsageError(
                    f"input: line {lineno}, column {col + 1 + offset}: not a number: {cell!r}"
                ) from None
        rows.append(parsed)
    return tuple(labels), _fill_matrix(rows, n, "input")


def _parse_json(text: str) -> tuple[tuple[str, ...], np.ndarray, float | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"input: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict) or "labels" not in doc or "matrix" not in doc:
        raise UsageError("input: JSON document needs 'labels' and 'matrix'")
    labels = tuple(str(x) for x in doc["labels"])
    rows = []
    for i, row in enumerate(doc["matrix"]):
        if not isinstance(row, list):
            raise UsageError(f"input: matrix row {i + 1} is not a list")
        try:
            rows.append([None if v is None else float(v) for v in row])
        except (TypeError, ValueError):
            raise UsageError(f"input: matrix row {i + 1} has a non-numeric entry") from None
    K = doc.get("curvature")
    if K is not None and not isinstance(K, (int, float)):
        raise UsageError("input: 'curvature' must be a number")
    return labels, _fill_matrix(rows, len(labels), "input"), K


def load_input(path: str) -> InputDocument:
    try:
        raw = sys.stdin.buffer.read() if path == "-" else open(path, "rb").read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    digest = hashlib.sha256(raw).hexdigest()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise UsageError("input: not UTF-8 text") from None
    if text.lstrip().startswith("{"):
        labels, M, K = _parse_json(text)
    else:
        (labels, M), K = _parse_csv(text), None
    return InputDocument(labels, M, K, digest)


# -- output -------------------------------------------------------------------------

def _num(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def _witnesses(report: ConditionReport) -> list[dict]:
    return [{"points": list(w.points), "case": w.case, "value": _num(w.value)}
            for w in report.witnesses]


def _report_body(report: ConditionReport) -> dict:
    return {
        "verdict": report.verdict.value,
        "worst_margin": _num(report.worst_margin),
        "admissible": report.admissible_count,
        "skipped": report.skipped_count,
        "witnesses": _witnesses(report),
    }


def _emit(args, payload: dict, text: str) -> None:
    out = json.dumps(payload, sort_keys=True, indent=2) + "\n" if args.format == "json" else text
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _text_report(title: str, report: ConditionReport) -> str:
    lines = [f"{title}: {report.verdict.value}",
             f"  worst margin: {report.worst_margin:.6g}",
             f"  admissible: {report.admissible_count}  skipped: {report.skipped_count}"
             f"  violations: {report.violation_count}"]
    for w in report.witnesses:
        lines.append(f"  witness {','.join(w.points)} case {w.case} value {w.value:.6g}")
    return "\n".join(lines) + "\n"


def _verdict_exit(v: Verdict) -> int:
    return {Verdict.HOLDS: EXIT_OK, Verdict.FAILS: EXIT_FAILS, Verdict.VACUOUS: EXIT_VACUOUS}[v]


# -- commands -----------------------------------------------------------------------

def cmd_validate(args) -> int:
    doc = load_input(args.input)
    s = doc.space()
    rep = check_metric(s, args.tolerance, None if args.all_witnesses else args.max_witnesses)
    payload = {"command": "validate", "input_digest": doc.digest, "curvature": doc.curvature,
               "condition": "metric", **_report_body(rep)}
    payload["verdict"] = "metric" if rep.holds else "not-metric"
    text = (f"metric: {'yes' if rep.holds else 'no'} ({s.n} points)\n"
            + "".join(f"  d({w.points[0]},{w.points[2]}) exceeds "
                      f"d({w.points[0]},{w.points[1]}) + d({w.points[1]},{w.points[2]}) "
                      f"by {w.value:.6g}\n" for w in rep.witnesses))
    _emit(args, payload, text)
    return EXIT_OK if rep.holds else EXIT_NOT_METRIC


def cmd_scan(args) -> int:
    doc = load_input(args.input)
    K = args.curvature if args.curvature is not None else doc.curvature
    if K is None:
        raise UsageError("scan needs a curvature (--curvature or a 'curvature' field)")
    if K == 0:
        raise UsageError("scan conditions are defined for K != 0")
    s = doc.space()
    cap = None if args.all_witnesses else args.max_witnesses
    tol = args.tolerance
    payload = {"command": "scan", "input_digest": doc.digest, "curvature": K,
               "condition": args.condition, "tolerance": tol}
    if args.condition == "one-sided":
        up, low, verdict = check_one_sided(K, s, tol, cap, args.jobs)
        wits = [] if verdict is Verdict.HOLDS else sorted(
            up.witnesses + low.witnesses, key=lambda w: (-w.margin, w.points, w.case))[:cap]
        payload.update({
            "verdict": verdict.value,
            "worst_margin": _num(min(up.worst_margin, low.worst_margin)),
            "admissible": up.admissible_count,
            "skipped": up.skipped_count,
            "witnesses": [{"points": list(w.points), "case": w.case, "value": _num(w.value)}
                          for w in wits],
            "parts": {"upper": _report_body(up), "lower": _report_body(low)},
        })
        text = (f"one-sided: {verdict.value}\n" + _text_report("upper", up)
                + _text_report("lower", low))
    else:
        if args.condition == "upper":
            rep = check_upper(K, s, tol, cap, args.jobs)
        elif args.condition == "lower":
            rep = check_lower(K, s, tol, cap, args.jobs)
        elif args.condition == "euler":
            rep = check_k_euler(K, s, tol, cap, args.jobs)
        else:
            sign = "+" if args.condition == "gromov-plus" else "-"
            rep = check_gromov_class(K, sign, s, tol, cap, args.jobs)
        verdict = rep.verdict
        payload.update(_report_body(rep))
        text = _text_report(args.condition, rep)
    _emit(args, payload, text)
    return _verdict_exit(verdict)


def cmd_reproduce(args) -> int:
    if args.subdivisions < 0:
        raise UsageError("--subdivisions must be nonnegative")
    examples = spaces.registry(subdivisions=args.subdivisions)
    names = [ex.name.split("(")[0] for ex in examples]
    if not args.all:
        if args.example not in names:
            raise UsageError(f"unknown example {args.example!r}; available: {', '.join(names)}")
        examples = [examples[names.index(args.example)]]
    results, lines, ok_all = [], [], True
    for ex in examples:
        checks = []
        lines.append(f"{ex.name} [{ex.citation}] K={ex.curvature.K:g}")
        for e in ex.expectations:
            value, ok = e.evaluate()
            ok_all &= ok
            checks.append({"label": e.label, "computed": _num(value), "expected": e.expected,
                           "printed": e.printed, "tolerance": e.tol, "citation": e.citation,
                           "pass": ok})
            shown = e.printed if e.printed is not None else f"{e.expected:.12g}"
            lines.append(f"  {e.label:<28} computed {value: .6f}  expected {shown:>8}  "
                         f"{'ok' if ok else 'MISMATCH'}")
        verdicts = []
        if ex.verdicts:
            up, low, _ = check_one_sided(ex.curvature, ex.space, TABLE_TOL)
            got = {"upper": up.verdict.value, "lower": low.verdict.value}
            for cond, want in sorted(ex.verdicts.items()):
                ok = got[cond] == want
                ok_all &= ok
                verdicts.append({"condition": cond, "expected": want, "actual": got[cond],
                                 "pass": ok})
                lines.append(f"  {cond} condition: {got[cond]} (expected {want}) "
                             f"{'ok' if ok else 'MISMATCH'}")
        n_ok = sum(c["pass"] for c in checks)
        lines.append(f"  {n_ok}/{len(checks)} values match")
        results.append({"name": ex.name, "citation": ex.citation, "curvature": ex.curvature.K,
                        "checks": checks, "verdicts": verdicts})
    lines.append("all match" if ok_all else "mismatches found")
    _emit(args, {"command": "reproduce", "examples": results, "pass": ok_all},
          "\n".join(lines) + "\n")
    return EXIT_OK if ok_all else EXIT_FAILS


def cmd_sample(args) -> int:
    try:
        rep = run_trials(args.check, args.curvature, args.n, args.seed, args.dim,
                         args.diam_cap, args.tolerance)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = (f"{rep.check} K={rep.curvature:g} dim={rep.dim} n={rep.n} seed={rep.seed}: "
            f"{'pass' if rep.passed else 'FAIL'}\n  max residual: {rep.max_residual:.3e}\n")
    if not rep.passed:
        text += (f"  failures: {rep.failures}; first counterexample seed "
                 f"[{rep.seed}, {rep.first_failure}]\n")
    _emit(args, {"command": "sample", **rep.to_dict()}, text)
    return EXIT_OK if rep.passed else EXIT_FAILS


# -- parser -------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_tolerance() -> float:
    raw = os.environ.get("CATK_TOLERANCE")
    if raw is None:
        return 1e-9
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"CATK_TOLERANCE is not a number: {raw!r}") from None
    if not tol >= 0:
        raise UsageError("CATK_TOLERANCE must be nonnegative")
    return tol


def build_parser(default_tol: float = 1e-9) -> argparse.ArgumentParser:
    p = _Parser(prog="catk", description="Curvature-bound checks for finite distance data.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, with_input=True):
        if with_input:
            sp.add_argument("--input", "-i", required=True, help="CSV or JSON file, '-' for stdin")
        sp.add_argument("--output", "-o", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--tolerance", type=float, default=default_tol)

    v = sub.add_parser("validate", help="check the triangle inequality")
    common(v)
    v.add_argument("--max-witnesses", type=int, default=10)
    v.add_argument("--all-witnesses", action="store_true")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("scan", help="scan a four-point condition")
    common(s)
    s.add_argument("--curvature", "-K", type=float)
    s.add_argument("--condition", choices=CONDITIONS, required=True)
    s.add_argument("--max-witnesses", type=int, default=10)
    s.add_argument("--all-witnesses", action="store_true")
    s.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    s.set_defaults(func=cmd_scan)

    r = sub.add_parser("reproduce", help="recompute the worked examples")
    common(r, with_input=False)
    g = r.add_mutually_exclusive_group(required=True)
    g.add_argument("--example")
    g.add_argument("--all", action="store_true")
    r.add_argument("--subdivisions", type=int, default=0,
                   help="interior points added per branch of the T-graph examples")
    r.set_defaults(func=cmd_reproduce)

    m = sub.add_parser("sample", help="randomized model-space property run")
    common(m, with_input=False)
    m.add_argument("--curvature", "-K", type=float, required=True)
    m.add_argument("--dim", type=int, choices=(2, 3), default=3)
    m.add_argument("--n", type=int, default=1000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--diam-cap", type=float)
    m.add_argument("--check", choices=CHECKS, required=True)
    m.set_defaults(func=cmd_sample)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser(_default_tolerance()).parse_args(argv)
        if getattr(args, "max_witnesses", 1) < 0:
            raise UsageError("--max-witnesses must be nonnegative")
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, MalformedSpaceError) as exc:
        print(f"catk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
