"""Command-line front end.

    recurzeta analyze  (--builtin NAME | --input PATH)
    recurzeta eval     (--builtin NAME | --input PATH) --s RE IM
    recurzeta poles    (--builtin NAME | --input PATH) --window RE_MIN RE_MAX IM_MIN IM_MAX [--map csv|svg]
    recurzeta special  (--builtin NAME | --input PATH) --m-max M
    recurzeta selftest

Reports are JSON on stdout. Exit status is 0 on success, 2 when the sequence
fails the hypotheses and 1 on any other error; failures print
``{"error": {"code": ..., "message": ...}}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Optional

from . import __version__, balls
from .errors import (
    HypothesesNotMet,
    InternalInconsistency,
    IsPole,
    ParseError,
    RecurZetaError,
    RemovableFormulaPoint,
    ValidationError,
)
from .lrs_core import RecurrenceSpec, builtin_sequence, minimal_polynomial


@dataclass
class RunConfig:
    command: str
    input_path: Optional[str] = None
    builtin: Optional[str] = None
    precision_bits: int = balls.START_PRECISION
    summary: bool = False
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command != "selftest" and (self.input_path is None) == (self.builtin is None):
            raise ValidationError("give exactly one of --input or --builtin")
        if self.precision_bits < 16:
            raise ValidationError("--precision must be at least 16 bits")


def parse_input(source) -> RecurrenceSpec:
    """Parse a JSON recurrence spec from bytes or text."""
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc.reason}", exc.start) from None
    try:
        data = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{exc.msg} at line {exc.lineno} column {exc.colno}", exc.pos) from None
    return RecurrenceSpec.from_dict(data)


def load_spec(cfg: RunConfig) -> RecurrenceSpec:
    if cfg.builtin is not None:
        return builtin_sequence(cfg.builtin)
    if cfg.input_path == "-":
        return parse_input(sys.stdin.buffer.read())
    try:
        with open(cfg.input_path, "rb") as fh:
            return parse_input(fh.read())
    except OSError as exc:
        raise ValidationError(f"cannot read {cfg.input_path}: {exc.strerror}") from None


# ---------------------------------------------------------------- commands


def _analyze(cfg, spec):
    from .spectral import spectral_data

    sd = spectral_data(spec, cfg.precision_bits)
    report = {
        "input": spec.to_dict(),
        "minimal_polynomial": str(sd.poly),
        "degree": sd.poly.degree,
        "precision_bits": sd.precision_bits,
        "roots": [balls.enclosure_dict(a) for a in sd.alphas],
        "multiplicities": list(sd.roots.multiplicities),
        "binet": None if sd.binet is None else [balls.enclosure_dict(l) for l in sd.lambdas],
        "dominance": sd.report.to_dict(),
        "monotonicity": sd.report.monotonicity_class.value,
        "hypotheses_met": sd.report.hypotheses_met,
    }
    text = [f"minimal polynomial: {sd.poly}",
            f"class: {sd.report.monotonicity_class.value}"]
    if not sd.report.hypotheses_met:
        err = HypothesesNotMet(sd.report.diagnosis or "hypotheses not met")
        return err.exit_code, {"error": _error_obj(err), "report": report}, text
    text.append(f"shift n0 = {sd.report.shift_n0}")
    return 0, report, text


def _eval(cfg, spec):
    from .continuation import EvalParams, phi_continued, phi_direct
    from .spectral import normalize

    re_s, im_s = cfg.options["s"]
    s = complex(re_s, im_s)
    ns = normalize(spec, cfg.precision_bits)
    params = EvalParams(precision_bits=cfg.precision_bits, k_max=cfg.options["k_max"],
                        target_radius=cfg.options["target_radius"],
                        pole_guard=cfg.options["pole_guard"])
    value = phi_continued(ns, s, params)
    report = {
        "input": spec.to_dict(),
        "s": {"re": repr(re_s), "im": repr(im_s)},
        "shift_n0": ns.shift_n0,
        "value": balls.enclosure_dict(value),
        "direct": None,
        "agree": None,
    }
    if re_s > 0.25:
        direct = phi_direct(ns, s, target_radius=cfg.options["target_radius"])
        report["direct"] = balls.enclosure_dict(direct)
        report["agree"] = bool(direct.overlaps(value))
        if not report["agree"]:
            raise InternalInconsistency("direct and continued enclosures are disjoint")
    return 0, report, [f"phi({s}) = {value}"]


def _poles(cfg, spec):
    from .poles import Window, enumerate_poles, export_pole_map
    from .spectral import normalize

    w = Window(*cfg.options["window"])
    ns = normalize(spec, cfg.precision_bits)
    groups = enumerate_poles(ns, w, merge_tol=cfg.options["merge_tol"],
                             max_tuples=cfg.options["max_tuples"])
    report = {
        "input": spec.to_dict(),
        "window": {"re_min": w.re_min, "re_max": w.re_max, "im_min": w.im_min, "im_max": w.im_max},
        "count": len(groups),
        "groups": [g.to_dict() for g in groups],
    }
    fmt = cfg.options.get("map")
    if fmt:
        payload = export_pole_map(groups, fmt)
        out = cfg.options.get("output")
        if out is None:
            return 0, payload, []
        with open(out, "wb") as fh:
            fh.write(payload)
        report["map"] = {"format": fmt, "path": out}
    return 0, report, [f"{len(groups)} pole groups"]


def _special(cfg, spec):
    from .spectral import normalize
    from .special_values import phi_negative_integer

    ns = normalize(spec, cfg.precision_bits)
    rows = []
    for m in range(cfg.options["m_min"], cfg.options["m_max"] + 1):
        try:
            v = phi_negative_integer(ns, m)
        except RemovableFormulaPoint as exc:
            rows.append({"m": m, "pole": False, "value": None, "note": exc.code})
            continue
        except IsPole:
            rows.append({"m": m, "pole": True, "value": None})
            continue
        rows.append({"m": m, "pole": False, "value": v.to_dict(), "fraction": str(v)})
    report = {"input": spec.to_dict(), "shift_n0": ns.shift_n0, "values": rows}
    text = [f"phi(-{r['m']}) = {r.get('fraction') or r.get('note') or 'pole'}" for r in rows]
    return 0, report, text


def _selftest(cfg, spec):
    from .acceptance import run_all

    only = set(cfg.options.get("only") or ())
    results = list(run_all(max(cfg.precision_bits, 256), only))
    report = {
        "criteria": [
            {"number": r.number, "name": r.name, "passed": r.passed, "checks": r.checks,
             "detail": r.detail}
            for r in results
        ],
        "passed": all(r.passed for r in results),
    }
    return (0 if report["passed"] else 1), report, [r.line() for r in results]


COMMANDS = {
    "analyze": _analyze,
    "eval": _eval,
    "poles": _poles,
    "special": _special,
    "selftest": _selftest,
}


def run(cfg: RunConfig):
    """Execute a command; returns (exit_code, report, summary_lines)."""
    spec = None if cfg.command == "selftest" else load_spec(cfg)
    if spec is not None:
        minimal_polynomial(spec)
    return COMMANDS[cfg.command](cfg, spec)


# ---------------------------------------------------------------- argparse


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _positive(kind):
    def conv(text):
        try:
            value = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return value
    return conv


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--input", metavar="PATH", help="JSON spec file, or - for stdin")
    src.add_argument("--builtin", metavar="NAME",
                     help="fibonacci, lucas, tribonacci, nbonacci(N), geometric(c,b)")
    common.add_argument("--precision", type=_positive(int), default=balls.START_PRECISION,
                        metavar="BITS", help="starting working precision")
    common.add_argument("--summary", action="store_true",
                        help="also print a plain-text summary on stderr")

    parser = _Parser(prog="recurzeta", description="Dirichlet series of linear recurrences")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("analyze", parents=[common], help="minimal polynomial, roots, dominance")

    p = sub.add_parser("eval", parents=[common], help="evaluate phi(s)")
    p.add_argument("--s", nargs=2, type=float, required=True, metavar=("RE", "IM"))
    p.add_argument("--k-max", type=_positive(int), default=4000)
    p.add_argument("--target-radius", type=_positive(float), default=1e-12)
    p.add_argument("--pole-guard", type=_positive(float), default=1e-6)

    p = sub.add_parser("poles", parents=[common], help="enumerate poles in a window")
    p.add_argument("--window", nargs=4, type=float, required=True,
                   metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"))
    p.add_argument("--merge-tol", type=float, default=1e-9)
    p.add_argument("--max-tuples", type=_positive(int), default=200_000)
    p.add_argument("--map", choices=("csv", "svg"))
    p.add_argument("--output", metavar="PATH", help="where to write the pole map")

    p = sub.add_parser("special", parents=[common], help="rational values phi(-m)")
    p.add_argument("--m-max", type=_positive(int), required=True)
    p.add_argument("--m-min", type=_positive(int), default=1)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance fixtures")
    p.add_argument("--only", type=int, nargs="+", metavar="N")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    skip = {"command", "input", "builtin", "precision", "summary"}
    options = {k: v for k, v in vars(ns).items() if k not in skip}
    return RunConfig(ns.command, ns.input, ns.builtin, ns.precision, ns.summary, options)


def _error_obj(exc: RecurZetaError) -> dict:
    obj = {"code": exc.code, "message": str(exc)}
    if getattr(exc, "position", None) is not None:
        obj["position"] = exc.position
    return obj


def _emit(report, out):
    if isinstance(report, bytes):
        out.buffer.write(report)
    else:
        out.write(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    out.flush()


def main(argv=None) -> int:
    try:
        cfg = config_from_args(build_parser().parse_args(argv))
        code, report, text = run(cfg)
    except RecurZetaError as exc:
        _emit({"error": _error_obj(exc)}, sys.stdout)
        print(f"recurzeta: {exc.code}: {exc}", file=sys.stderr)
        return exc.exit_code
    _emit(report, sys.stdout)
    if cfg.summary:
        for line in text:
            print(line, file=sys.stderr)
    return code
