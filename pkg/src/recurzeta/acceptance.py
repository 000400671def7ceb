"""Acceptance fixture suite, shared by ``recurzeta selftest`` and the test-suite.

Each runner returns a :class:`CriterionResult`; ``run_all`` executes them in
order. Random points come from a seeded generator so runs are reproducible.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from flint import acb, arb

from . import balls
from .balls import working_precision
from .continuation import EvalParams, phi_continued, phi_direct
from .errors import HypothesesNotMet, IsPole, PoleProximity, RecurZetaError
from .lrs_core import RecurrenceSpec, builtin_sequence, minimal_polynomial, nbonacci
from .poles import Window, enumerate_poles, residue_numeric_limit
from .spectral import Monotonicity, normalize, spectral_data
from .special_values import (
    is_negative_integer_pole,
    phi_negative_integer,
    quadratic_exact_value,
)

PRECISION = 256
SEED = 20240601

TWO_PLUS_THREE = RecurrenceSpec(2, (-6, 5), (5, 13), "2^n+3^n")
ROOT_TWO = RecurrenceSpec(2, (2, 0), (1, 2), "x^2-2")


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    checks: int = 0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.name} ({self.checks} checks, {self.seconds:.2f}s) {self.detail}".rstrip()


@dataclass
class _Tally:
    checks: int = 0
    failures: list = field(default_factory=list)

    def check(self, ok: bool, what: str):
        self.checks += 1
        if not ok:
            self.failures.append(what)


def _random_points(rng, n, re_range, im_range):
    return [complex(rng.uniform(*re_range), rng.uniform(*im_range)) for _ in range(n)]


def _continued_off_poles(ns, rng, count, re_range, im_range, params):
    """``count`` (s, phi(s)) pairs at random points, resampling near poles."""
    out = []
    while len(out) < count:
        s = complex(rng.uniform(*re_range), rng.uniform(*im_range))
        try:
            out.append((s, phi_continued(ns, s, params)))
        except PoleProximity:
            continue
    return out


def criterion_1(precision=PRECISION) -> CriterionResult:
    t = _Tally()
    rng = random.Random(SEED + 1)
    ns = normalize(builtin_sequence("geometric(1,2)"), precision)
    params = EvalParams(precision_bits=precision)
    for s, val in _continued_off_poles(ns, rng, 20, (-10, 10), (-10, 10), params):
        with working_precision(precision):
            z = balls.as_acb(s)
            w = (-z * arb(2).log()).exp()
            closed = w / (1 - w)
        t.check(val.overlaps(closed), f"closed form at s={s}")
    groups = enumerate_poles(ns, Window(-0.1, 0.1, -30, 30))
    with working_precision(precision):
        log2 = arb(2).log()
        expected = [n for n in range(-10, 11) if abs(float(2 * arb.pi() * n / log2)) <= 30]
        t.check(len(groups) == len(expected), f"{len(groups)} groups, expected {len(expected)}")
        inv = 1 / log2
        for g in groups:
            n = round(float(g.location.imag.mid() * log2 / (2 * arb.pi())))
            target = acb(0, 2 * arb.pi() * n / log2)
            t.check(g.location.contains(target) or g.location.overlaps(target), f"pole n={n}")
            t.check(g.residue.contains(inv) or g.residue.overlaps(acb(inv)), f"residue n={n}")
    return _finish(1, "geometric closed form and imaginary pole lattice", t)


def criterion_2(precision=PRECISION) -> CriterionResult:
    t = _Tally()
    rng = random.Random(SEED + 2)
    params = EvalParams(precision_bits=precision, target_radius=1e-12)
    for spec in (builtin_sequence("fibonacci"), builtin_sequence("tribonacci"),
                 builtin_sequence("nbonacci(4)"), TWO_PLUS_THREE):
        ns = normalize(spec, precision)
        for s in _random_points(rng, 20, (0.5, 4.0), (-10, 10)):
            cont = phi_continued(ns, s, params)
            direct = phi_direct(ns, s, target_radius=1e-12)
            ok = cont.overlaps(direct) and float(balls.radius(cont).upper()) <= 1e-12
            t.check(ok, f"{spec.label} at s={s}")
    return _finish(2, "direct and continued series agree for Re(s) > 0", t)


def criterion_3(precision=PRECISION) -> CriterionResult:
    t = _Tally()
    ns = normalize(builtin_sequence("fibonacci"), precision)
    groups = enumerate_poles(ns, Window(-8.5, 0.5, -20, 20))
    t.check(len(groups) > 0, "no poles found")
    zero_group = None
    for g in groups:
        hit = any(g.location.real.overlaps(arb(v)) for v in (0, -2, -4, -6, -8))
        t.check(hit, f"pole off the lines Re = -2k at {balls.to_complex(g.location)}")
        if g.location.contains(acb(0)):
            zero_group = g
    t.check(zero_group is not None, "no pole at s = 0")
    if zero_group is not None:
        with working_precision(precision):
            golden = (1 + arb(5).sqrt()) / 2
            expected = 1 / golden.log()
        t.check(zero_group.residue.overlaps(acb(expected)), "residue at 0 misses 1/log(phi)")
        est, err = residue_numeric_limit(ns, 0)
        with working_precision(precision):
            ball = acb(arb(est.real.mid(), err), arb(est.imag.mid(), err))
        t.check(ball.overlaps(zero_group.residue), f"numeric limit {est} +/- {err:.2g}")
    return _finish(3, "Fibonacci poles on Re = -2k with residue 1/log(phi) at 0", t)


def criterion_4(precision=PRECISION) -> CriterionResult:
    t = _Tally()
    ns = normalize(builtin_sequence("tribonacci"), precision)
    groups = enumerate_poles(ns, Window(-3.2, 0.5, 0, 30), merge_tol=1e-9)
    t.check(len(groups) > 0, "no poles found")
    for g in groups:
        t.check(len(g.tuples) == 1, f"group of {len(g.tuples)} tuples at {balls.to_complex(g.location)}")
    with working_precision(precision):
        a2 = ns.alphas[1]
        z = a2 / abs(a2)
        coeffs = {12: 1, 10: 4, 8: 11, 6: 12, 4: 11, 2: 4, 0: 1}
        val = sum((c * z ** p for p, c in coeffs.items()), acb(0))
    t.check(val.contains(acb(0)), f"degree-12 polynomial at e^(i theta) is {val}")
    return _finish(4, "Tribonacci pole tuples are distinct", t)


def _rational_fixtures():
    return (builtin_sequence("fibonacci"), builtin_sequence("lucas"),
            builtin_sequence("tribonacci"), TWO_PLUS_THREE)


def criterion_5(precision=PRECISION) -> CriterionResult:
    t = _Tally()
    values = {}
    for spec in _rational_fixtures():
        ns = normalize(spec, precision)
        ns2 = normalize(spec, 2 * precision)
        for m in range(1, 6):
            if is_negative_integer_pole(ns.spectral, m):
                continue
            v = phi_negative_integer(ns, m)
            t.check(v.certification.get("verified_at_double_precision", False),
                    f"{spec.label} m={m} not verified")
            t.check(v == phi_negative_integer(ns2, m), f"{spec.label} m={m} differs at 2p")
            values[(spec.label, m)] = v.as_fraction()
    fib = builtin_sequence("fibonacci")
    exact = quadratic_exact_value(fib, 1).as_fraction()
    t.check(exact == Fraction(-1), f"quadratic oracle gives {exact} for Fibonacci m=1")
    t.check(values.get(("fibonacci", 1)) == exact, "Fibonacci m=1 disagrees with the oracle")
    t.check(values.get(("2^n+3^n", 1)) == Fraction(-7, 2), "2^n+3^n m=1 is not -7/2")
    return _finish(5, "rational values at negative integers", t)


def random_quadratic_specs(count, seed=SEED + 6, bound=9):
    """Degree-2 specs that satisfy the hypotheses, drawn from a seeded generator."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        coeffs = (rng.randint(-bound, bound), rng.randint(-bound, bound))
        initial = (rng.randint(-bound, bound), rng.randint(-bound, bound))
        try:
            spec = RecurrenceSpec(2, coeffs, initial)
            if minimal_polynomial(spec).degree != 2:
                continue
            normalize(spec)
        except RecurZetaError:
            continue
        out.append(spec)
    return out


def criterion_6(precision=PRECISION) -> CriterionResult:
    t = _Tally()
    for spec in random_quadratic_specs(10):
        ns = normalize(spec, precision)
        for m in range(1, 5):
            try:
                exact = quadratic_exact_value(spec, m)
            except IsPole:
                t.check(is_negative_integer_pole(ns.spectral, m), f"{spec} m={m} pole mismatch")
                continue
            t.check(phi_negative_integer(ns, m) == exact, f"{spec.to_dict()} m={m}")
    return _finish(6, "quadratic oracle agreement", t)


def criterion_7(precision=PRECISION) -> CriterionResult:
    t = _Tally()
    with working_precision(precision):
        roots = [spectral_data(nbonacci(n), precision).alphas[0] for n in range(2, 9)]
        t.check(all(r.imag.is_zero() for r in roots), "dominant root not certified real")
        reals = [r.real for r in roots]
        t.check(bool(reals[0] > 1), "phi_2 <= 1")
        for n, (a, b) in enumerate(zip(reals, reals[1:]), start=2):
            t.check(bool(a < b), f"phi_{n} < phi_{n + 1} not certified")
        t.check(bool(reals[-1] < 2), "phi_8 >= 2")
    return _finish(7, "N-bonacci dominant roots increase towards 2", t)


def criterion_8(precision=PRECISION) -> CriterionResult:
    t = _Tally()
    sd = spectral_data(ROOT_TWO, precision)
    t.check(str(sd.poly) == "x^2 - 2", f"minimal polynomial {sd.poly}")
    t.check("no strictly dominant root" in (sd.report.diagnosis or ""), f"diagnosis {sd.report.diagnosis}")
    try:
        normalize(ROOT_TWO, precision)
        t.check(False, "x^2 - 2 accepted")
    except HypothesesNotMet:
        t.check(True, "")
    alt = spectral_data(builtin_sequence("geometric(1,-2)"), precision)
    t.check(alt.report.monotonicity_class is Monotonicity.INFINITE_SIGN_CHANGES,
            f"(-2)^n classified {alt.report.monotonicity_class.value}")
    return _finish(8, "hypothesis gating", t)


def criterion_9(precision=PRECISION) -> CriterionResult:
    t = _Tally()
    rng = random.Random(SEED + 9)
    params = EvalParams(precision_bits=precision)
    for spec in (builtin_sequence("fibonacci"), builtin_sequence("tribonacci"),
                 builtin_sequence("nbonacci(4)"), TWO_PLUS_THREE,
                 builtin_sequence("geometric(1,2)")):
        ns = normalize(spec, precision)
        for s, val in _continued_off_poles(ns, rng, 20, (-6, 4), (-10, 10), params):
            other = phi_continued(ns, s.conjugate(), params)
            t.check(other.overlaps(val.conjugate()), f"{spec.label} at s={s}")
    return _finish(9, "reflection phi(conj s) = conj phi(s)", t)


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9)


def _finish(number, name, tally) -> CriterionResult:
    detail = "" if not tally.failures else "; ".join(tally.failures[:3])
    return CriterionResult(number, name, not tally.failures, detail, 0.0, tally.checks)


def run_criterion(fn, precision=PRECISION) -> CriterionResult:
    start = time.perf_counter()
    try:
        res = fn(precision)
    except RecurZetaError as exc:
        number = int(fn.__name__.rsplit("_", 1)[1])
        res = CriterionResult(number, fn.__name__, False, f"{exc.code}: {exc}")
    res.seconds = time.perf_counter() - start
    return res


def run_all(precision=PRECISION, only=None):
    for fn in CRITERIA:
        number = int(fn.__name__.rsplit("_", 1)[1])
        if only and number not in only:
            continue
        yield run_criterion(fn, precision)
