"""Certified roots, Binet coefficients, dominance checks and the shift to a
strictly increasing tail.

Roots are located with the Aberth iteration on each square-free factor and
then certified with Smith's inclusion theorem: for a monic degree-n
polynomial f and distinct approximations z_i, every root lies in the union of
the discs ``|z - z_i| <= n |f(z_i) / prod_{j != i}(z_i - z_j)|`` and a
connected component made of k discs holds exactly k roots. Pairwise disjoint
discs therefore certify one simple root each.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Optional

from flint import acb, acb_mat, arb, fmpz_poly

from . import balls
from .balls import working_precision
from .errors import (
    HypothesesNotMet,
    IllConditioned,
    InternalInconsistency,
    PrecisionExhausted,
    RepeatedRoots,
    ZeroRoot,
)
from .lrs_core import IntegerPolynomial, RecurrenceSpec, generate_terms, minimal_polynomial


@dataclass(frozen=True, eq=False)
class RootSet:
    poly: IntegerPolynomial
    roots: tuple
    multiplicities: tuple
    precision_bits: int

    def __len__(self):
        return len(self.roots)

    def moduli(self) -> list:
        return [abs(a) for a in self.roots]


@dataclass(frozen=True, eq=False)
class BinetData:
    lambdas: tuple
    roots: Optional[RootSet] = field(default=None, repr=False)


class Monotonicity(str, enum.Enum):
    EVENTUALLY_INCREASING = "EventuallyIncreasing"
    NEGATED_EVENTUALLY_INCREASING = "NegatedEventuallyIncreasing"
    INFINITE_SIGN_CHANGES = "InfiniteSignChanges"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class DominanceReport:
    dominant_is_real: bool
    dominant_gt_one: bool
    dominant_simple: bool
    strictly_dominant: bool
    separable: bool
    lambda1_positive: bool
    monotonicity_class: Monotonicity
    q_ratio_at_shift: Optional[float] = None
    shift_n0: Optional[int] = None
    norm_abs: Optional[float] = None
    theta: Optional[float] = None
    sigma_c: Optional[float] = None
    irreducible: Optional[bool] = None
    diagnosis: Optional[str] = None

    @property
    def hypotheses_met(self) -> bool:
        return self.monotonicity_class is Monotonicity.EVENTUALLY_INCREASING and self.separable

    def to_dict(self) -> dict:
        return {
            "dominant_is_real": self.dominant_is_real,
            "dominant_gt_one": self.dominant_gt_one,
            "dominant_simple": self.dominant_simple,
            "strictly_dominant": self.strictly_dominant,
            "separable": self.separable,
            "lambda1_positive": self.lambda1_positive,
            "monotonicity_class": self.monotonicity_class.value,
            "q_ratio_at_shift": _fmt(self.q_ratio_at_shift),
            "shift_n0": self.shift_n0,
            "norm_abs": _fmt(self.norm_abs),
            "theta": _fmt(self.theta),
            "sigma_c": _fmt(self.sigma_c),
            "irreducible": "unknown" if self.irreducible is None else self.irreducible,
            "diagnosis": self.diagnosis,
        }


def _fmt(x):
    return None if x is None else f"{x:.15g}"


@dataclass(frozen=True, eq=False)
class SpectralData:
    spec: RecurrenceSpec
    roots: RootSet
    binet: Optional[BinetData]
    report: DominanceReport

    @property
    def poly(self) -> IntegerPolynomial:
        return self.roots.poly

    @property
    def precision_bits(self) -> int:
        return self.roots.precision_bits

    @property
    def alphas(self) -> tuple:
        return self.roots.roots

    @property
    def lambdas(self) -> tuple:
        if self.binet is None:
            raise RepeatedRoots("Binet coefficients need a separable minimal polynomial")
        return self.binet.lambdas


@dataclass(frozen=True, eq=False)
class NormalizedSequence:
    """Sequence split into an exact prefix a_1..a_{n0} and a tail a_{n0+m} = sum lambda'_i alpha_i^m.

    ``lambdas`` are the shifted coefficients lambda_i * alpha_i^{n0}; the tail is
    positive, strictly increasing and has q-ratio ``q_ratio`` < 1 at m = 1.
    """

    spec: RecurrenceSpec
    shift_n0: int
    prefix_terms: tuple
    spectral: SpectralData
    lambdas: tuple
    q_ratio: float
    q_ball: arb = field(repr=False, default=None)

    @property
    def alphas(self) -> tuple:
        return self.spectral.alphas

    @property
    def precision_bits(self) -> int:
        return self.spectral.precision_bits

    @property
    def degree(self) -> int:
        return len(self.spectral.alphas)

    def at_precision(self, bits: int) -> "NormalizedSequence":
        if bits == self.precision_bits:
            return self
        return _normalized_at(self.spec, self.shift_n0, bits)

    def reshift(self, n0: int) -> "NormalizedSequence":
        """Same sequence with a longer exact prefix (``n0`` >= current shift)."""
        if n0 < self.shift_n0:
            raise ValueError("cannot shorten the prefix below the certified shift")
        if n0 == self.shift_n0:
            return self
        return _normalized_at(self.spec, n0, self.precision_bits)


# ---------------------------------------------------------------- root finding


def _horner(coeffs, z):
    acc = acb(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _horner_with_derivative(coeffs, z):
    p = acb(0)
    dp = acb(0)
    for c in reversed(coeffs):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _aberth(coeffs, bits):
    """Approximate all roots of a monic square-free integer polynomial (midpoints only)."""
    n = len(coeffs) - 1
    # Fujiwara bound on root moduli
    bound = 2 * max(abs(coeffs[n - k]) ** (1.0 / k) for k in range(1, n + 1))
    bound = max(bound, 1.0)
    r0 = 0.5 * bound
    zs = [acb(r0 * math.cos(2 * math.pi * k / n + 0.4), r0 * math.sin(2 * math.pi * k / n + 0.4))
          for k in range(n)]
    tol = arb(2) ** (-(bits - 4))
    settled = 0
    for _ in range(60 + 4 * bits):
        biggest = arb(0)
        for i in range(n):
            p, dp = _horner_with_derivative(coeffs, zs[i])
            if p.is_zero():
                continue
            if dp.is_zero():
                dp = acb(tol)
            ratio = (p / dp).mid()
            s = acb(0)
            for j in range(n):
                if j != i:
                    s += 1 / (zs[i] - zs[j])
            corr = (ratio / (1 - ratio * s)).mid()
            zs[i] = (zs[i] - corr).mid()
            rel = (abs(corr) / max(abs(zs[i]), arb(1))).mid()
            if rel > biggest:
                biggest = rel
        if biggest < tol:
            settled += 1
            if settled >= 2:
                break
        else:
            settled = 0
    return zs


def _inclusion_radii(coeffs, centers):
    n = len(coeffs) - 1
    radii = []
    for i, z in enumerate(centers):
        denom = acb(1)
        for j, w in enumerate(centers):
            if j != i:
                denom *= z - w
        if denom.contains(0):
            return None
        weierstrass = _horner(coeffs, z) / denom
        radii.append(arb(n) * abs(weierstrass).upper())
    return radii


def _certify_factor(coeffs, bits):
    """Certified discs (center, radius, is_real) for each root of a square-free factor."""
    n = len(coeffs) - 1
    if n == 1:
        return [(acb(-coeffs[0]), arb(0), True)]
    approx = _aberth(coeffs, bits)
    radii = _inclusion_radii(coeffs, approx)
    if radii is None:
        return None
    snapped = [
        acb(z.real) if abs(z.imag) <= rad else z
        for z, rad in zip(approx, radii)
    ]
    attempts = []
    if any(a is not b for a, b in zip(snapped, approx)):
        attempts.append(snapped)
    attempts.append(approx)
    for centers in attempts:
        rads = radii if centers is approx else _inclusion_radii(coeffs, centers)
        if rads is None or not _pairwise_disjoint(centers, rads):
            continue
        # a disc symmetric about the real axis holding exactly one root of a
        # real polynomial holds a real root
        return [(c, rad, c.imag.is_zero()) for c, rad in zip(centers, rads)]
    return None


def _pairwise_disjoint(centers, radii):
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            if not abs(centers[i] - centers[j]) > radii[i] + radii[j]:
                return False
    return True


def _disc_to_ball(center, rad, real):
    if real:
        return acb(arb(center.real.mid(), rad))
    return acb(arb(center.real.mid(), rad), arb(center.imag.mid(), rad))


def _order_roots(entries):
    """Sort by decreasing modulus; equal-modulus clusters by increasing principal argument."""
    entries = sorted(entries, key=lambda e: -float(abs(e[0]).mid()))
    ordered, cluster = [], []
    for e in entries:
        if cluster and not any(abs(e[0]).overlaps(abs(c[0])) for c in cluster):
            ordered.extend(sorted(cluster, key=lambda c: float(c[0].arg().mid())))
            cluster = []
        cluster.append(e)
    ordered.extend(sorted(cluster, key=lambda c: float(c[0].arg().mid())))
    return ordered


def find_roots(poly: IntegerPolynomial, precision_bits: int = balls.START_PRECISION) -> RootSet:
    """Certified enclosures of the roots of ``poly`` with multiplicities."""
    if poly.degree < 1:
        raise ValueError("polynomial must have degree >= 1")
    _, factors = fmpz_poly(list(poly.coeffs)).factor_squarefree()
    for bits in balls.precision_schedule(precision_bits):
        with working_precision(bits):
            discs = []
            for factor, mult in factors:
                coeffs = [int(c) for c in factor.coeffs()]
                certified = _certify_factor(coeffs, bits)
                if certified is None:
                    break
                discs.extend((c, rad, real, mult) for c, rad, real in certified)
            else:
                if _pairwise_disjoint([d[0] for d in discs], [d[1] for d in discs]):
                    entries = [(_disc_to_ball(c, rad, real), mult) for c, rad, real, mult in discs]
                    entries = _order_roots(entries)
                    return RootSet(poly, tuple(e[0] for e in entries),
                                   tuple(e[1] for e in entries), bits)
    raise PrecisionExhausted(f"could not separate the roots of {poly}")


# ------------------------------------------------------------------- Binet


def binet_coefficients(roots: RootSet, spec: RecurrenceSpec) -> BinetData:
    """Solve the Vandermonde system  sum_i lambda_i alpha_i^n = a_n, n = 1..r."""
    if any(m > 1 for m in roots.multiplicities):
        raise RepeatedRoots(f"minimal polynomial {roots.poly} has repeated roots")
    if any(a.contains(0) and a.is_exact() for a in roots.roots) or roots.poly.coeffs[0] == 0:
        raise ZeroRoot(f"minimal polynomial {roots.poly} has the root 0")
    r = len(roots)
    terms = generate_terms(spec, max(r, 3 * spec.order)).terms
    current = roots
    for bits in balls.precision_schedule(roots.precision_bits):
        if bits != current.precision_bits:
            current = find_roots(roots.poly, bits)
        with working_precision(bits):
            alphas = current.roots
            vand = acb_mat([[alphas[i] ** (n + 1) for i in range(r)] for n in range(r)])
            rhs = acb_mat([[terms[n]] for n in range(r)])
            try:
                sol = vand.solve(rhs)
            except ZeroDivisionError:
                continue
            lambdas = []
            for i in range(r):
                lam = sol[i, 0]
                if alphas[i].imag.is_zero():
                    lam = acb(lam.real)
                lambdas.append(lam)
            worst = max(float(balls.radius(l).upper()) / max(float(abs(l).mid()), 1e-300)
                        for l in lambdas)
            if worst > 2.0 ** (-bits / 4):
                continue
            for n in range(1, len(terms) + 1):
                total = sum((l * a ** n for l, a in zip(lambdas, alphas)), acb(0))
                if not total.contains(terms[n - 1]):
                    raise InternalInconsistency(f"Binet reconstruction failed at n={n}")
            return BinetData(tuple(lambdas), current)
    raise IllConditioned("Binet coefficients could not be enclosed tightly enough")


# -------------------------------------------------------------- hypotheses


def _irreducible_small(poly: IntegerPolynomial) -> Optional[bool]:
    # degree <= 3 monic: reducible iff there is an integer root dividing the constant term
    if poly.degree == 1:
        return True
    if poly.degree > 3:
        return None
    c0 = poly.coeffs[0]
    if c0 == 0:
        return False
    for d in range(1, int(math.isqrt(abs(c0))) + 1):
        if abs(c0) % d == 0:
            for cand in (d, -d, abs(c0) // d, -(abs(c0) // d)):
                if poly(cand) == 0:
                    return False
    return True


def _q_sequence(alphas, lambdas, start_power, count):
    """Certified q_n = sum_{i>=2} |lambda_i alpha_i^n| / (lambda_1 alpha_1^n) for consecutive n."""
    lam1 = lambdas[0].real
    a1 = alphas[0].real
    mags = [abs(l) for l in lambdas[1:]]
    mods = [abs(a) for a in alphas[1:]]
    out = []
    n = start_power
    num_terms = [m * mod ** n for m, mod in zip(mags, mods)]
    den = lam1 * a1 ** n
    for _ in range(count):
        out.append(sum(num_terms, arb(0)) / den)
        num_terms = [t * mod for t, mod in zip(num_terms, mods)]
        den = den * a1
    return out


def _find_shift(spec, alphas, lambdas, max_scan=20000):
    """Smallest n0 after which the sequence is positive, strictly increasing, with q < 1."""
    if len(alphas) == 1:
        return 0, arb(0)
    a1 = alphas[0].real
    rho = max(abs(a) for a in alphas[1:]) / a1
    safe = (a1 - 1) / (1 + a1 * rho)
    if not safe > 0:
        raise HypothesesNotMet("dominant root is not certifiably > 1")
    threshold = safe if safe < 1 else arb(1)
    qs = []
    n_star = None
    chunk = 64
    while n_star is None:
        start = len(qs) + 1
        if start > max_scan:
            raise HypothesesNotMet("q-ratio never certified below the monotonicity threshold")
        qs.extend(_q_sequence(alphas, lambdas, start, chunk))
        for idx in range(start - 1, len(qs)):
            if qs[idx] < threshold:
                n_star = idx + 1
                break
    if len(qs) <= n_star:
        qs.extend(_q_sequence(alphas, lambdas, len(qs) + 1, 1))
    terms = generate_terms(spec, n_star + 1).terms
    # n0 must satisfy: exact checks on (n0, n_star], and q_{n0+1} < 1
    n0 = n_star
    for cand in range(n_star - 1, -1, -1):
        n = cand + 1
        if terms[n - 1] >= 1 and terms[n] > terms[n - 1] and qs[cand] < 1:
            n0 = cand
        else:
            break
    return n0, qs[n0]


def check_hypotheses(roots: RootSet, binet: Optional[BinetData],
                     spec: Optional[RecurrenceSpec] = None) -> DominanceReport:
    """Certified dominance flags and the monotonicity trichotomy.

    With ``spec`` given and the sequence eventually increasing, the shift and
    the q-ratio at n0 + 1 are filled in as well.
    """
    alphas = roots.roots
    mults = roots.multiplicities
    separable = all(m == 1 for m in mults)
    with working_precision(roots.precision_bits):
        mods = [abs(a) for a in alphas]
        strict = len(alphas) == 1 or all(mods[0] > m for m in mods[1:])
        simple = mults[0] == 1
        real = strict and alphas[0].imag.is_zero()
        gt_one = real and bool(alphas[0].real > 1)
        lt_minus_one = real and bool(alphas[0].real < -1)
        lam_pos = lam_neg = False
        if binet is not None and real:
            lam_pos = bool(binet.lambdas[0].real > 0)
            lam_neg = bool(binet.lambdas[0].real < 0)
        norm = 1
        for a, m in zip(alphas, mults):
            norm = norm * abs(a) ** m
        theta = None
        if len(alphas) == 3 and real and not alphas[1].imag.is_zero():
            theta = abs(float(alphas[1].arg().mid()))

        diagnosis = None
        if not strict:
            cls = Monotonicity.INCONCLUSIVE
            diagnosis = "no strictly dominant root: several roots share the largest modulus"
        elif not simple:
            cls = Monotonicity.INCONCLUSIVE
            diagnosis = "dominant root is not simple"
        elif not real:
            cls = Monotonicity.INCONCLUSIVE
            diagnosis = "dominant root is not real"
        elif gt_one and lam_pos:
            cls = Monotonicity.EVENTUALLY_INCREASING
        elif gt_one and lam_neg:
            cls = Monotonicity.NEGATED_EVENTUALLY_INCREASING
            diagnosis = "dominant Binet coefficient is negative: -a_n is eventually increasing"
        elif lt_minus_one:
            cls = Monotonicity.INFINITE_SIGN_CHANGES
            diagnosis = "dominant root < -1: infinitely many sign changes"
        else:
            cls = Monotonicity.INCONCLUSIVE
            if binet is None:
                diagnosis = "repeated roots: constant Binet coefficients unavailable"
            elif not gt_one:
                diagnosis = "dominant root is not certifiably > 1"
            else:
                diagnosis = "sign of the dominant Binet coefficient not certified"
        if cls is Monotonicity.EVENTUALLY_INCREASING and not separable:
            diagnosis = "minimal polynomial has repeated roots"

        n0 = q = None
        if cls is Monotonicity.EVENTUALLY_INCREASING and spec is not None and binet is not None:
            n0, qball = _find_shift(spec, alphas, binet.lambdas)
            q = float(qball.upper())

    return DominanceReport(
        dominant_is_real=real,
        dominant_gt_one=gt_one,
        dominant_simple=simple,
        strictly_dominant=strict,
        separable=separable,
        lambda1_positive=lam_pos,
        monotonicity_class=cls,
        q_ratio_at_shift=q,
        shift_n0=n0,
        norm_abs=float(norm.mid()),
        theta=theta,
        sigma_c=0.0 if cls is Monotonicity.EVENTUALLY_INCREASING else None,
        irreducible=_irreducible_small(roots.poly),
        diagnosis=diagnosis,
    )


# ------------------------------------------------------------ normalization


def _shifted(alphas, lambdas, n0):
    return tuple(l * a ** n0 for l, a in zip(lambdas, alphas))


def _assemble(spec, sd, n0):
    with working_precision(sd.precision_bits):
        lam = _shifted(sd.alphas, sd.lambdas, n0)
        if len(lam) > 1:
            q = _q_sequence(sd.alphas, lam, 1, 1)[0]
        else:
            q = arb(0)
        if not q < 1:
            raise HypothesesNotMet(f"q-ratio not certified < 1 at shift {n0}")
    prefix = generate_terms(spec, n0).terms if n0 else ()
    return NormalizedSequence(spec, n0, prefix, sd, lam, float(q.upper()), q)


def normalize_shift(spec: RecurrenceSpec, roots: RootSet, binet: BinetData) -> NormalizedSequence:
    report = check_hypotheses(roots, binet, spec)
    if report.monotonicity_class is not Monotonicity.EVENTUALLY_INCREASING:
        raise HypothesesNotMet(report.diagnosis or "sequence is not eventually increasing")
    sd = SpectralData(spec, roots, binet, report)
    return _assemble(spec, sd, report.shift_n0)


@functools.lru_cache(maxsize=256)
def spectral_data(spec: RecurrenceSpec, precision_bits: int = balls.START_PRECISION) -> SpectralData:
    """Minimal polynomial, roots, Binet data and dominance report (cached)."""
    poly = minimal_polynomial(spec)
    roots = find_roots(poly, precision_bits)
    binet = None
    if all(m == 1 for m in roots.multiplicities) and poly.coeffs[0] != 0:
        binet = binet_coefficients(roots, spec)
        roots = binet.roots
    report = check_hypotheses(roots, binet, spec)
    return SpectralData(spec, roots, binet, report)


def require_hypotheses(sd: SpectralData) -> None:
    if sd.poly.coeffs[0] == 0:
        raise ZeroRoot(f"minimal polynomial {sd.poly} has the root 0")
    if not sd.report.separable:
        raise RepeatedRoots(f"minimal polynomial {sd.poly} has repeated roots")
    if sd.report.monotonicity_class is not Monotonicity.EVENTUALLY_INCREASING:
        raise HypothesesNotMet(sd.report.diagnosis or "hypotheses not met")


@functools.lru_cache(maxsize=256)
def _normalized_at(spec: RecurrenceSpec, n0: int, bits: int) -> NormalizedSequence:
    sd = spectral_data(spec, bits)
    require_hypotheses(sd)
    return _assemble(spec, sd, n0)


def normalize(spec: RecurrenceSpec, precision_bits: int = balls.START_PRECISION,
              min_shift: int = 0) -> NormalizedSequence:
    """Certify the hypotheses and return the shifted sequence used by the continuation."""
    sd = spectral_data(spec, precision_bits)
    require_hypotheses(sd)
    n0 = max(sd.report.shift_n0, min_shift)
    return _normalized_at(spec, n0, sd.precision_bits)
