"""Rational values phi(-m) at negative integers that are not poles.

At s = -m the continued series terminates and collapses to

    phi(-m) = sum_{|beta| = m} (m choose beta) lambda^beta alpha^beta / (1 - alpha^beta),

a symmetric function of the roots, hence rational. When -m lies on the formula
pole set the value is not produced: either it is a genuine pole, or only
tuples with k_1 > m sit there and their limits add a term the finite sum does
not see (``RemovableFormulaPoint``). The general route
evaluates it in ball arithmetic and recovers the rational number with a
continued-fraction reconstruction after multiplying by the integer
D = prod_{|beta|=m} (1 - alpha^beta). Degree-2 sequences additionally have an
exact route through arithmetic in Q(sqrt(Delta)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from flint import acb, arb

from . import balls
from .balls import working_precision
from .errors import (
    HypothesesNotMet,
    IsPole,
    NonRationalResult,
    NotAnInteger,
    NotQuadratic,
    ReconstructionFailed,
    RemovableFormulaPoint,
    RepeatedRoots,
    ZeroDenominator,
    ZeroRoot,
)
from .lrs_core import RecurrenceSpec, generate_terms, minimal_polynomial
from .poles import Window, enumerate_poles
from .spectral import NormalizedSequence, spectral_data


def beta_indices(m: int, r: int) -> Iterator[tuple]:
    """All (beta_1, ..., beta_r) >= 0 with sum m, lexicographically descending in beta_1."""
    if r == 1:
        yield (m,)
        return
    for first in range(m, -1, -1):
        for rest in beta_indices(m - first, r - 1):
            yield (first,) + rest


def multinomial_coefficient(beta) -> int:
    out = math.factorial(sum(beta))
    for b in beta:
        out //= math.factorial(b)
    return out


@dataclass(frozen=True)
class RationalValue:
    numerator: int
    denominator: int
    certification: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        frac = Fraction(self.numerator, self.denominator)
        object.__setattr__(self, "numerator", frac.numerator)
        object.__setattr__(self, "denominator", frac.denominator)

    @classmethod
    def from_fraction(cls, frac: Fraction, **certification) -> "RationalValue":
        return cls(frac.numerator, frac.denominator, dict(certification))

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def certified(self) -> bool:
        return bool(self.certification.get("certified", False))

    def to_dict(self) -> dict:
        return {"num": str(self.numerator), "den": str(self.denominator),
                "certified": self.certified}

    def __str__(self):
        if self.denominator == 1:
            return str(self.numerator)
        return f"{self.numerator}/{self.denominator}"


def _arb_to_fraction(x: arb) -> Fraction:
    man, exp = x.mid().man_exp()
    man, exp = int(man), int(exp)
    return Fraction(man * 2 ** exp) if exp >= 0 else Fraction(man, 2 ** -exp)


def _alpha_power(alphas, beta):
    out = acb(1)
    for a, b in zip(alphas, beta):
        if b:
            out = out * a ** b
    return out


# ------------------------------------------------------------ pole decision


def _groups_at(sp, m: int, eps: float = 1e-6):
    """Pole groups whose enclosure contains -m, plus an ambiguity flag."""
    target = acb(-m)
    window = Window(-m - eps, -m + eps, -eps, eps)
    hits = []
    for bits in balls.precision_schedule(sp.precision_bits):
        sd = spectral_data(sp.spec, bits)
        groups = enumerate_poles(sd, window, merge_tol=0.0)
        hits = [g for g in groups if g.location.contains(target)]
        if not hits:
            return [], False
        if all(float(balls.radius(g.location).upper()) < 2.0 ** (-bits / 2) for g in hits):
            return hits, False
    return hits, True


def negative_integer_pole_status(sp, m: int, eps: float = 1e-6) -> tuple:
    """``(is_pole, ambiguous)`` for s = -m.

    Enumerates the formula poles in a small box around -m and escalates
    precision while an enclosure containing -m is still wide.
    """
    hits, ambiguous = _groups_at(sp, m, eps)
    return bool(hits), ambiguous


def _only_high_order_tuples(groups, m) -> bool:
    # binom(m, k_1) = 0 for k_1 > m, so these tuples carry no residue at -m
    return all(t.k1 > m for g in groups for t in g.tuples)


def is_negative_integer_pole(sp, m: int) -> bool:
    return negative_integer_pole_status(sp, m)[0]


def denominator_ball(alphas, m: int) -> acb:
    """Enclosure of prod_{|beta| = m} (1 - alpha^beta) at the current precision."""
    prod = acb(1)
    for beta in beta_indices(m, len(alphas)):
        prod = prod * (1 - _alpha_power(alphas, beta))
    return prod


def denominator_integer(sp, m: int) -> int:
    """The integer D = prod_{|beta| = m} (1 - alpha^beta), certified by rounding."""
    spec = sp.spec
    radius_seen = None
    for bits in balls.precision_schedule(sp.precision_bits):
        sd = spectral_data(spec, bits)
        with working_precision(bits):
            prod = denominator_ball(sd.alphas, m)
            rad = float(balls.radius(prod).upper())
            radius_seen = rad
            if rad >= 0.5 or not prod.imag.contains(0):
                continue
            value = round(_arb_to_fraction(prod.real))
            if not prod.real.contains(value):
                continue
        if value == 0:
            raise ZeroDenominator(f"-{m} is a pole: the denominator product vanishes")
        return value
    raise NotAnInteger(f"denominator enclosure radius {radius_seen} never dropped below 1/2")


def denominator_radius(sp, m: int, bits: int) -> float:
    sd = spectral_data(sp.spec, bits)
    with working_precision(bits):
        return float(balls.radius(denominator_ball(sd.alphas, m)).upper())


# ---------------------------------------------------------- general route


def shifted_negative_sum(ns: NormalizedSequence, m: int) -> acb:
    """Ball enclosure of the multi-index sum over the shifted tail (prefix excluded)."""
    with working_precision(ns.precision_bits):
        total = acb(0)
        lam = ns.lambdas
        alphas = ns.alphas
        for beta in beta_indices(m, len(alphas)):
            ab = _alpha_power(alphas, beta)
            lb = _alpha_power(lam, beta)
            total += multinomial_coefficient(beta) * lb * ab / (1 - ab)
        return total


def _reconstruct(x: acb, bound: int):
    if not x.imag.contains(0):
        return None
    cand = _arb_to_fraction(x.real).limit_denominator(bound)
    if not x.real.contains(balls.as_arb(cand)):
        return None
    return cand


def phi_negative_integer(ns: NormalizedSequence, m: int) -> RationalValue:
    """Exact phi(-m) via certified evaluation plus rational reconstruction.

    The shifted sum is multiplied by the integer D and the result is matched
    to the closest rational of bounded denominator; uniqueness holds when
    2 * radius * bound^2 < 1. The candidate is re-checked against an
    independent evaluation at doubled precision.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    hits, _ = _groups_at(ns.spectral, m)
    if hits:
        if _only_high_order_tuples(hits, m):
            raise RemovableFormulaPoint(
                f"s = -{m} is a removable point of the formula; the value there is not "
                "given by the terminating sum")
        raise IsPole(f"s = -{m} is a pole of the continuation")
    denom = denominator_integer(ns.spectral, m)
    prefix = sum(a ** m for a in ns.prefix_terms)
    schedule = list(balls.precision_schedule(ns.precision_bits))
    for bits in schedule:
        nsb = ns.at_precision(bits)
        digits = bits * math.log10(2)
        bound = 10 ** max(1, int(digits / 4))
        with working_precision(bits):
            scaled = shifted_negative_sum(nsb, m) * denom
            rad = float(balls.radius(scaled).upper())
            for _ in range(3):
                cand = _reconstruct(scaled, bound)
                if cand is not None:
                    break
                bound = bound * bound
        if cand is None:
            continue
        unique = 2 * rad * float(bound) ** 2 < 1 if bound < 10 ** 150 else False
        if not unique:
            # the enclosure is too wide for the bound to pin the candidate down
            unique = 2 * rad * cand.denominator ** 2 < 1
        check_bits = min(2 * bits, balls.max_precision())
        verified = False
        if check_bits > bits:
            with working_precision(check_bits):
                check = shifted_negative_sum(ns.at_precision(check_bits), m) * denom
                verified = bool(check.real.contains(balls.as_arb(cand)) and check.imag.contains(0))
            if not verified:
                continue
        value = prefix + cand / denom
        return RationalValue.from_fraction(
            value,
            precision_used=bits,
            verified_at_double_precision=verified,
            integer_rounding_radius=denominator_radius(ns.spectral, m, bits),
            unique=bool(unique),
            certified=bool(verified and unique),
        )
    raise ReconstructionFailed(f"no rational reconstruction of phi(-{m}) at the precision cap")


# ------------------------------------------------------ exact quadratic route


class QuadraticElement:
    """u + v*sqrt(d) with rational u, v and a fixed non-square d."""

    __slots__ = ("u", "v", "d")

    def __init__(self, u, v, d):
        self.u = Fraction(u)
        self.v = Fraction(v)
        self.d = d

    def _coerce(self, other):
        if isinstance(other, QuadraticElement):
            return other
        return QuadraticElement(other, 0, self.d)

    def __add__(self, other):
        o = self._coerce(other)
        return QuadraticElement(self.u + o.u, self.v + o.v, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticElement(-self.u, -self.v, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return QuadraticElement(self.u * o.u + self.v * o.v * self.d,
                                self.u * o.v + self.v * o.u, self.d)

    __rmul__ = __mul__

    def inverse(self):
        norm = self.u * self.u - self.v * self.v * self.d
        if norm == 0:
            raise ZeroDivisionError("zero element of the quadratic field")
        return QuadraticElement(self.u / norm, -self.v / norm, self.d)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        out = QuadraticElement(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        return self.u == o.u and self.v == o.v

    def __hash__(self):
        return hash((self.u, self.v, self.d))

    def sign(self) -> int:
        """Sign under the real embedding sqrt(d) > 0 (requires d > 0)."""
        su = (self.u > 0) - (self.u < 0)
        sv = (self.v > 0) - (self.v < 0)
        if sv == 0:
            return su
        if su == 0 or su == sv:
            return sv
        # opposite signs: compare u^2 with v^2 d
        lhs, rhs = self.u * self.u, self.v * self.v * self.d
        return su if lhs > rhs else (-su if lhs < rhs else 0)

    def __repr__(self):
        return f"({self.u} + {self.v}*sqrt({self.d}))"


def _sign(x) -> int:
    if isinstance(x, QuadraticElement):
        return x.sign()
    return (x > 0) - (x < 0)


def _quadratic_roots(b: int, c: int):
    disc = b * b - 4 * c
    if disc == 0:
        raise RepeatedRoots("minimal polynomial has a double root")
    if disc < 0:
        raise HypothesesNotMet("no strictly dominant root: complex conjugate roots")
    root = math.isqrt(disc)
    if root * root == disc:
        plus = Fraction(-b + root, 2)
        minus = Fraction(-b - root, 2)
    else:
        plus = QuadraticElement(Fraction(-b, 2), Fraction(1, 2), disc)
        minus = QuadraticElement(Fraction(-b, 2), Fraction(-1, 2), disc)
    return disc, plus, minus


def _quadratic_setup(spec: RecurrenceSpec):
    poly = minimal_polynomial(spec)
    if poly.degree != 2:
        raise NotQuadratic(f"minimal polynomial {poly} has degree {poly.degree}")
    c, b, _ = poly.coeffs
    if c == 0:
        raise ZeroRoot("minimal polynomial has the root 0")
    disc, plus, minus = _quadratic_roots(b, c)
    if b == 0:
        raise HypothesesNotMet("no strictly dominant root: roots of equal modulus")
    # the root of larger modulus has the sign of -b
    a1, a2 = (plus, minus) if b < 0 else (minus, plus)
    if _sign(a1 - 1) <= 0:
        raise HypothesesNotMet("dominant root is not > 1")
    t1, t2 = generate_terms(spec, 2).terms
    det = a1 * a2 * (a2 - a1)
    lam1 = (t1 * a2 * a2 - t2 * a2) / det
    lam2 = (t2 * a1 - t1 * a1 * a1) / det
    if _sign(lam1) <= 0:
        raise HypothesesNotMet("dominant Binet coefficient is not positive")
    return poly, disc, (a1, a2), (lam1, lam2)


def _is_one(x) -> bool:
    return x == 1


def _quadratic_pole_at(alphas, m: int):
    """None, "pole" (some k_1 <= m) or "removable" (only k_1 > m) for s = -m."""
    a1, a2 = alphas
    for k in range(m + 1):
        if _is_one(a1 ** (m - k) * a2 ** k):
            return "pole"
    # k_1 > m tuples need |alpha_2|^{k} = alpha_1^{k - m}
    la1 = math.log(abs(_to_float(a1)))
    la2 = math.log(abs(_to_float(a2)))
    if la2 > 0 and la1 > la2:
        guess = m * la1 / (la1 - la2)
        for k in range(max(m + 1, math.floor(guess) - 1), math.ceil(guess) + 2):
            if _is_one(a2 ** k / a1 ** (k - m)):
                return "removable"
    return None


def _to_float(x) -> float:
    if isinstance(x, QuadraticElement):
        return float(x.u) + float(x.v) * math.sqrt(x.d)
    return float(x)


def quadratic_exact_value(spec: RecurrenceSpec, m: int) -> RationalValue:
    """phi(-m) for a degree-2 minimal polynomial, computed exactly in Q(sqrt(Delta))."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    _, disc, alphas, lambdas = _quadratic_setup(spec)
    kind = _quadratic_pole_at(alphas, m)
    if kind == "removable":
        raise RemovableFormulaPoint(f"s = -{m} is a removable point of the formula")
    if kind == "pole":
        raise IsPole(f"s = -{m} is a pole of the continuation")
    total = Fraction(0) if isinstance(alphas[0], Fraction) else QuadraticElement(0, 0, disc)
    for beta in beta_indices(m, 2):
        ab = alphas[0] ** beta[0] * alphas[1] ** beta[1]
        lb = lambdas[0] ** beta[0] * lambdas[1] ** beta[1]
        total = total + multinomial_coefficient(beta) * lb * ab / (1 - ab)
    if isinstance(total, QuadraticElement):
        if total.v != 0:
            raise NonRationalResult(f"sqrt({disc}) component {total.v} does not vanish")
        total = total.u
    return RationalValue.from_fraction(Fraction(total), exact=True, certified=True,
                                       discriminant=disc)
