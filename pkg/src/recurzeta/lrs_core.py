"""Integer linear recurrence sequences: specs, exact term generation and the
minimal polynomial.

Coefficients are stored in ascending power order. A spec with
``coeffs = (c0, ..., c_{d-1})`` encodes

    a_{n+d} = c_{d-1} a_{n+d-1} + ... + c_0 a_n,

whose monic annihilator is ``x^d - c_{d-1} x^{d-1} - ... - c_0``. Terms are
indexed from 1.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InternalInconsistency, UnknownName, ValidationError, ZeroSequence


@dataclass(frozen=True)
class RecurrenceSpec:
    order: int
    coeffs: tuple
    initial: tuple
    label: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if not isinstance(self.order, int) or isinstance(self.order, bool) or self.order < 1:
            raise ValidationError(f"order must be a positive integer, got {self.order!r}")
        object.__setattr__(self, "coeffs", tuple(_as_int(c, "coeffs") for c in self.coeffs))
        object.__setattr__(self, "initial", tuple(_as_int(a, "initial") for a in self.initial))
        if len(self.coeffs) != self.order:
            raise ValidationError(
                f"expected {self.order} coefficients, got {len(self.coeffs)}")
        if len(self.initial) != self.order:
            raise ValidationError(
                f"expected {self.order} initial terms, got {len(self.initial)}")

    @property
    def annihilator(self) -> "IntegerPolynomial":
        """The monic polynomial Q(x) read off the recurrence."""
        return IntegerPolynomial(tuple(-c for c in self.coeffs) + (1,))

    def to_dict(self) -> dict:
        d = {"order": self.order, "coeffs": list(self.coeffs), "initial": list(self.initial)}
        if self.label is not None:
            d["label"] = self.label
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RecurrenceSpec":
        if not isinstance(d, dict):
            raise ValidationError("recurrence spec must be a JSON object")
        missing = [k for k in ("order", "coeffs", "initial") if k not in d]
        if missing:
            raise ValidationError(f"missing field(s): {', '.join(missing)}")
        if not isinstance(d["coeffs"], list) or not isinstance(d["initial"], list):
            raise ValidationError("coeffs and initial must be lists of integers")
        label = d.get("label")
        return cls(d["order"], tuple(d["coeffs"]), tuple(d["initial"]),
                   None if label is None else str(label))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _as_int(value, name):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{name} entries must be integers, got {value!r}")
    return value


@dataclass(frozen=True)
class IntegerPolynomial:
    """Monic integer polynomial, coefficients in ascending power order."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = list(self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(int(c) for c in coeffs))
        if self.coeffs[-1] != 1:
            raise ValidationError(f"polynomial is not monic: {self.coeffs}")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod(self, divisor: "IntegerPolynomial"):
        """Exact division by a monic divisor; returns (quotient, remainder) coefficient tuples."""
        rem = list(self.coeffs)
        dq = divisor.degree
        quot = [0] * max(1, self.degree - dq + 1)
        for i in range(self.degree - dq, -1, -1):
            q = rem[i + dq]
            quot[i] = q
            if q:
                for j, c in enumerate(divisor.coeffs):
                    rem[i + j] -= q * c
        return tuple(quot), tuple(rem[:dq]) if dq else (0,)

    def divides(self, other: "IntegerPolynomial") -> bool:
        if other.degree < self.degree:
            return False
        _, rem = other.divmod(self)
        return all(c == 0 for c in rem)

    def __str__(self) -> str:
        parts = []
        for power in range(self.degree, -1, -1):
            c = self.coeffs[power]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if power == 0:
                body = str(mag)
            else:
                xs = "x" if power == 1 else f"x^{power}"
                body = xs if mag == 1 else f"{mag}*{xs}"
            parts.append((sign, body))
        if not parts:
            return "0"
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


@dataclass(frozen=True)
class SequenceWindow:
    start_index: int
    terms: tuple

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, n: int) -> int:
        """Term a_n by its sequence index."""
        return self.terms[n - self.start_index]


def generate_terms(spec: RecurrenceSpec, count: int) -> SequenceWindow:
    if count < 1:
        raise ValidationError("count must be at least 1")
    d = spec.order
    terms = list(spec.initial[:count])
    while len(terms) < count:
        window = terms[-d:]
        terms.append(sum(c * a for c, a in zip(spec.coeffs, window)))
    return SequenceWindow(1, tuple(terms))


def annihilates(poly_coeffs: Sequence[int], terms: Sequence[int]) -> bool:
    """True if the polynomial (ascending coefficients) annihilates every window of ``terms``."""
    deg = len(poly_coeffs) - 1
    return all(
        sum(c * terms[n + j] for j, c in enumerate(poly_coeffs)) == 0
        for n in range(len(terms) - deg)
    )


def solve_rational(matrix, rhs):
    """Solve ``matrix @ x = rhs`` over Q by Gaussian elimination. Returns None if singular."""
    n = len(matrix)
    aug = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col] * inv
                for c in range(col, n + 1):
                    aug[r][c] -= factor * aug[col][c]
    return [aug[i][n] / aug[i][i] for i in range(n)]


def minimal_polynomial(spec: RecurrenceSpec) -> IntegerPolynomial:
    """Unique monic generator of the annihilator ideal of the sequence.

    For each candidate degree the Hankel system built from the first terms is
    solved over Q; the smallest degree whose solution annihilates 5d terms
    wins. The coefficients are integral by Gauss's lemma, which is asserted.
    """
    d = spec.order
    terms = generate_terms(spec, 5 * d).terms
    if all(t == 0 for t in terms[: 2 * d]):
        raise ZeroSequence("the sequence is identically zero")
    for deg in range(1, d + 1):
        hankel = [[terms[i + j] for j in range(deg)] for i in range(deg)]
        rhs = [terms[i + deg] for i in range(deg)]
        sol = solve_rational(hankel, rhs)
        if sol is None:
            continue
        # x^deg - sum sol_j x^j
        candidate = [-c for c in sol] + [Fraction(1)]
        if not annihilates(candidate, terms):
            continue
        if any(c.denominator != 1 for c in candidate):
            raise InternalInconsistency(f"non-integral minimal polynomial {candidate}")
        poly = IntegerPolynomial(tuple(int(c) for c in candidate))
        if not poly.divides(spec.annihilator):
            raise InternalInconsistency(f"{poly} does not divide {spec.annihilator}")
        return poly
    raise InternalInconsistency("no annihilating polynomial of degree <= order found")


_NBONACCI = re.compile(r"^\s*nbonacci\s*\(\s*(\d+)\s*\)\s*$")
_GEOMETRIC = re.compile(r"^\s*geometric\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*$")

MAX_NBONACCI = 12


def nbonacci(n: int) -> RecurrenceSpec:
    if n < 2 or n > MAX_NBONACCI:
        raise UnknownName(f"nbonacci(N) needs 2 <= N <= {MAX_NBONACCI}, got {n}")
    initial = (1,) + tuple(2 ** k for k in range(n - 1))
    return RecurrenceSpec(n, (1,) * n, initial, f"nbonacci({n})")


def builtin_sequence(name: str) -> RecurrenceSpec:
    """Look up a named sequence.

    Known names: ``fibonacci``, ``lucas``, ``tribonacci``, ``nbonacci(N)`` and
    ``geometric(c,b)`` (a_n = c*b^n).
    """
    key = name.strip().lower()
    if key == "fibonacci":
        return RecurrenceSpec(2, (1, 1), (1, 1), "fibonacci")
    if key == "lucas":
        return RecurrenceSpec(2, (1, 1), (1, 3), "lucas")
    if key == "tribonacci":
        return RecurrenceSpec(3, (1, 1, 1), (1, 1, 2), "tribonacci")
    m = _NBONACCI.match(key)
    if m:
        return nbonacci(int(m.group(1)))
    m = _GEOMETRIC.match(key)
    if m:
        c, b = int(m.group(1)), int(m.group(2))
        return RecurrenceSpec(1, (b,), (c * b,), f"geometric({c},{b})")
    raise UnknownName(f"unknown builtin sequence {name!r}")
