"""Ball-arithmetic helpers.

Every analytic quantity in the package is a :class:`flint.acb` ball
(midpoint + radius, rounding tracked by Arb), which plays the role of a
certified complex enclosure. This module holds the small amount of glue
around it: working-precision control, the precision escalation schedule,
conversions and JSON serialization.
"""

from __future__ import annotations

import contextlib
import os
from fractions import Fraction
from typing import Iterator

from flint import acb, arb, ctx

CertifiedComplex = acb

START_PRECISION = 128
DEFAULT_MAX_PRECISION = 8192


def max_precision() -> int:
    """Escalation cap, overridable through ``RECURZETA_MAX_PRECISION``."""
    raw = os.environ.get("RECURZETA_MAX_PRECISION")
    if not raw:
        return DEFAULT_MAX_PRECISION
    try:
        value = int(raw)
    except ValueError:
        return DEFAULT_MAX_PRECISION
    return max(64, value)


def precision_schedule(start: int = START_PRECISION) -> Iterator[int]:
    """Doubling sequence ``start, 2*start, ...`` capped at :func:`max_precision`."""
    cap = max_precision()
    bits = max(32, start)
    if bits > cap:
        yield cap
        return
    while bits <= cap:
        yield bits
        bits *= 2


@contextlib.contextmanager
def working_precision(bits: int):
    old = ctx.prec
    ctx.prec = int(bits)
    try:
        yield
    finally:
        ctx.prec = old


def as_acb(value) -> acb:
    """Convert ints, floats, complex numbers, Fractions, strings or balls to ``acb``."""
    if isinstance(value, acb):
        return value
    if isinstance(value, arb):
        return acb(value)
    if isinstance(value, Fraction):
        return acb(arb(value.numerator) / value.denominator)
    if isinstance(value, complex):
        return acb(value.real, value.imag)
    if isinstance(value, (tuple, list)) and len(value) == 2:
        return acb(as_arb(value[0]), as_arb(value[1]))
    return acb(value)


def as_arb(value) -> arb:
    if isinstance(value, arb):
        return value
    if isinstance(value, Fraction):
        return arb(value.numerator) / value.denominator
    return arb(value)


def radius(z) -> arb:
    """Upper bound for the radius of the disc enclosing the box ``z``."""
    if isinstance(z, arb):
        return arb(z.rad())
    return arb(z.real.rad()) + arb(z.imag.rad())


def upper(x: arb) -> float:
    return float(x.upper())


def lower(x: arb) -> float:
    return float(x.lower())


def is_real(z: acb) -> bool:
    return z.imag.is_zero()


def certainly_positive(x: arb) -> bool:
    return bool(x > 0)


def certainly_negative(x: arb) -> bool:
    return bool(x < 0)


def overlaps(a, b) -> bool:
    return bool(as_acb(a).overlaps(as_acb(b)))


def contains(ball, value) -> bool:
    return bool(as_acb(ball).contains(as_acb(value)))


def to_complex(z) -> complex:
    z = as_acb(z)
    return complex(float(z.real.mid()), float(z.imag.mid()))


def _decimal(x: arb, digits: int) -> str:
    if x.is_zero():
        return "0"
    return x.mid().str(digits, radius=False)


def enclosure_dict(z, digits: int = 30) -> dict:
    """Serialize a ball as ``{"mid_re", "mid_im", "radius"}`` decimal strings."""
    z = as_acb(z)
    rad = radius(z)
    return {
        "mid_re": _decimal(z.real, digits),
        "mid_im": _decimal(z.imag, digits),
        "radius": arb(rad.upper()).mid().str(5, radius=False) if not rad.is_zero() else "0",
    }


def real_dict(x, digits: int = 30) -> dict:
    x = as_arb(x) if not isinstance(x, acb) else x.real
    return {"mid": _decimal(x, digits), "radius": _decimal(arb(x.rad()), 5)}


def from_dict(d: dict) -> acb:
    re = arb(d["mid_re"], d.get("radius", 0) or 0)
    im = arb(d["mid_im"], d.get("radius", 0) or 0)
    return acb(re, im)
