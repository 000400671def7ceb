import itertools
import math
from fractions import Fraction

import pytest
from flint import acb
from hypothesis import given, strategies as st

from recurzeta import balls
from recurzeta.balls import working_precision
from recurzeta.continuation import phi_continued
from recurzeta.errors import IsPole, NotQuadratic, RemovableFormulaPoint, ZeroDenominator
from recurzeta.lrs_core import RecurrenceSpec, builtin_sequence
from recurzeta.spectral import normalize, spectral_data
from recurzeta.special_values import (
    QuadraticElement,
    RationalValue,
    beta_indices,
    denominator_ball,
    denominator_integer,
    is_negative_integer_pole,
    multinomial_coefficient,
    negative_integer_pole_status,
    phi_negative_integer,
    quadratic_exact_value,
)

from strategies import admissible_quadratics

FIB = builtin_sequence("fibonacci")
LUCAS = builtin_sequence("lucas")
TRIB = builtin_sequence("tribonacci")
GEO = builtin_sequence("geometric(1,2)")
TWO_THREE = RecurrenceSpec(2, (-6, 5), (5, 13))
# P = x^2 - 3x + 1, a_n = F_{2n}
UNIT = RecurrenceSpec(2, (-1, 3), (1, 3))

QUADRATIC_FIXTURES = [FIB, LUCAS, TWO_THREE, UNIT]


def test_beta_indices():
    assert list(beta_indices(2, 2)) == [(2, 0), (1, 1), (0, 2)]
    for m, r in itertools.product(range(5), range(1, 5)):
        betas = list(beta_indices(m, r))
        assert len(betas) == math.comb(m + r - 1, r - 1)
        assert all(sum(b) == m for b in betas)
    assert multinomial_coefficient((2, 1, 1)) == 12


def test_pole_decision():
    assert not is_negative_integer_pole(spectral_data(FIB), 1)
    assert is_negative_integer_pole(spectral_data(FIB), 4)
    assert not any(is_negative_integer_pole(spectral_data(GEO), m) for m in range(1, 8))
    sd = spectral_data(UNIT)
    assert [is_negative_integer_pole(sd, m) for m in range(1, 5)] == [False, True, False, True]
    assert negative_integer_pole_status(sd, 2) == (True, False)
    assert [m for m in range(1, 7) if is_negative_integer_pole(spectral_data(TRIB), m)] == [3, 6]


@pytest.mark.parametrize("spec, m, expected", [
    (GEO, 1, -1), (FIB, 1, -1), (TWO_THREE, 1, 2), (GEO, 3, -7),
])
def test_denominator_examples(spec, m, expected):
    assert denominator_integer(spectral_data(spec), m) == expected


def test_denominator_at_pole():
    with pytest.raises(ZeroDenominator):
        denominator_integer(spectral_data(FIB), 4)


@pytest.mark.parametrize("spec", [FIB, TRIB, builtin_sequence("nbonacci(4)"), TWO_THREE])
def test_denominator_symmetric_under_root_order(spec):
    sd = spectral_data(spec, 256)
    for m in (1, 2, 5):
        if is_negative_integer_pole(sd, m):
            continue
        with working_precision(256):
            values = {round(balls.to_complex(denominator_ball(perm, m)).real)
                      for perm in itertools.permutations(sd.alphas)}
        assert values == {denominator_integer(sd, m)}


@pytest.mark.parametrize("spec, m, expected", [
    (GEO, 1, Fraction(-2)),
    (GEO, 2, Fraction(-4, 3)),
    (GEO, 3, Fraction(-8, 7)),
    (TWO_THREE, 1, Fraction(-7, 2)),
    (FIB, 1, Fraction(-1)),
    (LUCAS, 1, Fraction(-3)),
])
def test_values(spec, m, expected):
    v = phi_negative_integer(normalize(spec), m)
    assert v.as_fraction() == expected
    assert v.certified and v.certification["verified_at_double_precision"]


def test_lucas_fixture_from_oracle():
    # frozen from the exact quadratic-field computation
    assert [quadratic_exact_value(LUCAS, m).as_fraction() for m in (1, 2, 3, 5)] == \
        [Fraction(-3), Fraction(-2), Fraction(3, 2), Fraction(-741, 22)]
    assert quadratic_exact_value(FIB, 1).as_fraction() == -1
    assert quadratic_exact_value(TWO_THREE, 1).as_fraction() == Fraction(-7, 2)


@pytest.mark.parametrize("spec", QUADRATIC_FIXTURES, ids=str)
def test_oracle_agreement(spec):
    ns = normalize(spec)
    for m in range(1, 6):
        if is_negative_integer_pole(ns.spectral, m):
            with pytest.raises(IsPole):
                quadratic_exact_value(spec, m)
            with pytest.raises(IsPole):
                phi_negative_integer(ns, m)
            continue
        assert phi_negative_integer(ns, m) == quadratic_exact_value(spec, m)


@pytest.mark.parametrize("spec", [FIB, LUCAS, TRIB, TWO_THREE, builtin_sequence("nbonacci(4)")],
                         ids=str)
def test_reproducible_at_double_precision_and_shift(spec):
    ns = normalize(spec)
    ns2 = normalize(spec, 256)
    shifted = normalize(spec, min_shift=ns.shift_n0 + 3)
    for m in range(1, 6):
        if is_negative_integer_pole(ns.spectral, m):
            continue
        v = phi_negative_integer(ns, m)
        assert v == phi_negative_integer(ns2, m)
        assert v == phi_negative_integer(shifted, m)
        with working_precision(256):
            assert shifted_matches(ns2, m, v)


def shifted_matches(ns, m, v):
    from recurzeta.special_values import shifted_negative_sum
    prefix = sum(a ** m for a in ns.prefix_terms)
    tail = v.as_fraction() - prefix
    return shifted_negative_sum(ns, m).overlaps(balls.as_acb(tail))


@pytest.mark.parametrize("spec, m", [(FIB, 1), (FIB, 3), (TRIB, 2), (TWO_THREE, 2)], ids=str)
def test_continuity_smoke(spec, m):
    ns = normalize(spec)
    v = float(phi_negative_integer(ns, m).as_fraction())
    h = 1e-6
    near = balls.to_complex(phi_continued(ns, -m + h))
    slope = abs(balls.to_complex(phi_continued(ns, -m + 2 * h)) - near) / h
    assert abs(near - v) <= 100 * h * max(1.0, slope)


def test_quadratic_errors():
    with pytest.raises(NotQuadratic):
        quadratic_exact_value(TRIB, 1)
    with pytest.raises(NotQuadratic):
        quadratic_exact_value(GEO, 1)
    with pytest.raises(IsPole):
        quadratic_exact_value(FIB, 4)


@given(admissible_quadratics(), st.integers(min_value=1, max_value=4))
def test_random_quadratic_agreement(spec, m):
    try:
        exact = quadratic_exact_value(spec, m)
    except IsPole:
        assert is_negative_integer_pole(spectral_data(spec), m)
        return
    assert phi_negative_integer(normalize(spec), m) == exact


def test_rational_value_normalization():
    v = RationalValue(2, -4)
    assert (v.numerator, v.denominator) == (-1, 2)
    assert v.to_dict() == {"num": "-1", "den": "2", "certified": False}
    assert str(RationalValue(6, 3)) == "2"


fractions = st.fractions(max_denominator=50).filter(lambda f: abs(f.numerator) < 1000)


@given(fractions, fractions, fractions, fractions, st.sampled_from([2, 3, 5, 13]))
def test_quadratic_field_arithmetic(u1, v1, u2, v2, d):
    x, y = QuadraticElement(u1, v1, d), QuadraticElement(u2, v2, d)
    val = lambda e: float(e.u) + float(e.v) * math.sqrt(d)
    for got, want in ((x + y, val(x) + val(y)), (x - y, val(x) - val(y)), (x * y, val(x) * val(y))):
        assert math.isclose(val(got), want, rel_tol=1e-9, abs_tol=1e-9)
    if y.u or y.v:
        assert (x / y) * y == x
        assert (x * y).sign() == x.sign() * y.sign()
    assert x ** 3 == x * x * x


def test_removable_formula_point():
    # a_n = 4^n + 2^n: the k_1 = 2m tuple sits exactly at -m with zero residue, and the
    # continuation there picks up a transcendental limit, so no rational value exists
    spec = RecurrenceSpec(2, (-8, 6), (6, 20))
    ns = normalize(spec)
    assert is_negative_integer_pole(ns.spectral, 1)
    with pytest.raises(RemovableFormulaPoint):
        phi_negative_integer(ns, 1)
    with pytest.raises(RemovableFormulaPoint):
        quadratic_exact_value(spec, 1)
    near = balls.to_complex(phi_continued(ns, -1 + 1e-6)).real
    assert abs(near - (-10 / 3 - 1 / (2 * math.log(4)))) < 1e-4
