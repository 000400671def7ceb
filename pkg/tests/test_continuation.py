import pytest
from flint import acb, arb
from hypothesis import given, strategies as st

from recurzeta import balls
from recurzeta.balls import working_precision
from recurzeta.continuation import EvalParams, lambda_term, phi_continued, phi_direct
from recurzeta.errors import DivergentRegion, PoleProximity, TruncationFailure
from recurzeta.lrs_core import RecurrenceSpec, builtin_sequence
from recurzeta.spectral import normalize, spectral_data

FIB = builtin_sequence("fibonacci")
TRIB = builtin_sequence("tribonacci")
TWO_THREE = RecurrenceSpec(2, (-6, 5), (5, 13))
FIXTURES = [FIB, TRIB, builtin_sequence("nbonacci(4)"), TWO_THREE]

# sum_{n <= 200} 1/F_n^2 from a 40-digit mpmath summation
FIB_S2_200 = "2.42632075116724118774156941292662037432"

re_pos = st.floats(min_value=0.5, max_value=4.0)
im_any = st.floats(min_value=-10.0, max_value=10.0)
re_any = st.floats(min_value=-6.0, max_value=4.0)


def test_geometric_direct():
    ns = normalize(builtin_sequence("geometric(1,2)"))
    val = phi_direct(ns, 2)
    assert val.overlaps(acb(arb(1) / 3))
    assert float(balls.radius(val).upper()) <= 1e-12


def test_fibonacci_direct_fixture():
    ns = normalize(FIB, 256)
    val = phi_direct(ns, 2, terms=200)
    with working_precision(256):
        assert abs(val.real - arb(FIB_S2_200)) < arb("1e-38")
        assert val.imag.contains(0)


def test_two_precisions_overlap():
    a = phi_direct(normalize(TWO_THREE, 128), 1)
    b = phi_direct(normalize(TWO_THREE, 256), 1, target_radius=1e-20)
    assert a.overlaps(b)
    assert float(balls.radius(b).upper()) <= 1e-20


def test_direct_rejects_left_half_plane():
    ns = normalize(FIB)
    with pytest.raises(DivergentRegion):
        phi_direct(ns, -1)
    with pytest.raises(DivergentRegion):
        phi_direct(ns, 0.1)


def test_lambda_term_examples():
    sd = spectral_data(FIB)
    assert lambda_term(sd, 0, (0,)).overlaps(acb(1))
    with working_precision(128):
        assert lambda_term(sd, -1, (1,)).overlaps(acb(-1 / arb(5).sqrt()))
    assert lambda_term(sd, -1, (2,)).is_zero()
    ns = normalize(FIB)
    with working_precision(128):
        expected = (-2 * ns.lambdas[0].real.log()).exp()
    assert lambda_term(ns, 2, (0,)).overlaps(acb(expected))


@pytest.mark.parametrize("s", [2, 0.7 + 5j, -3.3 + 2j, -7.5 + 9.9j])
def test_geometric_closed_form(s):
    ns = normalize(builtin_sequence("geometric(1,2)"))
    val = phi_continued(ns, s)
    with working_precision(128):
        w = (-balls.as_acb(s) * arb(2).log()).exp()
        assert val.overlaps(w / (1 - w))


@given(st.integers(min_value=1, max_value=5), st.integers(min_value=2, max_value=5), re_any, im_any)
def test_scaled_geometric_closed_form(c, b, re, im):
    ns = normalize(builtin_sequence(f"geometric({c},{b})"))
    s = complex(re, im)
    try:
        val = phi_continued(ns, s)
    except PoleProximity:
        return
    with working_precision(128):
        z = balls.as_acb(s)
        w = (-z * arb(b).log()).exp()
        closed = (-z * arb(c).log()).exp() * w / (1 - w)
    assert val.overlaps(closed)


@pytest.mark.parametrize("spec", FIXTURES, ids=lambda s: s.label or "2^n+3^n")
@given(re=re_pos, im=im_any)
def test_direct_and_continued_agree(spec, re, im):
    ns = normalize(spec)
    s = complex(re, im)
    cont = phi_continued(ns, s)
    assert cont.overlaps(phi_direct(ns, s))
    assert float(balls.radius(cont).upper()) <= 1e-12


@pytest.mark.parametrize("spec", FIXTURES, ids=lambda s: s.label or "2^n+3^n")
@given(re=re_any, im=im_any)
def test_reflection(spec, re, im):
    ns = normalize(spec)
    s = complex(re, im)
    try:
        val = phi_continued(ns, s)
    except PoleProximity:
        return
    assert phi_continued(ns, s.conjugate()).overlaps(val.conjugate())


@given(re=re_any, im=im_any)
def test_precision_refinement(re, im):
    s = complex(re, im)
    try:
        lo = phi_continued(normalize(TRIB, 128), s)
    except PoleProximity:
        return
    hi = phi_continued(normalize(TRIB, 256), s, EvalParams(precision_bits=256, target_radius=1e-30))
    assert lo.overlaps(hi)
    assert float(balls.radius(hi).upper()) <= 1e-30


@pytest.mark.parametrize("s", [2.5, -1.5 + 3j, -4.2 - 7j])
def test_truncation_neighbours_overlap(s):
    ns = normalize(FIB)
    from recurzeta.continuation import _reshift_for_speed, _truncation
    k, _ = _truncation(_reshift_for_speed(ns, EvalParams()), balls.as_acb(s), EvalParams())
    a = phi_continued(ns, s, EvalParams(k_min=k))
    b = phi_continued(ns, s, EvalParams(k_min=k + 5))
    assert a.overlaps(b)


@pytest.mark.parametrize("spec", FIXTURES, ids=lambda s: s.label or "2^n+3^n")
def test_prefix_split_does_not_matter(spec):
    ns = normalize(spec)
    forced = normalize(spec, min_shift=ns.shift_n0 + 3)
    assert forced.shift_n0 == ns.shift_n0 + 3
    for s in (1.5 + 2j, -2.7 + 4.4j):
        assert phi_continued(ns, s).overlaps(phi_continued(forced, s))


def test_pole_guard():
    ns = normalize(FIB)
    with pytest.raises(PoleProximity):
        phi_continued(ns, 1e-9)
    with pytest.raises(PoleProximity):
        phi_continued(ns, -4 + 1e-8)
    phi_continued(ns, 1e-3)


def test_truncation_failure():
    ns = normalize(TRIB)
    with pytest.raises(TruncationFailure):
        phi_continued(ns, -20 + 1j, EvalParams(k_max=2))


def test_eval_params_validation():
    with pytest.raises(ValueError):
        EvalParams(target_radius=0)


def test_vanishing_prefix_terms_are_skipped():
    spec = RecurrenceSpec(2, (-3, 8), (0, 7))
    ns = normalize(spec)
    assert 0 in ns.prefix_terms
    for s in (1.2 + 0.5j, 3.0):
        assert phi_continued(ns, s).overlaps(phi_direct(ns, s))
