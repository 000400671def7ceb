import csv
import io
import math
import xml.etree.ElementTree as ET
from math import comb

import pytest
from flint import acb, arb
from hypothesis import given, strategies as st

from recurzeta import balls
from recurzeta.acceptance import random_quadratic_specs
from recurzeta.balls import working_precision
from recurzeta.errors import UnsupportedFormat, ValidationError, WindowTooLarge
from recurzeta.lrs_core import RecurrenceSpec, builtin_sequence, minimal_polynomial
from recurzeta.poles import (
    Classification,
    PoleGroup,
    PoleTuple,
    Window,
    classify_singularity,
    enumerate_poles,
    export_pole_map,
    exponents,
    multi_indices,
    pole_location,
    residue,
    residue_numeric_limit,
)
from recurzeta.spectral import normalize

FIB = builtin_sequence("fibonacci")
TRIB = builtin_sequence("tribonacci")
GEO = builtin_sequence("geometric(1,2)")


def _close(z, target, tol=1e-20):
    return float(abs(z - target).upper()) < tol


def test_multi_indices():
    assert list(multi_indices(0, 1)) == [()]
    assert list(multi_indices(1, 1)) == []
    assert list(multi_indices(2, 3)) == [(2, 0), (2, 1), (2, 2)]
    for r in (2, 3, 4, 5):
        for k1 in range(6):
            ks = list(multi_indices(k1, r))
            assert len(ks) == (1 if r == 2 else comb(k1 + r - 2, r - 2))
            assert ks == sorted(ks)
    assert exponents((3, 1), 3) == (2, 1)


def test_pole_tuple_validation():
    with pytest.raises(ValidationError):
        PoleTuple(0, (1, 2))
    with pytest.raises(ValidationError):
        Window(1, 0, 0, 1)


def test_fibonacci_single_pole_near_origin():
    ns = normalize(FIB)
    groups = enumerate_poles(ns, Window(-0.5, 0.5, -1, 1))
    assert len(groups) == 1
    g = groups[0]
    assert g.tuples == [PoleTuple(0, (0,))]
    assert g.location.contains(acb(0))
    with working_precision(128):
        assert g.residue.overlaps(acb(1 / ((1 + arb(5).sqrt()) / 2).log()))
    assert abs(balls.to_complex(g.residue) - 2.0780869212350) < 1e-12
    assert g.classification is Classification.SIMPLE_POLE


def test_geometric_poles():
    groups = enumerate_poles(normalize(GEO), Window(-0.1, 0.1, -10, 10))
    assert [t.n for g in groups for t in g.tuples] == [-1, 0, 1]
    with working_precision(128):
        log2 = arb(2).log()
        for g in groups:
            n = g.tuples[0].n
            assert g.location.overlaps(acb(0, 2 * arb.pi() * n / log2))
            assert g.residue.overlaps(acb(1 / log2))
            assert g.classification is Classification.SIMPLE_POLE


def test_tribonacci_imaginary_axis():
    ns = normalize(TRIB)
    groups = enumerate_poles(ns, Window(-0.1, 0.1, 0, 40))
    assert groups
    with working_precision(128):
        log_a = ns.alphas[0].real.log()
        for g in groups:
            assert len(g.tuples) == 1
            t = g.tuples[0]
            assert t.k == (0, 0)
            assert g.location.overlaps(acb(0, 2 * arb.pi() * t.n / log_a))


@pytest.mark.parametrize("n, k", [(0, 0), (1, 1), (-3, 2), (5, 3), (-1, 4)])
def test_fibonacci_pole_formula(n, k):
    ns = normalize(FIB)
    z = pole_location(ns, PoleTuple(n, (k,)))
    with working_precision(128):
        log_phi = ((1 + arb(5).sqrt()) / 2).log()
        expected = acb(-2 * k, (k * arb.pi() + 2 * arb.pi() * n) / log_phi)
    assert _close(z, expected)


@pytest.mark.parametrize("spec", random_quadratic_specs(5, seed=7), ids=lambda s: str(s.coeffs))
def test_quadratic_real_parts(spec):
    ns = normalize(spec)
    norm = abs(minimal_polynomial(spec).coeffs[0])
    a1 = balls.to_complex(ns.alphas[0]).real
    for k in range(5):
        z = pole_location(ns, PoleTuple(0, (k,)))
        expected = -k * (2 - math.log(norm) / math.log(a1))
        assert abs(balls.to_complex(z).real - expected) < 1e-12


def _brute_force(ns, w, k_extra=2, n_extra=2):
    """Every tuple location inside ``w`` for generous index ranges."""
    from recurzeta.poles import _Geometry
    r = len(ns.alphas)
    geo = _Geometry(ns.alphas)
    c = 1 - math.log(max(abs(balls.to_complex(a)) for a in ns.alphas[1:])) / math.log(
        balls.to_complex(ns.alphas[0]).real) if r > 1 else 1
    k_hi = int(-w.re_min / c) + 1 + k_extra if r > 1 else 0
    log_a = math.log(balls.to_complex(ns.alphas[0]).real)
    hits = []
    for k1 in range(k_hi + 1):
        for k in multi_indices(k1, r):
            arg_span = abs(float(geo.log_mod_arg(k)[1].mid()))
            n_hi = int((max(abs(w.im_min), abs(w.im_max)) * log_a + arg_span) / (2 * math.pi)) + 1 + n_extra
            for n in range(-n_hi, n_hi + 1):
                z = geo.location(n, k)
                if w.re_min <= float(z.real.mid()) <= w.re_max and w.im_min <= float(z.imag.mid()) <= w.im_max:
                    hits.append((PoleTuple(n, k), z))
    return hits


@pytest.mark.parametrize("spec, w", [
    (FIB, Window(-8.5, 0.5, -20, 20)),
    (TRIB, Window(-3.2, 0.5, 0, 30)),
    (builtin_sequence("nbonacci(4)"), Window(-2.0, 0.2, -15, 15)),
    (RecurrenceSpec(2, (-6, 5), (5, 13)), Window(-3, 0.1, -20, 20)),
])
def test_enumeration_complete(spec, w):
    ns = normalize(spec)
    groups = enumerate_poles(ns, w)
    listed = [t for g in groups for t in g.tuples]
    # grouping partitions the tuple set
    assert len(listed) == len(set(listed))
    with working_precision(ns.precision_bits):
        for t, z in _brute_force(ns, w):
            assert t in listed, t
            assert any(g.location.overlaps(z) for g in groups if t in g.tuples)


def test_window_cap():
    with pytest.raises(WindowTooLarge):
        enumerate_poles(normalize(TRIB), Window(-30, 0.5, -500, 500), max_tuples=1000)


@pytest.mark.parametrize("spec, pick", [
    (FIB, [(0, (0,)), (1, (0,)), (-1, (1,))]),
    (TRIB, [(0, (0, 0)), (1, (0, 0)), (0, (1, 1))]),
    (GEO, [(0, ()), (2, ()), (-1, ())]),
])
def test_residue_numeric_limit(spec, pick):
    ns = normalize(spec)
    for n, k in pick:
        t = PoleTuple(n, k)
        z = pole_location(ns, t)
        g = PoleGroup(z, [t])
        res = residue(ns, g)
        est, err = residue_numeric_limit(ns, z)
        assert abs(balls.to_complex(est) - balls.to_complex(res)) <= max(err, 1e-12) * 10
        assert err < 1e-9


def test_synthetic_removable_candidate():
    with working_precision(128):
        r = acb("1.25", "-0.5")
        g = PoleGroup(acb(-3), [PoleTuple(0, (1,)), PoleTuple(1, (1,))], residue=r + (-r))
    assert classify_singularity(g) is Classification.REMOVABLE_CANDIDATE
    g2 = PoleGroup(acb(0), [PoleTuple(0, (0,))], residue=acb(1e-30))
    assert classify_singularity(g2) is Classification.SIMPLE_POLE
    assert classify_singularity(g2, zero_tol=1e-20) is Classification.REMOVABLE_CANDIDATE


def test_export_csv():
    assert export_pole_map([], "csv").decode() == \
        "re,im,radius,residue_re,residue_im,classification,tuple_count\n"
    groups = enumerate_poles(normalize(FIB), Window(-8.5, 0.5, -20, 20))
    rows = list(csv.DictReader(io.StringIO(export_pole_map(groups, "csv").decode())))
    assert len(rows) == len(groups)
    for row in rows:
        re = float(row["re"])
        assert min(abs(re - v) for v in (0, -2, -4, -6, -8)) <= float(row["radius"]) + 1e-15


def test_export_svg():
    groups = enumerate_poles(normalize(TRIB), Window(-6.2, 0.5, -20, 20))
    root = ET.fromstring(export_pole_map(groups, "svg"))
    assert root.tag.endswith("svg")
    circles = [e for e in root.iter() if e.tag.endswith("circle")]
    assert len(circles) == len(groups)
    # the real parts sit on the columns Re = -(3/2) k
    res = sorted({round(balls.to_complex(g.location).real, 9) for g in groups})
    assert all(abs(x / 1.5 - round(x / 1.5)) < 1e-9 for x in res)
    with pytest.raises(UnsupportedFormat):
        export_pole_map(groups, "png")


@given(st.integers(min_value=-50, max_value=50), st.integers(min_value=0, max_value=6))
def test_fibonacci_lattice_property(n, k):
    z = balls.to_complex(pole_location(normalize(FIB), PoleTuple(n, (k,))))
    assert abs(z.real + 2 * k) < 1e-12


@pytest.mark.parametrize("name", ["fibonacci", "tribonacci", "nbonacci(4)"])
def test_residues_do_not_depend_on_shift(name):
    from recurzeta.spectral import spectral_data
    w = Window(-3.2, 0.5, -10, 10)
    plain = enumerate_poles(spectral_data(builtin_sequence(name)), w)
    shifted = enumerate_poles(normalize(builtin_sequence(name), min_shift=3), w)
    assert [g.tuples for g in plain] == [g.tuples for g in shifted]
    assert all(a.residue.overlaps(b.residue) for a, b in zip(plain, shifted))
