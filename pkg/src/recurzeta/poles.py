"""Pole lattice, residues and pole maps.

A pole is indexed by an integer ``n`` and a descending multi-index
``k = (k_1 >= k_2 >= ... >= k_{r-1} >= 0)``. Writing e_i = k_{i-1} - k_i
(i = 2..r-1) and e_r = k_{r-1}, the location is

    s = (log|u_k| + i (arg u_k + 2 pi n)) / log alpha_1,
    u_k = alpha_1^{-k_1} alpha_2^{e_2} ... alpha_r^{e_r}.

``arg u_k`` is taken as sum_i e_i * Arg(alpha_i) with no reduction mod 2 pi;
the n parameter absorbs the difference, so only the labelling of points
depends on this convention, never the point set.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator, Sequence

from flint import acb, arb

from . import balls
from .balls import working_precision
from .errors import UnsupportedFormat, ValidationError, WindowTooLarge


class Classification(str, enum.Enum):
    SIMPLE_POLE = "SimplePole"
    REMOVABLE_CANDIDATE = "RemovableCandidate"


@dataclass(frozen=True)
class PoleTuple:
    n: int
    k: tuple = ()

    def __post_init__(self):
        k = tuple(int(v) for v in self.k)
        object.__setattr__(self, "k", k)
        if k and k[0] < 0:
            raise ValidationError("k_1 must be >= 0")
        for a, b in zip(k, k[1:]):
            if not 0 <= b <= a:
                raise ValidationError(f"multi-index {k} is not descending")

    @property
    def k1(self) -> int:
        return self.k[0] if self.k else 0


@dataclass(frozen=True)
class Window:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        vals = (self.re_min, self.re_max, self.im_min, self.im_max)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError("window bounds must be finite")
        if self.re_min > self.re_max or self.im_min > self.im_max:
            raise ValidationError("window bounds are inverted")

    def meets(self, z: acb) -> bool:
        re, im = z.real, z.imag
        return bool(re.upper() >= self.re_min and re.lower() <= self.re_max
                    and im.upper() >= self.im_min and im.lower() <= self.im_max)


@dataclass(eq=False)
class PoleGroup:
    location: acb
    tuples: list
    residue: acb = None
    classification: Classification = None

    def to_dict(self) -> dict:
        return {
            "location": balls.enclosure_dict(self.location),
            "tuples": [{"n": t.n, "k": list(t.k)} for t in self.tuples],
            "residue": None if self.residue is None else balls.enclosure_dict(self.residue),
            "classification": None if self.classification is None else self.classification.value,
        }


def multi_indices(k1: int, r: int) -> Iterator[tuple]:
    """Descending multi-indices of length r-1 with first entry k1, lexicographic."""
    if r <= 1:
        if k1 == 0:
            yield ()
        return

    def rec(prev, depth):
        if depth == 0:
            yield ()
            return
        for k in range(prev + 1):
            for rest in rec(k, depth - 1):
                yield (k,) + rest

    for rest in rec(k1, r - 2):
        yield (k1,) + rest


def exponents(k: Sequence[int], r: int) -> tuple:
    """Powers (e_2, ..., e_r) of alpha_2..alpha_r attached to the multi-index k."""
    if r <= 1:
        return ()
    ks = tuple(k) + (0,)
    return tuple(ks[i] - ks[i + 1] for i in range(r - 1))


def multinomial(k: Sequence[int]) -> int:
    out = 1
    for a, b in zip(k, k[1:]):
        out *= comb(a, b)
    return out


class _Geometry:
    """Per-precision constants shared by location and residue computations."""

    def __init__(self, alphas, lambdas=None):
        self.alphas = alphas
        self.r = len(alphas)
        self.log_a1 = alphas[0].real.log()
        self.log_mods = [abs(a).log() for a in alphas[1:]]
        self.args = [a.arg() for a in alphas[1:]]
        self.two_pi = 2 * arb.pi()
        if lambdas is not None:
            self.log_l1 = lambdas[0].real.log()
            self.lambdas = lambdas

    def log_mod_arg(self, k):
        k1 = k[0] if k else 0
        es = exponents(k, self.r)
        logmod = -k1 * self.log_a1
        arg = arb(0)
        for e, lm, ar in zip(es, self.log_mods, self.args):
            if e:
                logmod += e * lm
                arg += e * ar
        return logmod, arg

    def location(self, n, k):
        logmod, arg = self.log_mod_arg(k)
        return acb(logmod, arg + n * self.two_pi) / self.log_a1


def pole_location(sp, t: PoleTuple) -> acb:
    """Certified location of the pole with parameters ``t``.

    ``sp`` is a SpectralData or NormalizedSequence whose hypotheses hold.
    """
    with working_precision(sp.precision_bits):
        geo = _Geometry(sp.alphas)
        return geo.location(t.n, t.k)


def real_part_slope(sp) -> arb:
    """Lower bound c > 0 with Re s_{n,k} <= -c k_1."""
    alphas = sp.alphas
    if len(alphas) == 1:
        return arb(math.inf)
    rho = max(abs(a) for a in alphas[1:])
    return 1 - rho.log() / alphas[0].real.log()


def _binom_neg(s: acb, k: int) -> acb:
    """Generalized binomial (-s choose k) as a falling-factorial product."""
    out = acb(1)
    for j in range(k):
        out = out * (-s - j) / (j + 1)
    return out


def lambda_product(lambdas, log_l1, s: acb, k, r) -> acb:
    """Lambda_k(s) = (-s choose k_1) * prod binom(k_{i-1}, k_i) * lambda_1^{-s-k_1} prod lambda_i^{e_i}."""
    k1 = k[0] if k else 0
    es = exponents(k, r)
    val = _binom_neg(s, k1)
    if val.is_zero():
        return val
    val = val * multinomial(k)
    val = val * ((-s - k1) * log_l1).exp()
    for e, lam in zip(es, lambdas[1:]):
        if e:
            val = val * lam ** e
    return val


def residue(sp, g: PoleGroup) -> acb:
    """Sum of Lambda_k(s_0) / log alpha_1 over the tuples of the group.

    Each tuple term is evaluated at that tuple's own location enclosure.
    """
    lambdas = sp.lambdas
    with working_precision(sp.precision_bits):
        geo = _Geometry(sp.alphas, lambdas)
        total = acb(0)
        for t in g.tuples:
            s0 = geo.location(t.n, t.k)
            total += lambda_product(lambdas, geo.log_l1, s0, t.k, geo.r)
        res = total / geo.log_a1
    g.residue = res
    return res


def classify_singularity(g: PoleGroup, zero_tol: float = 0.0) -> Classification:
    """Flag a group as a removable candidate when its residue may vanish.

    A candidate is never asserted removable; this is only a flag.
    """
    res = g.residue
    if res is None:
        raise ValueError("residue has not been computed for this group")
    if res.contains(0) or float(abs(res).upper()) <= zero_tol:
        cls = Classification.REMOVABLE_CANDIDATE
    else:
        cls = Classification.SIMPLE_POLE
    g.classification = cls
    return cls


def _enumerate_tuples(sp, w: Window, max_tuples: int):
    alphas = sp.alphas
    r = len(alphas)
    geo = _Geometry(alphas)
    if r == 1:
        k1_max = 0
    else:
        slope = real_part_slope(sp)
        k1_max = max(0, int(math.floor(-w.re_min / float(slope.lower()))) + 1) if w.re_min < 0 else 0
    found = []
    two_pi = float(geo.two_pi.mid())
    L = float(geo.log_a1.mid())
    for k1 in range(k1_max + 1):
        for k in multi_indices(k1, r):
            logmod, arg = geo.log_mod_arg(k)
            re = logmod / geo.log_a1
            if re.upper() < w.re_min or re.lower() > w.re_max:
                continue
            a = float(arg.mid())
            n_lo = math.floor((w.im_min * L - a) / two_pi) - 1
            n_hi = math.ceil((w.im_max * L - a) / two_pi) + 1
            for n in range(n_lo, n_hi + 1):
                loc = acb(logmod, arg + n * geo.two_pi) / geo.log_a1
                if w.meets(loc):
                    found.append((PoleTuple(n, k), loc))
                    if len(found) > max_tuples:
                        raise WindowTooLarge(
                            f"more than {max_tuples} pole tuples in the window; shrink it "
                            "or raise the cap")
    return found


def _group(found, merge_tol):
    parent = list(range(len(found)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    order = sorted(range(len(found)), key=lambda i: float(found[i][1].real.mid()))
    reach = [float(balls.radius(found[i][1]).upper()) for i in range(len(found))]
    max_reach = max(reach, default=0.0)
    for pos, i in enumerate(order):
        zi = found[i][1]
        re_i = float(zi.real.mid())
        for j in order[pos + 1:]:
            zj = found[j][1]
            if float(zj.real.mid()) - re_i > merge_tol + reach[i] + max_reach:
                break
            close = zi.overlaps(zj) or float(abs(zi - zj).lower()) <= merge_tol
            if close:
                parent[find(j)] = find(i)
    groups = {}
    for i in range(len(found)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def enumerate_poles(sp, w: Window, merge_tol: float = 1e-9, max_tuples: int = 200_000,
                    zero_tol: float = 0.0) -> list:
    """All pole groups meeting the window, with residues and classifications.

    Completeness: Re s_{n,k} <= -k_1 * (1 - log max_{i>=2}|alpha_i| / log alpha_1),
    so k_1 is bounded by the left edge of the window, and for each k the
    admissible n form a finite range fixed by the vertical extent.
    """
    with working_precision(sp.precision_bits):
        found = _enumerate_tuples(sp, w, max_tuples)
        out = []
        for members in _group(found, merge_tol):
            members.sort(key=lambda i: (found[i][0].k, found[i][0].n))
            loc = found[members[0]][1]
            for i in members[1:]:
                loc = loc.union(found[i][1])
            g = PoleGroup(loc, [found[i][0] for i in members])
            residue(sp, g)
            classify_singularity(g, zero_tol)
            out.append(g)
    out.sort(key=lambda g: (-float(g.location.real.mid()), float(g.location.imag.mid())))
    return out


def residue_numeric_limit(ns, s0, offsets=(1e-3, 1e-4, 1e-5, 1e-6), direction=1.0,
                          target_radius=1e-24):
    """Extrapolate (s - s0) phi(s) to s = s0 from real offsets (Neville scheme).

    Returns ``(estimate, error_estimate)``; the error estimate is the change
    produced by the last extrapolation level.
    """
    from .continuation import EvalParams, phi_continued

    s0 = balls.as_acb(s0).mid()
    params = EvalParams(precision_bits=max(256, ns.precision_bits), target_radius=target_radius,
                        pole_guard=min(offsets) / 10)
    hs = [arb(h) * direction for h in offsets]
    with working_precision(params.precision_bits):
        vals = []
        for h in hs:
            phi = phi_continued(ns, s0 + h, params)
            vals.append((phi * h).mid())
        # Neville table evaluated at h = 0
        table = list(vals)
        prev_best = table[-1]
        for level in range(1, len(hs)):
            for i in range(len(hs) - level):
                hi, hj = hs[i], hs[i + level]
                table[i] = (table[i + 1] * hi - table[i] * hj) / (hi - hj)
            if level == len(hs) - 2:
                prev_best = table[0]
        best = table[0]
        err = float(abs(best - prev_best).upper())
    return best, err


def export_pole_map(groups: Iterable[PoleGroup], fmt: str = "csv", digits: int = 20) -> bytes:
    fmt = fmt.lower()
    groups = list(groups)
    if fmt == "csv":
        return _csv(groups, digits)
    if fmt == "svg":
        return _svg(groups)
    raise UnsupportedFormat(f"unsupported pole map format {fmt!r} (use csv or svg)")


def _csv(groups, digits):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["re", "im", "radius", "residue_re", "residue_im", "classification",
                     "tuple_count"])
    for g in groups:
        loc = balls.enclosure_dict(g.location, digits)
        res = balls.enclosure_dict(g.residue, digits) if g.residue is not None else None
        writer.writerow([
            loc["mid_re"], loc["mid_im"], loc["radius"],
            res["mid_re"] if res else "", res["mid_im"] if res else "",
            g.classification.value if g.classification else "",
            len(g.tuples),
        ])
    return buf.getvalue().encode("utf-8")


def _svg(groups, width=640, height=480, pad=40):
    pts = [(float(g.location.real.mid()), float(g.location.imag.mid()),
            float(abs(g.residue).mid()) if g.residue is not None else 0.0,
            g.classification is Classification.REMOVABLE_CANDIDATE) for g in groups]
    if pts:
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
    else:
        x0 = x1 = y0 = y1 = 0.0
    if x1 - x0 < 1e-12:
        x0, x1 = x0 - 1, x1 + 1
    if y1 - y0 < 1e-12:
        y0, y1 = y0 - 1, y1 + 1
    big = max((p[2] for p in pts), default=1.0) or 1.0

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if x0 <= 0 <= x1:
        out.append(f'<line x1="{sx(0):.2f}" y1="{pad}" x2="{sx(0):.2f}" y2="{height - pad}" '
                   'stroke="#999" stroke-width="0.5"/>')
    if y0 <= 0 <= y1:
        out.append(f'<line x1="{pad}" y1="{sy(0):.2f}" x2="{width - pad}" y2="{sy(0):.2f}" '
                   'stroke="#999" stroke-width="0.5"/>')
    for x, y, mag, removable in pts:
        rad = 2.0 + 6.0 * min(1.0, mag / big) ** 0.5
        fill = "none" if removable else "#1f4e9c"
        out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="{rad:.2f}" fill="{fill}" '
                   f'stroke="#1f4e9c" stroke-width="1"><title>{x:.6g}{y:+.6g}i</title></circle>')
    out.append(f'<text x="{pad}" y="{height - 10}" font-size="11" font-family="monospace">'
               f'Re [{x0:.4g}, {x1:.4g}]  Im [{y0:.4g}, {y1:.4g}]</text>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")
