"""Evaluation of phi(s) = sum_{n>=1} a_n^{-s}.

Two independent routes:

* :func:`phi_direct` sums the Dirichlet series itself (Re s > 0) and bounds
  the tail through a_{n0+m} >= lambda'_1 (1 - q_1) alpha_1^m.
* :func:`phi_continued` sums the continued multi-index series

      sum_k Lambda_k(s) w_k / (1 - w_k),
      w_k = alpha_1^{-s-k_1} alpha_2^{e_2} ... alpha_r^{e_r},

  over the shifted tail, plus the exact prefix a_1..a_{n0}. It is valid for
  every s off the pole set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from flint import acb, arb

from . import balls
from .balls import working_precision
from .errors import (
    DivergentRegion,
    HypothesesNotMet,
    PoleProximity,
    PrecisionExhausted,
    TruncationFailure,
)
from .poles import _Geometry, exponents, multi_indices, multinomial
from .spectral import NormalizedSequence
from .lrs_core import generate_terms


@dataclass(frozen=True)
class EvalParams:
    precision_bits: int = 128
    k_max: int = 4000
    target_radius: float = 1e-12
    pole_guard: float = 1e-6
    # the tail is re-shifted until its q-ratio is at most this (bounded by max_extra_shift)
    reshift_q: float = 1 / 16
    max_extra_shift: int = 256
    # truncate no earlier than this order (used to compare neighbouring truncations)
    k_min: int = 0

    def __post_init__(self):
        for name in ("precision_bits", "k_max", "target_radius", "pole_guard", "reshift_q"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def _principal_power(a: int, s: acb) -> acb:
    """a^{-s} with the principal branch of log a (a may be negative)."""
    return (-s * acb(a).log()).exp()


def _prefix_sum(terms, s):
    # vanishing terms are left out of the series
    total = acb(0)
    for a in terms:
        if a:
            total += _principal_power(a, s)
    return total


def _direct_once(ns, s, terms, margin, target_radius):
    sigma = s.real.lower()
    a1 = ns.alphas[0].real
    lam1 = ns.lambdas[0].real
    c = lam1 * (1 - ns.q_ball)
    if not c > 0:
        raise HypothesesNotMet("cannot bound the tail from below")
    decay = a1 ** (-sigma)
    if not decay < 1:
        raise DivergentRegion("Re(s) too small for a certified tail bound")
    front = c ** (-sigma) / (1 - decay)
    if terms is None:
        need = math.log(float(front.upper()) * 4 / target_radius) / (float(sigma.mid()) * float(a1.log().mid()))
        m_count = max(1, int(math.ceil(need)))
    else:
        m_count = max(0, terms - ns.shift_n0)
    tail = front * decay ** (m_count + 1)
    n_total = ns.shift_n0 + m_count
    seq = generate_terms(ns.spec, max(n_total, 1)).terms[:n_total]
    total = _prefix_sum(seq, s)
    tail_up = tail.upper()
    return total + acb(arb(0, tail_up), arb(0, tail_up))


def phi_direct(ns: NormalizedSequence, s, terms: int | None = None, margin: float = 0.25,
               target_radius: float = 1e-12, precision_bits: int | None = None) -> acb:
    """Partial sum of the Dirichlet series with a certified tail radius.

    With ``terms=None`` enough terms are taken to push the tail below a quarter
    of ``target_radius``; precision is escalated until the total radius meets
    the target.
    """
    s = balls.as_acb(s)
    if not s.real > 0:
        raise DivergentRegion("the Dirichlet series only converges for Re(s) > 0")
    if float(s.real.lower()) < margin:
        raise DivergentRegion(f"Re(s) is below the margin {margin}")
    start = precision_bits or ns.precision_bits
    best = None
    for bits in balls.precision_schedule(start):
        nsb = ns.at_precision(bits)
        with working_precision(bits):
            val = _direct_once(nsb, s, terms, margin, target_radius)
        best = val
        if terms is not None or float(balls.radius(val).upper()) <= target_radius:
            return val
    if best is not None and terms is None:
        raise PrecisionExhausted("direct sum did not reach the target radius")
    return best


def _reshift_for_speed(ns, params):
    if ns.degree == 1 or ns.q_ratio <= params.reshift_q:
        return ns
    alphas = ns.alphas
    rho = max(float(abs(a).mid()) for a in alphas[1:]) / float(alphas[0].real.mid())
    extra = math.ceil(math.log(params.reshift_q / ns.q_ratio) / math.log(rho)) if rho > 0 else 0
    extra = max(0, min(extra, params.max_extra_shift))
    return ns.reshift(ns.shift_n0 + extra)


def _check_pole_guard(geo, s, k, guard):
    logmod, arg = geo.log_mod_arg(k)
    re_pole = logmod / geo.log_a1
    if float(abs(s.real - re_pole).lower()) > guard:
        return
    L = geo.log_a1
    n = round(float(((s.imag * L - arg) / geo.two_pi).mid()))
    for cand in (n - 1, n, n + 1):
        loc = acb(logmod, arg + cand * geo.two_pi) / L
        if not float(abs(s - loc).lower()) > guard:
            raise PoleProximity(
                f"s is within {guard:g} of the pole with n={cand}, k={tuple(k)}")


def _truncation(ns, s, params):
    """Smallest K whose certified tail bound is below target_radius / 4; returns (K, tail)."""
    alphas = ns.alphas
    lam = ns.lambdas
    r = len(alphas)
    if r == 1:
        return 0, arb(0)
    if params.k_min > params.k_max:
        raise TruncationFailure("k_min exceeds k_max")
    a1 = alphas[0].real
    p = lam[0].real * a1
    front = (p ** (-s.real)).upper()
    rho = (max(abs(a) for a in alphas[1:]) / a1).upper()
    amp = (a1 ** (-s.real)).upper()
    q = ns.q_ball.upper()
    s_abs = abs(s).upper()
    goal = params.target_radius / 4
    binom = acb(1)
    for K in range(params.k_max + 1):
        # binom == (-s choose K); next one is (-s choose K+1)
        nxt = binom * (-s - K) / (K + 1)
        ratio_cap = q * max(arb(1), (s_abs + K + 1) / (K + 2))
        if K >= params.k_min and amp * rho ** (K + 1) <= 0.5 and ratio_cap < 1:
            tail = 2 * front * abs(nxt).upper() * q ** (K + 1) / (1 - ratio_cap)
            if float(tail.upper()) < goal:
                return K, tail.upper()
        binom = nxt
    raise TruncationFailure(
        f"k_max={params.k_max} is too small for target radius {params.target_radius:g}")


def _continued_once(ns, s, params):
    alphas = ns.alphas
    lam = ns.lambdas
    r = len(alphas)
    geo = _Geometry(alphas, lam)
    K, tail = _truncation(ns, s, params)

    log_a1 = geo.log_a1
    lam_s = (-s * geo.log_l1).exp()
    alpha_s = (-s * log_a1).exp()
    inv_l1 = 1 / lam[0]
    inv_a1 = 1 / alphas[0]

    lam_pows = [[acb(1)] for _ in range(r - 1)]
    alpha_pows = [[acb(1)] for _ in range(r - 1)]
    inv_l1_pows = [acb(1)]
    inv_a1_pows = [acb(1)]
    for _ in range(K):
        inv_l1_pows.append(inv_l1_pows[-1] * inv_l1)
        inv_a1_pows.append(inv_a1_pows[-1] * inv_a1)
        for i in range(r - 1):
            lam_pows[i].append(lam_pows[i][-1] * lam[i + 1])
            alpha_pows[i].append(alpha_pows[i][-1] * alphas[i + 1])

    total = acb(0)
    binom = acb(1)
    for k1 in range(K + 1):
        if k1:
            binom = binom * (-s - (k1 - 1)) / k1
        coef1 = binom * lam_s * inv_l1_pows[k1]
        base_w = alpha_s * inv_a1_pows[k1]
        for k in multi_indices(k1, r):
            _check_pole_guard(geo, s, k, params.pole_guard)
            lam_part = coef1 * multinomial(k)
            w = base_w
            for i, e in enumerate(exponents(k, r)):
                if e:
                    lam_part = lam_part * lam_pows[i][e]
                    w = w * alpha_pows[i][e]
            denom = 1 - w
            if denom.contains(0):
                raise PoleProximity(f"1 - w_k encloses 0 for k={k}")
            if lam_part.is_zero():
                continue
            total += lam_part * w / denom
    total += _prefix_sum(ns.prefix_terms, s)
    return total + acb(arb(0, tail), arb(0, tail))


def phi_continued(ns: NormalizedSequence, s, params: EvalParams | None = None) -> acb:
    """Meromorphic continuation of the Dirichlet series at ``s`` (off the pole set)."""
    params = params or EvalParams()
    s = balls.as_acb(s)
    last = None
    for bits in balls.precision_schedule(max(params.precision_bits, ns.precision_bits)):
        with working_precision(bits):
            nsb = _reshift_for_speed(ns.at_precision(bits), params)
            val = _continued_once(nsb, s, params)
        last = val
        if float(balls.radius(val).upper()) <= params.target_radius:
            return val
    raise PrecisionExhausted(
        f"could not reach radius {params.target_radius:g} "
        f"(best {float(balls.radius(last).upper()):.3g})")


def lambda_term(ns: NormalizedSequence, s, k) -> acb:
    """Lambda_k(s) for the shifted Binet data of ``ns`` (principal branch of lambda'_1^{-s-k_1})."""
    from .poles import lambda_product

    s = balls.as_acb(s)
    with working_precision(ns.precision_bits):
        log_l1 = ns.lambdas[0].real.log()
        return lambda_product(ns.lambdas, log_l1, s, tuple(k), len(ns.alphas))
