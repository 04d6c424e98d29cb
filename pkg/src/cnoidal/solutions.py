"""Periodic travelling-wave families for KdV and the two mKdV equations.

Equations (travelling coordinate xi = alpha (x - velocity alpha^2 t)):

    KdV      u_t - 6 u u_x + u_xxx = 0
    mKdV-1   v_t - 6 v^2 v_x + v_xxx = 0
    mKdV-2   v_t + 6 v^2 v_x + v_xxx = 0

A ``WaveSolution`` carries its profile as an ``EllipticPoly`` in the lattice
site variables, with alpha, beta, sign and the non-polynomial m factors
(sqrt(m), 1 - sqrt(1-m)) folded into the coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from .algebra import SiteRing, differentiate, evaluate
from .constants import Kind, extract_constant
from .elliptic import LATTICE_EPS, Spacing, complete_K
from .errors import DivergenceError, UsageError


class WaveFamily(Enum):
    KDV_DN2_SUM = "kdv"
    MKDV1_SN_SUM_ODD = "mkdv1-sum"
    MKDV1_SN_PRODUCT_EVEN = "mkdv1-product"
    MKDV2_DN_SUM = "mkdv2-dn"
    MKDV2_CN_SUM_ODD = "mkdv2-cn"
    MKDV2_DN_ALTERNATING_EVEN = "mkdv2-alt"
    MIURA_OF_MKDV1 = "miura"

    @property
    def equation(self):
        """'kdv', 'mkdv1' or 'mkdv2'."""
        if self in (WaveFamily.KDV_DN2_SUM, WaveFamily.MIURA_OF_MKDV1):
            return "kdv"
        if self in (WaveFamily.MKDV1_SN_SUM_ODD, WaveFamily.MKDV1_SN_PRODUCT_EVEN):
            return "mkdv1"
        return "mkdv2"

    def is_legal(self, p):
        if int(p) != p or p < 1:
            return False
        if self in (WaveFamily.MKDV1_SN_SUM_ODD, WaveFamily.MKDV2_CN_SUM_ODD):
            return p % 2 == 1
        if self is WaveFamily.MKDV1_SN_PRODUCT_EVEN:
            return p in (2, 4)
        if self is WaveFamily.MKDV2_DN_ALTERNATING_EVEN:
            return p % 2 == 0
        if self is WaveFamily.MIURA_OF_MKDV1:
            return p % 2 == 1 or p in (2, 4)
        return True

    def spacing(self, p):
        if self in (WaveFamily.MKDV1_SN_SUM_ODD, WaveFamily.MKDV2_CN_SUM_ODD):
            return Spacing.FULL
        if self is WaveFamily.MIURA_OF_MKDV1:
            return miura_source(p).spacing(p)
        return Spacing.HALF

    def legal_ps(self, p_max):
        return [p for p in range(1, p_max + 1) if self.is_legal(p)]


def miura_source(p):
    """The mKdV-1 family a Miura solution with this p is built from."""
    return WaveFamily.MKDV1_SN_SUM_ODD if p % 2 else WaveFamily.MKDV1_SN_PRODUCT_EVEN


@dataclass(frozen=True)
class WaveSolution:
    family: WaveFamily
    p: int
    alpha: float
    beta: float
    sign: int
    m: float
    velocity: float
    profile: object = field(repr=False)

    @cached_property
    def derivatives(self):
        """(W', W''') with respect to xi, symbolic."""
        w1 = differentiate(self.profile)
        return w1, differentiate(differentiate(w1))

    @property
    def period(self):
        """Period of the profile in xi (4K/p; 2K/p for the dn and dn^2 sums)."""
        if self.m >= 1.0:
            return math.inf
        K = complete_K(self.m)
        if self.family in (WaveFamily.KDV_DN2_SUM, WaveFamily.MKDV2_DN_SUM):
            return 2.0 * K / self.p
        return 4.0 * K / self.p


def as_family(value):
    try:
        return WaveFamily(value)
    except ValueError:
        raise UsageError(f"unknown wave family {value!r}") from None


def _check_family(family, p):
    family = as_family(family)
    if not family.is_legal(p):
        raise UsageError(f"family {family.value} is not defined for p={p}")
    return family, int(p)


def _check_m(m, p):
    m = float(m)
    if not 0.0 <= m <= 1.0:
        raise UsageError(f"m must lie in [0, 1], got {m!r}")
    if p > 1 and m > 1.0 - LATTICE_EPS:
        raise DivergenceError(f"p={p} needs m <= 1 - {LATTICE_EPS:g}, got {m!r}")
    return m


def _const(kind, p, m, samples):
    return extract_constant(kind, p, m, samples=samples).value


def velocity(family, p, m, beta=0.0, samples=32):
    """Velocity b_p (KdV) or q_p (mKdV) of the family at (p, m).

    ``beta`` only enters the KdV family.  For KDV_DN2_SUM, m = 1 is accepted
    for every p using A(p, 1) = 0; other families need m < 1 unless p = 1.
    """
    family, p = _check_family(family, p)
    m_val = float(m)
    if family is WaveFamily.KDV_DN2_SUM:
        if m_val == 1.0:
            return 8.0 - 4.0 - 6.0 * beta
        m = _check_m(m, p)
        return 8.0 - 4.0 * m - 6.0 * beta + 12.0 * _const(Kind.A, p, m, samples)
    m = _check_m(m, p)
    if family is WaveFamily.MIURA_OF_MKDV1:
        family = miura_source(p)
    if family is WaveFamily.MKDV1_SN_SUM_ODD:
        B = _const(Kind.B, p, m, samples)
        C = _const(Kind.C, p, m, samples)
        return -(1.0 + m) - 6.0 * (B - C)
    if family is WaveFamily.MKDV1_SN_PRODUCT_EVEN:
        q = -2.0 * (2.0 - m)
        return q if p == 2 else q - 12.0 * math.sqrt(1.0 - m)
    if family is WaveFamily.MKDV2_DN_SUM:
        return 2.0 - m + 6.0 * (_const(Kind.E, p, m, samples) - _const(Kind.F, p, m, samples))
    if family is WaveFamily.MKDV2_CN_SUM_ODD:
        G = _const(Kind.G, p, m, samples)
        H = _const(Kind.H, p, m, samples)
        return 2.0 * m - 1.0 + 6.0 * (G - H)
    I_ = _const(Kind.I, p, m, samples)
    J = _const(Kind.J, p, m, samples)
    L = _const(Kind.L, p, m, samples)
    return 2.0 - m - 6.0 * (I_ - J + L)


def _profile(family, p, alpha, beta, sign, m):
    ring = SiteRing(p, family.spacing(p))
    sites = range(1, p + 1)
    if family is WaveFamily.KDV_DN2_SUM:
        a2 = alpha * alpha
        return -2.0 * a2 * sum(ring.d(i) ** 2 for i in sites) + beta * a2
    if family is WaveFamily.MKDV1_SN_SUM_ODD:
        return sign * math.sqrt(m) * alpha * sum(ring.s(i) for i in sites)
    if family is WaveFamily.MKDV1_SN_PRODUCT_EVEN:
        prod = ring.const(1.0)
        for i in sites:
            prod = prod * ring.s(i)
        amp = 1.0 if p == 2 else 1.0 - math.sqrt(1.0 - m)
        return sign * alpha * amp * ring.m * prod
    if family is WaveFamily.MKDV2_DN_SUM:
        return sign * alpha * sum(ring.d(i) for i in sites)
    if family is WaveFamily.MKDV2_CN_SUM_ODD:
        return sign * math.sqrt(m) * alpha * sum(ring.c(i) for i in sites)
    if family is WaveFamily.MKDV2_DN_ALTERNATING_EVEN:
        return sign * alpha * sum(ring.d(i) - ring.d(i + 1) for i in range(1, p, 2))
    raise AssertionError(family)


def build(family, p, alpha=1.0, beta=0.0, sign=1, m=0.5, samples=32):
    """Construct a member of ``family``.

    For MIURA_OF_MKDV1 the mKdV-1 source (sn sum for odd p, sn product for
    p in {2, 4}) is built with sign +1 and ``sign`` selects the branch of
    v^2 +- v_x; flipping the source sign gives the same two profiles.
    """
    family, p = _check_family(family, p)
    if not alpha > 0:
        raise UsageError(f"alpha must be positive, got {alpha!r}")
    if sign not in (1, -1):
        raise UsageError(f"sign must be +1 or -1, got {sign!r}")
    m = _check_m(m, p)
    if family is WaveFamily.MIURA_OF_MKDV1:
        source = build(miura_source(p), p, alpha, 0.0, 1, m, samples)
        return miura(source, sign)
    if family is not WaveFamily.KDV_DN2_SUM:
        beta = 0.0
    v = velocity(family, p, m, beta, samples)
    prof = _profile(family, p, float(alpha), float(beta), sign, m)
    return WaveSolution(family, p, float(alpha), float(beta), sign, m, v, prof)


def miura(v, sign):
    """Miura transform u = v^2 + sign * v_x of an mKdV-1 solution; a KdV solution."""
    if v.family.equation != "mkdv1":
        raise UsageError(f"Miura transform needs an mKdV-1 solution, got {v.family.value}")
    if sign not in (1, -1):
        raise UsageError(f"sign must be +1 or -1, got {sign!r}")
    prof = v.profile * v.profile + (sign * v.alpha) * differentiate(v.profile)
    return WaveSolution(
        WaveFamily.MIURA_OF_MKDV1, v.p, v.alpha, 0.0, sign, v.m, v.velocity, prof
    )


def travelling_coordinate(w, x, t):
    return w.alpha * (np.asarray(x, dtype=float) - w.velocity * w.alpha**2 * np.asarray(t, dtype=float))


def eval_solution(w, x, t):
    """u(x, t) (or v(x, t)) with xi = alpha (x - velocity alpha^2 t)."""
    xi = travelling_coordinate(w, x, t)
    if np.ndim(xi) == 0:
        xi = float(xi)
    return evaluate(w.profile, xi, w.m)
