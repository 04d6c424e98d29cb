"""Complete elliptic integral K(m) and Jacobi functions sn, cn, dn.

Throughout, ``m`` is the *parameter* (m = k**2), so that

    sn**2 + cn**2 = 1,    dn**2 + m * sn**2 = 1.

Both K(m) and the Jacobi functions come from the same descending Landen
(arithmetic-geometric mean) sequence.  The algorithm is written once against
a tiny arithmetic backend so it runs either in float64 (numpy, vectorised)
or in arbitrary precision (mpmath, ``dps`` decimal digits).  The high
precision path exists for verification work where lattice sums cancel to
far below double rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

import mpmath
import numpy as np

from .errors import DivergenceError, DomainError, UsageError

#: Lattices need m <= 1 - LATTICE_EPS, since K(m) -> inf as m -> 1.
LATTICE_EPS = 1e-9


class EllipticTriple(NamedTuple):
    """(sn, cn, dn) at one argument, or elementwise over an array of arguments."""

    s: object
    c: object
    d: object


class Spacing(Enum):
    """Site spacing of a lattice, as a multiple of K(m)/p."""

    HALF = 2  # 2K/p
    FULL = 4  # 4K/p


# -- arithmetic backends ------------------------------------------------------


class _Float64:
    dps = None
    pi = math.pi
    one = 1.0
    # AGM stops once c_n <= tiny * a_n
    tiny = 1e-17

    sqrt = staticmethod(math.sqrt)
    vsin = staticmethod(np.sin)
    vcos = staticmethod(np.cos)
    vasin = staticmethod(np.arcsin)
    vsqrt = staticmethod(np.sqrt)
    vround = staticmethod(np.round)

    @staticmethod
    def scalar(x):
        return float(x)

    @staticmethod
    def array(u):
        return np.array(u, dtype=float)

    @staticmethod
    def sech_tanh(u):
        e = np.exp(-2.0 * np.abs(u))
        return 2.0 * np.sqrt(e) / (1.0 + e), np.tanh(u)


class _Multiprecision:
    def __init__(self, dps):
        ctx = mpmath.MPContext()
        ctx.dps = dps
        self.ctx = ctx
        self.dps = dps
        self.pi = ctx.pi
        self.one = ctx.mpf(1)
        self.tiny = ctx.mpf(10) ** (-dps - 2)
        self.sqrt = ctx.sqrt
        self.vsin = np.frompyfunc(ctx.sin, 1, 1)
        self.vcos = np.frompyfunc(ctx.cos, 1, 1)
        self.vasin = np.frompyfunc(ctx.asin, 1, 1)
        self.vsqrt = np.frompyfunc(ctx.sqrt, 1, 1)
        self.vround = np.frompyfunc(ctx.nint, 1, 1)
        self._sech = np.frompyfunc(ctx.sech, 1, 1)
        self._tanh = np.frompyfunc(ctx.tanh, 1, 1)

    def scalar(self, x):
        return self.ctx.mpf(x)

    def array(self, u):
        u = np.asarray(u)
        out = np.empty(u.shape, dtype=object)
        for idx, v in np.ndenumerate(u):
            out[idx] = self.ctx.mpf(v)
        return out

    def sech_tanh(self, u):
        return self._sech(u), self._tanh(u)


_FLOAT64 = _Float64()


@lru_cache(maxsize=None)
def backend(dps=None):
    """Arithmetic backend: float64 for ``dps=None``, else mpmath with ``dps`` digits."""
    if dps is None:
        return _FLOAT64
    if int(dps) < 16:
        raise UsageError(f"dps must be >= 16, got {dps}")
    return _Multiprecision(int(dps))


# -- validation ---------------------------------------------------------------


def _check_m(m):
    try:
        mf = float(m)
    except (TypeError, ValueError):
        raise DomainError(f"m must be a real number, got {m!r}") from None
    if not math.isfinite(mf) or mf < 0.0 or mf > 1.0:
        raise DomainError(f"m must lie in [0, 1], got {m!r}")
    return mf


def _check_u(u, dps=None):
    # with dps, mpmath arguments are kept exact rather than rounded to float
    arr = np.asarray(u)
    if dps is None or arr.dtype != object:
        arr = np.asarray(u, dtype=float)
        finite = np.all(np.isfinite(arr))
    else:
        finite = all(mpmath.isfinite(v) for v in arr.flat)
    if not finite:
        raise DomainError("Jacobi functions need finite arguments")
    return arr


# -- core ---------------------------------------------------------------------


def _agm(m, be):
    """Descending Landen sequence; returns (a_N, [c_n/a_n for n = 1..N])."""
    a = be.one
    b = be.sqrt(be.one - m)
    c = be.sqrt(m)
    ratios = []
    while c > be.tiny * a:
        a_next = (a + b) / 2
        # (a - b)/2 without the cancellation
        c = c * c / (4 * a_next)
        b = be.sqrt(a * b)
        a = a_next
        ratios.append(c / a)
        if len(ratios) > 64:
            raise RuntimeError("AGM failed to converge")
    return a, ratios


def complete_K(m, dps=None):
    """Complete elliptic integral of the first kind, K(m) = pi / (2 agm(1, sqrt(1-m))).

    Returns a float, or an mpmath number when ``dps`` is given.
    """
    mf = _check_m(m)
    if mf == 1.0:
        raise DivergenceError("K(m) diverges at m = 1")
    be = backend(dps)
    a, _ = _agm(be.scalar(mf), be)
    return be.pi / (2 * a)


def _jacobi(u, mf, be):
    # u: 1-d array in backend type
    if mf == 1.0:
        sech, tanh = be.sech_tanh(u)
        return tanh, sech, sech
    m = be.scalar(mf)
    a, ratios = _agm(m, be)
    if mf > 0.0:
        quarter = be.pi / (2 * a)
        period = 4 * quarter
        u = u - be.vround(u / period) * period
    phi = u * (2 ** len(ratios) * a)
    for r in reversed(ratios):
        phi = (phi + be.vasin(be.vsin(phi) * r)) / 2
    s = be.vsin(phi)
    c = be.vcos(phi)
    if mf == 0.0:
        d = np.full(s.shape, be.one, dtype=s.dtype)
    else:
        # cn**2 + (1-m) sn**2 has no cancellation, unlike cn / cos(phi1 - phi0)
        d = be.vsqrt(c * c + s * s * (be.one - m))
    return s, c, d


def jacobi(u, m, dps=None):
    """Jacobi (sn, cn, dn) at argument(s) ``u`` for parameter ``m`` in [0, 1].

    ``u`` may be a scalar or an array; the result has matching shape.  At m = 1
    the closed forms (tanh, sech, sech) are used.  Arguments are reduced
    modulo 4K before the Landen recursion.
    """
    mf = _check_m(m)
    arr = _check_u(u, dps)
    be = backend(dps)
    flat = be.array(arr.reshape(-1))
    s, c, d = _jacobi(flat, mf, be)
    if arr.ndim == 0:
        return EllipticTriple(s[0], c[0], d[0])
    return EllipticTriple(*(v.reshape(arr.shape) for v in (s, c, d)))


def _add(x, y, m):
    """(sn, cn, dn)(u + v) from the values at u (arrays) and v (scalars)."""
    s1, c1, d1 = x
    s2, c2, d2 = y
    den = 1 - s1 * s1 * (m * s2 * s2)
    s = (s1 * (c2 * d2) + c1 * d1 * s2) / den
    c = (c1 * c2 - s1 * d1 * (s2 * d2)) / den
    d = (d1 * d2 - s1 * c1 * (m * s2 * c2)) / den
    return s, c, d


@dataclass(frozen=True, eq=False)
class Lattice:
    """p equally spaced arguments ``base + (i-1) * spacing``, i = 1..p.

    ``base`` may be an array, in which case every site carries an array of
    arguments.
    """

    p: int
    spacing: Spacing
    m: float
    base: object = 0.0

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise UsageError(f"p must be a positive integer, got {self.p!r}")
        if not isinstance(self.spacing, Spacing):
            raise UsageError(f"spacing must be a Spacing, got {self.spacing!r}")
        mf = _check_m(self.m)
        if self.p > 1 and mf > 1.0 - LATTICE_EPS:
            raise DivergenceError(
                f"lattice with p={self.p} needs m <= 1 - {LATTICE_EPS:g}, got {self.m!r}"
            )

    def step(self, dps=None):
        """Distance between neighbouring sites (0 for a single site)."""
        if self.p == 1:
            return backend(dps).scalar(0)
        return self.spacing.value * complete_K(self.m, dps) / self.p


def lattice_triples(lat, dps=None):
    """(sn, cn, dn) at every lattice site; entry 0 is ``jacobi(lat.base, lat.m)``."""
    mf = float(lat.m)
    arr = _check_u(lat.base, dps)
    be = backend(dps)
    base = be.array(arr.reshape(-1))
    step = lat.step(dps)
    first = _jacobi(base, mf, be)
    out = []
    for i in range(lat.p):
        if i == 0:
            s, c, d = first
        elif be.dps is None:
            s, c, d = _jacobi(base + i * step, mf, be)
        else:
            # the addition theorem is rational, so in multiprecision it is far
            # cheaper than another Landen pass at every argument
            shift = _jacobi(be.array([0.0]) + i * step, mf, be)
            s, c, d = _add(first, tuple(v[0] for v in shift), be.scalar(mf))
        if arr.ndim == 0:
            out.append(EllipticTriple(s[0], c[0], d[0]))
        else:
            out.append(EllipticTriple(*(v.reshape(arr.shape) for v in (s, c, d))))
    return out
