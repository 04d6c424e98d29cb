"""PDE residual certification of constructed waves.

In the travelling coordinate the reduction is exact: u_t = -b alpha^3 W',
u_x = alpha W', u_xxx = alpha^3 W''' with W(xi) the profile, so the residual
is a function of xi alone and all derivatives are symbolic.

    KdV:   R = -b alpha^3 W' - 6 alpha W W' + alpha^3 W'''
    mKdV:  R = -q alpha^3 V' + e 6 alpha V^2 V' + alpha^3 V'''   (e = -1 type 1, +1 type 2)

The relative residual divides |R| by the largest of the three terms at the
same point, floored at RELATIVE_FLOOR times the largest term anywhere on the
grid (at an extremum all three terms vanish together).  When every term is
below the rounding bound the summed monomial sizes stand in for the largest
term.

Lattice sums at small m and larger p oscillate with an amplitude far below
the size of their summands, so float64 rounding can swamp the residual.
``residual_scan`` carries a running error bound and re-evaluates in
multiprecision when float64 cannot resolve the target tolerance.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass

import mpmath
import numpy as np

from .algebra import site_values
from .errors import UsageError
from .solutions import WaveFamily, as_family, build

log = logging.getLogger(__name__)

DEFAULT_POINTS = 257
DEFAULT_TOL = 1e-8
RELATIVE_FLOOR = 1e-6

_FLOAT64_NOISE = 1e-14
_ESCALATION = (None, 40, 80)


@dataclass(frozen=True)
class ResidualReport:
    family: WaveFamily
    p: int
    m: float
    alpha: float
    beta: float
    sign: int
    velocity: float
    max_abs: float
    max_rel: float
    grid_points: int
    argmax_xi: float
    dps: int | None = None

    def passed(self, tol=DEFAULT_TOL):
        return self.max_rel <= tol


def _equation_sign(w):
    return {"kdv": None, "mkdv1": -1, "mkdv2": 1}[w.family.equation]


def _pieces(w, xi, dps):
    sv = site_values(w.profile.p, w.profile.spacing, w.m, xi, dps)
    w1, w3 = w.derivatives
    return sv, (sv.value(w.profile), sv.value(w1), sv.value(w3))


def _terms(w, W, W1, W3, eq):
    a = w.alpha
    t1 = (-w.velocity * a**3) * W1
    if eq is None:
        t2 = (-6.0 * a) * W * W1
    else:
        t2 = (eq * 6.0 * a) * W * W * W1
    t3 = a**3 * W3
    return t1, t2, t3


def _residual(w, xi, eq, dps):
    xi = np.asarray(xi, dtype=float)
    _, (W, W1, W3) = _pieces(w, xi if xi.ndim else float(xi), dps)
    t1, t2, t3 = _terms(w, W, W1, W3, eq)
    r = t1 + t2 + t3
    if dps is None:
        return r
    return float(r) if xi.ndim == 0 else np.asarray(r, dtype=float)


def kdv_residual(w, xi, dps=None):
    """KdV residual of ``w`` at xi (scalar or array)."""
    if _equation_sign(w) is not None:
        raise UsageError(f"{w.family.value} is not a KdV family")
    return _residual(w, xi, None, dps)


def mkdv_residual(w, xi, equation_sign, dps=None):
    """mKdV residual; ``equation_sign`` is -1 for type 1 and +1 for type 2."""
    eq = _equation_sign(w)
    if eq is None or eq != equation_sign:
        raise UsageError(
            f"{w.family.value} does not solve the mKdV equation with sign {equation_sign:+d}"
        )
    return _residual(w, xi, eq, dps)


def residual(w, xi, dps=None):
    """Residual of ``w`` in whichever equation its family solves."""
    return _residual(w, xi, _equation_sign(w), dps)


def _error_bound(w, sv, W, W1, W3, eq, noise):
    w1, w3 = w.derivatives
    eW = noise * sv.magnitude(w.profile)
    eW1 = noise * sv.magnitude(w1)
    eW3 = noise * sv.magnitude(w3)
    W, W1 = np.abs(np.asarray(W, dtype=float)), np.abs(np.asarray(W1, dtype=float))
    a = w.alpha
    if eq is None:
        nonlin = 6 * a * (W * eW1 + W1 * eW)
    else:
        nonlin = 6 * a * (W * W * eW1 + 2 * W * W1 * eW)
    return a**3 * abs(w.velocity) * eW1 + nonlin + a**3 * eW3


def _scan_points(w, xi, eq, dps):
    """Per-point |R|, largest term, summed monomial sizes and rounding bound."""
    sv, (W, W1, W3) = _pieces(w, xi, dps)
    t1, t2, t3 = _terms(w, W, W1, W3, eq)
    r = np.abs(np.asarray(t1 + t2 + t3, dtype=float))
    scale = np.maximum.reduce([np.abs(np.asarray(t, dtype=float)) for t in (t1, t2, t3)])
    sizes = _error_bound(w, sv, W, W1, W3, eq, 1.0)
    noise = _FLOAT64_NOISE if dps is None else 10.0 ** (3 - dps)
    return r, scale, sizes, sizes * noise


def _relative(r, scale, sizes, bound):
    top = float(scale.max())
    if top <= float(np.max(bound)):
        # every term is rounding noise (a profile constant to working
        # precision, e.g. at m = 1): fall back to the summed monomial sizes
        top = float(np.max(sizes))
    denom = np.maximum(scale, RELATIVE_FLOOR * top)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(denom > 0, r / denom, 0.0)
        res = np.where(denom > 0, bound / denom, 0.0)
    return rel, res


def residual_scan(w, grid=None, tol=DEFAULT_TOL):
    """Residual of ``w`` over a uniform xi grid ``(xi_min, xi_max, n)``.

    The default grid is one period with DEFAULT_POINTS points.  Points whose
    rounding bound exceeds tol/10 are re-evaluated with more digits until
    every point is resolved, or some point exceeds tol by more than its
    bound (a certain failure), or the ladder ends.
    """
    if grid is None:
        grid = (0.0, w.period, DEFAULT_POINTS)
    lo, hi, n = grid
    if int(n) < 2:
        raise UsageError("a residual scan needs at least 2 points")
    xi = np.linspace(float(lo), float(hi), int(n))
    eq = _equation_sign(w)
    cols = _scan_points(w, xi, eq, None)
    dps = None
    ladder = iter(_ESCALATION[1:])
    while True:
        rel, res = _relative(*cols)
        if np.any(rel - res > tol):
            break
        idx = np.flatnonzero(res > 0.1 * tol)
        if idx.size == 0:
            break
        dps = next(ladder, None)
        if dps is None:
            dps = _ESCALATION[-1]
            log.warning(
                "%s p=%d m=%g: rounding bound %.2g still above tol/10 at %d digits",
                w.family.value, w.p, w.m, float(res.max()), dps,
            )
            break
        for col, vals in zip(cols, _scan_points(w, xi[idx], eq, dps)):
            col[idx] = vals
    k = int(np.argmax(rel))
    return ResidualReport(
        w.family, w.p, w.m, w.alpha, w.beta, w.sign, w.velocity,
        float(np.max(cols[0])), float(rel[k]), int(n), float(xi[k]), dps,
    )


def derivative_crosscheck(w, xi, dps=40, h=1e-5):
    """Largest relative gap between symbolic and finite-difference W' and W'''.

    W' is compared with the central difference and W''' with the five-point
    stencil (f(x+2h) - 2f(x+h) + 2f(x-h) - f(x-2h)) / (2h^3).  Gaps are
    relative to the derivative's largest magnitude over one period, so zeros
    of the derivative do not inflate them.  The stencils are evaluated with
    ``dps`` digits; in float64 (dps=None) the third-derivative step is
    widened to 2e-3 since h^3 rounding would dominate.
    """
    xi = float(xi)
    w1, w3 = w.derivatives
    if dps is None:
        h1, h3 = h, 2e-3
        pts = xi + np.array([0.0, -2 * h3, -h3, h3, 2 * h3, -h1, h1])
    else:
        # stencil points built exactly; float64 points would carry ~1e-16
        # errors that h^3 amplifies
        ctx = mpmath.MPContext()
        ctx.dps = dps
        x, h1 = ctx.mpf(xi), ctx.mpf(h)
        h3 = h1
        pts = np.array([x + k * h1 for k in (0, -2, -1, 1, 2, -1, 1)], dtype=object)
    sv = site_values(w.profile.p, w.profile.spacing, w.m, pts, dps)
    f = sv.value(w.profile)
    d1, d3 = sv.value(w1)[0], sv.value(w3)[0]
    fd1 = (f[6] - f[5]) / (2 * h1)
    fd3 = (f[4] - 2 * f[3] + 2 * f[2] - f[1]) / (2 * h3**3)

    period = w.period if np.isfinite(w.period) else 10.0
    ref = np.linspace(0.0, period, 17)[:-1]
    sv_ref = site_values(w.profile.p, w.profile.spacing, w.m, ref, dps)
    gaps = []
    for sym, fd, poly in ((d1, fd1, w1), (d3, fd3, w3)):
        scale = max(float(np.max(np.abs(np.asarray(sv_ref.value(poly), dtype=float)))), abs(float(sym)))
        diff = abs(float(sym - fd))
        gaps.append(diff / scale if scale > 0 else diff)
    return max(gaps)


# -- sweeps -------------------------------------------------------------------

ALL_FAMILIES = tuple(WaveFamily)
SWEEP_MS = tuple(round(0.1 * k, 1) for k in range(1, 10))
SWEEP_ALPHAS = (0.5, 1.0, 2.0)
SWEEP_BETAS = (0.0, 1.0)
SWEEP_SIGNS = (1, -1)


def sweep_cases(families=ALL_FAMILIES, p_max=6, ms=SWEEP_MS, alphas=SWEEP_ALPHAS,
                betas=SWEEP_BETAS, signs=SWEEP_SIGNS, ps=None):
    """Parameter tuples (family, p, m, alpha, beta, sign) of a certification sweep.

    beta varies only for the KdV dn^2 family; illegal (family, p) pairs are
    left out unless ``ps`` is given explicitly.
    """
    for family in families:
        family = as_family(family)
        fam_ps = family.legal_ps(p_max) if ps is None else list(ps)
        fam_betas = betas if family is WaveFamily.KDV_DN2_SUM else (0.0,)
        for p in fam_ps:
            for m in ms:
                for alpha in alphas:
                    for beta in fam_betas:
                        for sign in signs:
                            yield family, p, m, alpha, beta, sign


def scan_case(family, p, m, alpha, beta, sign, corrupt_velocity=False,
              points=DEFAULT_POINTS, tol=DEFAULT_TOL):
    """Build one solution and scan its residual over one period."""
    w = build(family, p, alpha=alpha, beta=beta, sign=sign, m=m)
    if corrupt_velocity:
        w = dataclasses.replace(w, velocity=w.velocity + 1.0)
    return residual_scan(w, (0.0, w.period, points), tol=tol)
