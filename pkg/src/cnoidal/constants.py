"""Numerical extraction of the constants in the cyclic elliptic identities.

Each constant is the value of a ratio (or plain sum) of symmetric functions
of the p lattice-site values, which is independent of the base argument.
We sample that ratio at a deterministic golden-stride schedule of base
arguments; the median is the value and the spread is the constancy check.

For high p and small m the lattice sums cancel to far below double
rounding (the surviving part scales like the nome to the power p), so every
sample carries a running error bound.  When double precision cannot resolve
the ratio to the requested tolerance the same computation is repeated with
mpmath arithmetic at increasing precision.

Kinds, lattice and legal p:

    A  HALF  any p   sum_i d_i^2 sum_{j!=i} s_j c_j d_j  /  sum_i s_i c_i d_i
    B  FULL  odd p   m sum_{i<j} s_i s_j
    C  FULL  odd p   m sum_{i<j<k} s_i s_j s_k  /  sum_i s_i
    D  HALF  even p  sum_{i<j<k} y_i y_j y_k  /  sum_i y_i,  y = c d / s
    E  HALF  any p   sum_{i<j} d_i d_j
    F  HALF  any p   sum_{i<j<k} d_i d_j d_k  /  sum_i d_i
    G  FULL  odd p   m sum_{i<j} c_i c_j
    H  FULL  odd p   m sum_{i<j<k} c_i c_j c_k  /  sum_i c_i
    I  HALF  even p  sum_{i<j, i+j odd} d_i d_j
    J  HALF  even p  sum_{i<j, i+j even} d_i d_j
    L  HALF  even p  (sum_{i+j+k odd} - sum_{i+j+k even}) d_i d_j d_k / sum_{i odd} (d_i - d_{i+1})
    Q  -     -       sn^2(2K/3)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .elliptic import Lattice, Spacing, backend, complete_K, jacobi, lattice_triples
from .errors import DegenerateSamplingError, DivergenceError, NonIdentityError, UsageError

DEFAULT_SAMPLES = 32
DEFAULT_TOL = 1e-9

#: Samples with |denominator| below this fraction of the largest are skipped.
DENOMINATOR_FLOOR = 1e-6

#: m used in place of 0 for ratios whose denominator vanishes identically at m = 0.
ZERO_LIMIT_M = 1e-15

# error per unit of summand magnitude: float64 sites are good to a few 1e-15
_FLOAT64_NOISE = 1e-14
_PRECISION_LADDER = (None, 32, 64, 128, 256, 512)


class Kind(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E = "E"
    F = "F"
    G = "G"
    H = "H"
    I = "I"  # noqa: E741
    J = "J"
    L = "L"
    Q = "Q"


_SPACING = {
    Kind.A: Spacing.HALF,
    Kind.B: Spacing.FULL,
    Kind.C: Spacing.FULL,
    Kind.D: Spacing.HALF,
    Kind.E: Spacing.HALF,
    Kind.F: Spacing.HALF,
    Kind.G: Spacing.FULL,
    Kind.H: Spacing.FULL,
    Kind.I: Spacing.HALF,
    Kind.J: Spacing.HALF,
    Kind.L: Spacing.HALF,
}

_PARITY = {
    Kind.A: None,
    Kind.B: 1,
    Kind.C: 1,
    Kind.D: 0,
    Kind.E: None,
    Kind.F: None,
    Kind.G: 1,
    Kind.H: 1,
    Kind.I: 0,
    Kind.J: 0,
    Kind.L: 0,
    Kind.Q: None,
}

# denominators that vanish identically at m = 0 for p >= 2
_DEGENERATE_AT_ZERO = {Kind.A, Kind.C, Kind.H, Kind.L}


@dataclass(frozen=True)
class IdentityConstant:
    kind: Kind
    p: int
    m: float
    value: float
    constancy_dev: float
    samples_used: int = 0
    dps: int | None = None  # None: float64 was enough
    tol: float = DEFAULT_TOL

    @property
    def valid(self):
        return self.constancy_dev <= self.tol


def is_legal(kind, p):
    kind = Kind(kind)
    if int(p) != p or p < 1:
        return False
    parity = _PARITY[kind]
    return parity is None or p % 2 == parity


def constant_Q(m):
    """Q = sn^2(2K(m)/3, m)."""
    if float(m) == 1.0:
        raise DivergenceError("Q needs K(m), which diverges at m = 1")
    s = jacobi(2.0 * complete_K(m) / 3.0, m).s
    return float(s * s)


def sample_bases(m, samples=DEFAULT_SAMPLES):
    """Base arguments (0.137 + 0.61803 k) K(m), k = 0..samples-1."""
    return (0.137 + 0.61803 * np.arange(samples)) * complete_K(m)


# -- sums over the sites ------------------------------------------------------


def _esym(ys, k):
    """Elementary symmetric polynomials e_0..e_k of the site values ``ys``."""
    e = [1] + [0] * k
    for y in ys:
        for j in range(k, 0, -1):
            e[j] = e[j] + e[j - 1] * y
    return e


def _fabs(x):
    return np.abs(np.asarray(x, dtype=float))


def _identity_terms(kind, triples, m):
    """(numerator, denominator or None, |numerator| scale, |denominator| scale)."""
    s = [t.s for t in triples]
    c = [t.c for t in triples]
    d = [t.d for t in triples]
    if kind is Kind.A:
        d2 = [x * x for x in d]
        X = [a * b * e for a, b, e in zip(s, c, d)]
        num = sum(d2) * sum(X) - sum(a * b for a, b in zip(d2, X))
        mass = sum(_fabs(x) for x in d2) * sum(_fabs(x) for x in X)
        return num, sum(X), mass, sum(_fabs(x) for x in X)
    if kind in (Kind.B, Kind.G):
        ys = s if kind is Kind.B else c
        mf = abs(float(m))
        return m * _esym(ys, 2)[2], None, mf * _esym([_fabs(y) for y in ys], 2)[2], None
    if kind in (Kind.C, Kind.H):
        ys = s if kind is Kind.C else c
        e = _esym(ys, 3)
        ea = _esym([_fabs(y) for y in ys], 3)
        return m * e[3], e[1], abs(float(m)) * ea[3], ea[1]
    if kind is Kind.D:
        ys = [b * e / a for a, b, e in zip(s, c, d)]
        e = _esym(ys, 3)
        ea = _esym([_fabs(y) for y in ys], 3)
        return e[3], e[1], ea[3], ea[1]
    if kind in (Kind.E, Kind.F):
        e = _esym(d, 3)
        ea = _esym([_fabs(y) for y in d], 3)
        if kind is Kind.E:
            return e[2], None, ea[2], None
        return e[3], e[1], ea[3], ea[1]
    # odd sites are i = 1, 3, ... (list index 0, 2, ...)
    odd, even = d[0::2], d[1::2]
    if kind is Kind.I:
        num = sum(odd) * sum(even)
        return num, None, _fabs(num), None
    if kind is Kind.J:
        num = _esym(odd, 2)[2] + _esym(even, 2)[2]
        return num, None, _fabs(num), None
    if kind is Kind.L:
        ys = [x if i % 2 == 0 else -x for i, x in enumerate(d)]
        e = _esym(ys, 3)
        ea = _esym([_fabs(y) for y in d], 3)
        return e[3], e[1], ea[3], ea[1]
    raise UsageError(f"no sampled identity for kind {kind}")


def _attempt(kind, p, m_eval, bases, dps, tol):
    be = backend(dps)
    triples = lattice_triples(Lattice(p, _SPACING[kind], m_eval, bases), dps)
    num, den, num_mass, den_mass = _identity_terms(kind, triples, be.scalar(m_eval))
    noise = _FLOAT64_NOISE if dps is None else 10.0 ** (3 - dps)
    if den is None:
        ratio = np.asarray(num, dtype=float) if dps is None else num
        err = noise * num_mass
        keep = np.ones(len(bases), dtype=bool)
    else:
        den_f = _fabs(den)
        keep = den_f >= DENOMINATOR_FLOOR * den_f.max() if den_f.max() > 0 else den_f > 0
        safe = np.where(keep, 1, 0)
        if dps is None:
            ratio = np.asarray(num, dtype=float) / np.where(keep, den, 1.0)
        else:
            ratio = np.array(
                [n / dd if k else n for n, dd, k in zip(num, den, keep)], dtype=object
            )
        ratio_f = _fabs(ratio)
        with np.errstate(divide="ignore", invalid="ignore"):
            den_rel = noise * den_mass / np.where(safe, den_f, 1.0)
            err = noise * num_mass / np.where(safe, den_f, 1.0) + ratio_f * den_rel
        # a denominator lost in rounding makes ratio_f itself meaningless
        err = np.where(den_rel <= 1e-3, err, np.inf)
    if keep.sum() < 3:
        raise DegenerateSamplingError(
            f"{kind.value}(p={p}, m={m_eval!r}): only {int(keep.sum())} usable samples"
        )
    adequate = bool(np.all(err[keep] <= 0.1 * tol))
    return ratio, keep, adequate


def _median_and_dev(ratio, keep, dps):
    kept = ratio[keep]
    if dps is None:
        med = float(np.median(kept))
        return med, float(np.max(np.abs(kept - med)))
    ordered = sorted(kept)
    n = len(ordered)
    med = ordered[n // 2] if n % 2 else (ordered[n // 2 - 1] + ordered[n // 2]) / 2
    return float(med), float(max(abs(r - med) for r in kept))


@lru_cache(maxsize=4096)
def _extract(kind, p, m, samples, tol):
    if kind is Kind.Q:
        return IdentityConstant(kind, p, m, constant_Q(m), 0.0, 0, None, tol)
    if p == 1:
        # every index range is empty
        return IdentityConstant(kind, p, m, 0.0, 0.0, samples, None, tol)
    m_eval = ZERO_LIMIT_M if (m == 0.0 and kind in _DEGENERATE_AT_ZERO) else m
    bases = sample_bases(m_eval, samples)
    for dps in _PRECISION_LADDER:
        ratio, keep, adequate = _attempt(kind, p, m_eval, bases, dps, tol)
        if adequate:
            break
    else:
        raise DegenerateSamplingError(
            f"{kind.value}(p={p}, m={m!r}): identity not resolvable at "
            f"{_PRECISION_LADDER[-1]} digits"
        )
    value, dev = _median_and_dev(ratio, keep, dps)
    const = IdentityConstant(kind, p, m, value, dev, int(keep.sum()), dps, tol)
    if not const.valid:
        raise NonIdentityError(
            f"{kind.value}(p={p}, m={m!r}) is not constant: deviation {dev:.3g} > {tol:g}",
            const,
        )
    return const


def extract_constant(kind, p, m, samples=DEFAULT_SAMPLES, tol=DEFAULT_TOL):
    """Sample the identity defining ``kind`` and return its constant.

    Raises UsageError for an illegal (kind, p), DivergenceError for m = 1 with
    p > 1, DegenerateSamplingError when fewer than 3 samples are usable and
    NonIdentityError when the samples disagree by more than ``tol``.
    At m = 0 the ratios A, C, H, L are 0/0 and are taken as the limit m -> 0
    (evaluated at m = ZERO_LIMIT_M).
    """
    kind = Kind(kind)
    if not is_legal(kind, p):
        raise UsageError(f"constant {kind.value} is not defined for p={p}")
    m = float(m)
    if not 0.0 <= m <= 1.0:
        raise UsageError(f"m must lie in [0, 1], got {m!r}")
    if m == 1.0 and p > 1:
        raise DivergenceError(f"{kind.value}(p={p}) cannot be sampled at m = 1")
    if samples < 3:
        raise UsageError("need at least 3 samples")
    return _extract(kind, int(p), m, int(samples), float(tol))


def closed_form(kind, p, m):
    """Known closed-form value of a constant, or None."""
    kind = Kind(kind)
    if not is_legal(kind, p):
        return None
    m = float(m)
    if kind is Kind.Q:
        return 0.75 if m == 0.0 else None
    if m == 0.0:
        zero = {
            Kind.A: -(p - 1) * (p - 2) / 3,
            Kind.E: p * (p - 1) / 2,
            Kind.F: (p - 1) * (p - 2) / 6,
            Kind.G: 0.0,
            Kind.H: (p * p - 1) / 6,
            Kind.I: p * p / 4,
            Kind.J: p * (p - 2) / 4,
            Kind.L: (p - 1) * (p - 2) / 6,
        }
        if kind in zero:
            return float(zero[kind])
    if m == 1.0 and kind not in (Kind.B, Kind.C, Kind.D):
        return 0.0
    if p == 1 and kind is not Kind.D:
        return 0.0
    if m >= 1.0:
        return None
    if p == 3 and kind in (Kind.A, Kind.B, Kind.C, Kind.E, Kind.F, Kind.G, Kind.H):
        Q = constant_Q(m)
        return {
            Kind.A: 2 - 2 / Q,
            Kind.B: -m * Q,
            Kind.C: -1 / Q,
            Kind.E: 1 - m * Q + 2 * math.sqrt(1 - m * Q),
            Kind.F: (1 - Q) / Q,
            Kind.G: -m * (1 - m) * Q / (1 - m * Q),
            Kind.H: (1 - m * Q) / Q,
        }[kind]
    if p == 2:
        return {
            Kind.A: 0.0,
            Kind.E: math.sqrt(1 - m),
            Kind.I: math.sqrt(1 - m),
            Kind.F: 0.0,
            Kind.J: 0.0,
            Kind.L: 0.0,
        }.get(kind)
    if p == 4:
        r = (1 - m) ** 0.25
        return {
            Kind.A: -2 * math.sqrt(1 - m),
            Kind.E: 2 * r * (1 + r + r * r),
            Kind.F: r * r,
            Kind.L: r * r,
            Kind.I: 2 * r * (1 + r * r),
            Kind.J: 2 * r * r,
        }.get(kind)
    return None
