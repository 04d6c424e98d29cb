"""Sparse polynomials in per-site Jacobi variables s_i, c_i, d_i.

A term is ``coeff * m**k * prod_i s_i**a c_i**b d_i**e``.  The explicit power
of m lets one symbolic profile serve every m: differentiation produces new
factors of m (dn' = -m sn cn) and ``evaluate`` binds m last.

No reduction modulo cn**2 = 1 - sn**2 or dn**2 = 1 - m sn**2 is attempted;
polynomials stay in the form they were written in.

Text form, stable under round trip::

    -2*m*s1*c1*d1 + 0.5*d2^2 - 3
"""

from __future__ import annotations

import re
from collections import OrderedDict
from dataclasses import dataclass
from numbers import Real
from threading import Lock

import numpy as np

from .elliptic import Lattice, Spacing, backend, lattice_triples
from .errors import UsageError

MAX_EXPONENT = 16

_VARS = "scd"


@dataclass(frozen=True)
class EllipticMonomial:
    coeff: float
    m_power: int
    exponents: dict  # site -> (a, b, e)


def _check_exponents(exps):
    for site, a, b, e in exps:
        if max(a, b, e) > MAX_EXPONENT:
            raise ValueError(
                f"exponent above {MAX_EXPONENT} at site {site}: runaway symbolic growth"
            )


class EllipticPoly:
    """Immutable polynomial over the sites of a ``(p, spacing)`` lattice.

    Terms are kept in canonical form: like terms merged, exact zeros dropped,
    sorted by ``(m_power, exponents)``.
    """

    __slots__ = ("p", "spacing", "terms", "_hash")

    def __init__(self, terms, p, spacing):
        if int(p) != p or p < 1:
            raise UsageError(f"p must be a positive integer, got {p!r}")
        if not isinstance(spacing, Spacing):
            raise UsageError(f"spacing must be a Spacing, got {spacing!r}")
        merged = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for key, coeff in items:
            mp, exps = key
            if mp < 0:
                raise ValueError("negative power of m")
            exps = tuple(sorted(t for t in exps if t[1] or t[2] or t[3]))
            for t in exps:
                if not 1 <= t[0] <= p:
                    raise UsageError(f"site {t[0]} outside 1..{p}")
            merged[(mp, exps)] = merged.get((mp, exps), 0.0) + float(coeff)
        self.p = int(p)
        self.spacing = spacing
        self.terms = tuple(sorted((k, c) for k, c in merged.items() if c != 0.0))
        self._hash = None

    # construction helpers

    @classmethod
    def constant(cls, value, p, spacing):
        return cls({(0, ()): value}, p, spacing)

    @classmethod
    def variable(cls, name, site, p, spacing):
        if name not in _VARS:
            raise ValueError(f"unknown variable {name!r}")
        exps = [0, 0, 0]
        exps[_VARS.index(name)] = 1
        return cls({(0, ((site, *exps),)): 1.0}, p, spacing)

    def _same_layout(self, other):
        if isinstance(other, Real):
            return EllipticPoly.constant(float(other), self.p, self.spacing)
        if not isinstance(other, EllipticPoly):
            return NotImplemented
        if (other.p, other.spacing) != (self.p, self.spacing):
            raise UsageError(
                f"lattice mismatch: (p={self.p}, {self.spacing.name}) vs "
                f"(p={other.p}, {other.spacing.name})"
            )
        return other

    # arithmetic

    def __add__(self, other):
        other = self._same_layout(other)
        if other is NotImplemented:
            return other
        return EllipticPoly(self.terms + other.terms, self.p, self.spacing)

    __radd__ = __add__

    def __neg__(self):
        return EllipticPoly([(k, -c) for k, c in self.terms], self.p, self.spacing)

    def __sub__(self, other):
        other = self._same_layout(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Real):
            return EllipticPoly(
                [(k, c * float(other)) for k, c in self.terms], self.p, self.spacing
            )
        other = self._same_layout(other)
        if other is NotImplemented:
            return other
        out = {}
        for (mp1, e1), c1 in self.terms:
            for (mp2, e2), c2 in other.terms:
                key = (mp1 + mp2, _mul_exponents(e1, e2))
                out[key] = out.get(key, 0.0) + c1 * c2
        for _, exps in out:
            _check_exponents(exps)
        return EllipticPoly(out, self.p, self.spacing)

    __rmul__ = __mul__

    def __pow__(self, n):
        if int(n) != n or n < 0:
            raise ValueError("only non-negative integer powers")
        result = EllipticPoly.constant(1.0, self.p, self.spacing)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, EllipticPoly):
            return NotImplemented
        return (self.p, self.spacing, self.terms) == (other.p, other.spacing, other.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.spacing, self.terms))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"EllipticPoly({to_text(self)!r}, p={self.p}, spacing={self.spacing.name})"

    def __str__(self):
        return to_text(self)

    def monomials(self):
        return [
            EllipticMonomial(c, mp, {t[0]: t[1:] for t in exps})
            for (mp, exps), c in self.terms
        ]

    def map_coefficients(self, fn):
        return EllipticPoly([(k, fn(c)) for k, c in self.terms], self.p, self.spacing)


def _mul_exponents(e1, e2):
    if not e1:
        return e2
    if not e2:
        return e1
    acc = {t[0]: list(t[1:]) for t in e1}
    for site, a, b, e in e2:
        if site in acc:
            x = acc[site]
            x[0] += a
            x[1] += b
            x[2] += e
        else:
            acc[site] = [a, b, e]
    return tuple(sorted((site, *v) for site, v in acc.items()))


class SiteRing:
    """Factory for polynomials over one lattice layout."""

    def __init__(self, p, spacing):
        self.p = p
        self.spacing = spacing

    def const(self, value):
        return EllipticPoly.constant(value, self.p, self.spacing)

    @property
    def zero(self):
        return EllipticPoly({}, self.p, self.spacing)

    @property
    def m(self):
        return EllipticPoly({(1, ()): 1.0}, self.p, self.spacing)

    def s(self, i):
        return EllipticPoly.variable("s", i, self.p, self.spacing)

    def c(self, i):
        return EllipticPoly.variable("c", i, self.p, self.spacing)

    def d(self, i):
        return EllipticPoly.variable("d", i, self.p, self.spacing)


# -- the operations -----------------------------------------------------------


def poly_add(a, b):
    return a + b


def poly_mul(a, b):
    return a * b


def differentiate(a):
    """d/dxi, every site's argument having unit derivative in xi.

    s' = c d,  c' = -s d,  d' = -m s c.
    """
    out = {}
    for (mp, exps), coeff in a.terms:
        for pos, (site, sa, sb, se) in enumerate(exps):
            rest = exps[:pos] + exps[pos + 1 :]
            if sa:
                key = (mp, _mul_exponents(rest, ((site, sa - 1, sb + 1, se + 1),)))
                out[key] = out.get(key, 0.0) + coeff * sa
            if sb:
                key = (mp, _mul_exponents(rest, ((site, sa + 1, sb - 1, se + 1),)))
                out[key] = out.get(key, 0.0) - coeff * sb
            if se:
                key = (mp + 1, _mul_exponents(rest, ((site, sa + 1, sb + 1, se - 1),)))
                out[key] = out.get(key, 0.0) - coeff * se
    for _, exps in out:
        _check_exponents(exps)
    return EllipticPoly(out, a.p, a.spacing)


class SiteValues:
    """Jacobi values at every site of a lattice, with a monomial cache.

    Several polynomials over the same lattice, m and base arguments (for
    instance the profiles of one family at different alpha, beta, sign)
    share monomial evaluations through the cache.
    """

    def __init__(self, p, spacing, m, base, dps=None):
        self.be = backend(dps)
        self.p = p
        self.spacing = spacing
        self.triples = lattice_triples(Lattice(p, spacing, m, base), dps)
        self.m = self.be.scalar(m)
        self.shape = np.shape(base)
        self._powers = {}
        self._mono = {}
        self._absf = {}
        self._values = {}
        self._lock = Lock()

    def _power(self, var, site, n):
        key = (var, site, n)
        val = self._powers.get(key)
        if val is None:
            x = self.triples[site - 1][var]
            val = x if n == 1 else self._power(var, site, n - 1) * x
            self._powers[key] = val
        return val

    def monomial(self, exps):
        val = self._mono.get(exps)
        if val is None:
            val = None
            for site, a, b, e in exps:
                for var, n in ((0, a), (1, b), (2, e)):
                    if n:
                        f = self._power(var, site, n)
                        val = f if val is None else val * f
            if val is None:
                val = 1
            with self._lock:
                self._mono[exps] = val
        return val

    def _abs_float(self, exps):
        val = self._absf.get(exps)
        if val is None:
            val = np.abs(np.asarray(self.monomial(exps), dtype=float))
            with self._lock:
                self._absf[exps] = val
        return val

    def _check(self, poly):
        if (poly.p, poly.spacing) != (self.p, self.spacing):
            raise UsageError(
                f"polynomial layout (p={poly.p}, {poly.spacing.name}) does not match "
                f"lattice (p={self.p}, {self.spacing.name})"
            )

    def value(self, poly):
        """Sum of terms in canonical order, left to right.

        Values are cached up to an overall factor, so rescaled copies of one
        polynomial (a family at several amplitudes) are summed once.
        """
        self._check(poly)
        if not poly.terms:
            return _broadcast(0, self.shape, self.be)
        lead = poly.terms[0][1]
        key = tuple((k, c / lead) for k, c in poly.terms)
        val = self._values.get(key)
        if val is None:
            val = self._sum(key)
            with self._lock:
                self._values[key] = val
        return _scale(val, self.be.scalar(lead))

    def _sum(self, terms):
        acc = 0
        for (mp, exps), coeff in terms:
            k = coeff * self.m**mp if mp else coeff
            # array on the left: mpf * ndarray goes through a slow conversion
            acc = acc + _scale(self.monomial(exps), k)
        return _broadcast(acc, self.shape, self.be)

    def magnitude(self, poly):
        """Sum of absolute term values, the scale of rounding in ``value``."""
        self._check(poly)
        acc = 0.0
        mf = float(self.m)
        for (mp, exps), coeff in poly.terms:
            acc = acc + abs(coeff) * mf**mp * self._abs_float(exps)
        return np.broadcast_to(np.asarray(acc, dtype=float), self.shape).copy()


def _scale(x, k):
    return x * k if isinstance(x, np.ndarray) else k * x


def _broadcast(acc, shape, be):
    if shape == ():
        return acc
    if isinstance(acc, np.ndarray) and acc.shape == shape:
        return acc
    if be.dps is None:
        return np.broadcast_to(np.asarray(acc, dtype=float), shape).copy()
    out = np.empty(shape, dtype=object)
    out[...] = be.scalar(acc) if not isinstance(acc, np.ndarray) else acc
    return out


_SITE_CACHE = OrderedDict()
_SITE_CACHE_LOCK = Lock()
_SITE_CACHE_SIZE = 64


def site_values(p, spacing, m, base, dps=None):
    """Cached ``SiteValues`` keyed by layout, m, base arguments and precision.

    With ``dps`` the base may hold mpmath numbers; those are used exactly and
    bypass the cache.
    """
    if dps is not None and np.asarray(base).dtype == object:
        return SiteValues(p, spacing, m, np.asarray(base), dps)
    arr = np.array(base, dtype=float)
    key = (p, spacing, float(m), arr.shape, arr.tobytes(), dps)
    with _SITE_CACHE_LOCK:
        hit = _SITE_CACHE.get(key)
        if hit is not None:
            _SITE_CACHE.move_to_end(key)
            return hit
    sv = SiteValues(p, spacing, m, arr if arr.ndim else float(arr), dps)
    with _SITE_CACHE_LOCK:
        _SITE_CACHE[key] = sv
        while len(_SITE_CACHE) > _SITE_CACHE_SIZE:
            _SITE_CACHE.popitem(last=False)
    return sv


def clear_site_cache():
    with _SITE_CACHE_LOCK:
        _SITE_CACHE.clear()


def evaluate(a, base, m, dps=None):
    """Value of ``a`` with site i at argument ``base + (i-1)*spacing``, parameter m."""
    if not a.terms:
        return np.zeros(np.shape(base)) if np.ndim(base) else 0.0
    return site_values(a.p, a.spacing, m, base, dps).value(a)


# -- text form ----------------------------------------------------------------


def _format_coeff(c):
    if c == int(c) and abs(c) < 1e15:
        return str(int(c))
    return repr(c)


def _term_text(key, coeff):
    mp, exps = key
    factors = []
    if mp:
        factors.append("m" if mp == 1 else f"m^{mp}")
    for site, a, b, e in exps:
        for name, n in zip(_VARS, (a, b, e)):
            if n:
                factors.append(f"{name}{site}" if n == 1 else f"{name}{site}^{n}")
    mag = abs(coeff)
    if factors and mag == 1.0:
        body = "*".join(factors)
    else:
        body = "*".join([_format_coeff(mag)] + factors)
    return ("-" if coeff < 0 else "+"), body


def to_text(a):
    if not a.terms:
        return "0"
    parts = []
    for i, (key, coeff) in enumerate(a.terms):
        sign, body = _term_text(key, coeff)
        if i == 0:
            parts.append(body if sign == "+" else "-" + body)
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


_FACTOR = re.compile(r"^(?:(m)|([scd])(\d+))(?:\^(\d+))?$")


def parse_poly(text, p, spacing):
    """Inverse of ``to_text``."""
    text = text.strip()
    if text == "0":
        return EllipticPoly({}, p, spacing)
    pieces = re.split(r"\s+([+-])\s+", text)
    signs = ["+"] + pieces[1::2]
    bodies = pieces[0::2]
    terms = []
    for sign, body in zip(signs, bodies):
        coeff = -1.0 if sign == "-" else 1.0
        if body.startswith("-"):
            coeff, body = -coeff, body[1:]
        mp = 0
        exps = {}
        for j, factor in enumerate(body.split("*")):
            match = _FACTOR.match(factor)
            if match is None:
                if j:
                    raise ValueError(f"cannot parse factor {factor!r}")
                coeff *= float(factor)
                continue
            power = int(match.group(4) or 1)
            if match.group(1):
                mp += power
            else:
                site = int(match.group(3))
                slot = exps.setdefault(site, [0, 0, 0])
                slot[_VARS.index(match.group(2))] += power
        terms.append(((mp, tuple((s, *v) for s, v in exps.items())), coeff))
    return EllipticPoly(terms, p, spacing)
