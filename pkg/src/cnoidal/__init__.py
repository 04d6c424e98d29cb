"""Periodic KdV and mKdV travelling waves built from lattice sums of Jacobi
elliptic functions, with numerical certification of the identities behind
them and of the PDE residuals."""

from .algebra import EllipticPoly, SiteRing, differentiate, evaluate, parse_poly, to_text
from .constants import IdentityConstant, Kind, closed_form, constant_Q, extract_constant
from .elliptic import EllipticTriple, Lattice, Spacing, complete_K, jacobi, lattice_triples
from .errors import (
    CnoidalError, DegenerateSamplingError, DivergenceError, DomainError,
    NonIdentityError, UsageError,
)
from .solutions import WaveFamily, WaveSolution, build, eval_solution, miura, velocity
from .verify import ResidualReport, derivative_crosscheck, residual, residual_scan

__version__ = "0.1.0"


def clear_caches():
    """Drop memoised constants and lattice values (for cold timings)."""
    from . import algebra, constants

    constants._extract.cache_clear()
    algebra.clear_site_cache()
