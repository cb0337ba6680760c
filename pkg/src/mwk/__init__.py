"""Exact computations in Grothendieck-Witt, Milnor and Milnor-Witt K-theory."""

from .errors import CapabilityError, DomainError, MWKError
from .exact import GF, QQ, Poly, RationalFunctionField, factor
from .fields import Extension, FieldMap, Place, Twist, make_extension, omega_label
from .gw import GWElement, gw_canonical, gw_equal, gw_invariants, witt_equal
from .km import KMSymbol, km_equal, km_residue, km_transfer
from .mw import (
    MWElement,
    bracket,
    eta,
    forgetful,
    from_gw,
    h_elem,
    mu_prime,
    mw_equal,
    mw_residue,
    mw_simplify,
    mw_specialize,
    n_eps_elem,
    sym,
)
from .sstrace import bezoutian, gw_transfer, ss_trace
from .transfer import mw_transfer, mw_transfer_bass_tate, quadratic_degree, reciprocity_check
from .chowwitt import Curve, QuadraticDivisor, a1_decompose, a1_lift, pb1_class, residue_lift, tdiv

__version__ = "0.1.0"

__all__ = [
    "CapabilityError",
    "DomainError",
    "MWKError",
    "GF",
    "QQ",
    "Poly",
    "RationalFunctionField",
    "factor",
    "Extension",
    "FieldMap",
    "Place",
    "Twist",
    "make_extension",
    "omega_label",
    "GWElement",
    "gw_canonical",
    "gw_equal",
    "gw_invariants",
    "witt_equal",
    "KMSymbol",
    "km_equal",
    "km_residue",
    "km_transfer",
    "MWElement",
    "bracket",
    "eta",
    "forgetful",
    "from_gw",
    "h_elem",
    "mu_prime",
    "mw_equal",
    "mw_residue",
    "mw_simplify",
    "mw_specialize",
    "n_eps_elem",
    "sym",
    "bezoutian",
    "gw_transfer",
    "ss_trace",
    "mw_transfer",
    "mw_transfer_bass_tate",
    "quadratic_degree",
    "reciprocity_check",
    "Curve",
    "QuadraticDivisor",
    "a1_decompose",
    "a1_lift",
    "pb1_class",
    "residue_lift",
    "tdiv",
]
