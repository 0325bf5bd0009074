"""Reflected and commuting differential operators for adelic bispectral wave functions."""

from .arith import I, MultiPoly, RatFunc, Scalar
from .concom import concomitant, vanishing_conditions
from .diffop import DiffOp, QuasiExp, compose, formal_adjoint
from .fourier import AnsatzCaps, CapsInsufficient, b_inverse, dimension_table, find_pairs
from .kernelver import cd_kernel, spectral_element, verify_commutation_fourier, verify_reflection_symbolic
from .reflector import find_reflected, find_universal, rotate_to_commuting
from .textio import format_operator, parse_expr, parse_operator
from .wavefun import ValidationError, WaveFunction, involution, load_spec, validate

__all__ = [
    "AnsatzCaps", "CapsInsufficient", "DiffOp", "I", "MultiPoly", "QuasiExp", "RatFunc", "Scalar",
    "ValidationError", "WaveFunction", "b_inverse", "cd_kernel", "compose", "concomitant",
    "dimension_table", "find_pairs", "find_reflected", "find_universal", "format_operator",
    "formal_adjoint", "involution", "load_spec", "parse_expr", "parse_operator", "rotate_to_commuting",
    "spectral_element", "validate", "vanishing_conditions", "verify_commutation_fourier",
    "verify_reflection_symbolic",
]
