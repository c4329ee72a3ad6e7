"""Exact checks that a (0,5)-tensor with the symmetries of a covariant
derivative of curvature is recovered from its polarized Cartan-trick
identity, and a numerical lab computing that derivative for explicit
metrics."""

from .perm import PermOperator, builtin_operators, op_apply, op_compose, phi, psi
from .symclass import SymmetryClassBasis, constraint_operators, is_in_class, symmetry_basis
from .tensor import DenseTensor, inf_norm, linear_combine, permute, tensor_new

__version__ = "0.1.0"
