"""Mathematics of Arrays: shapes, gamma, psi indexing and lazy array operations."""
from .core import (ArrayExpr, MoaArray, Select, all_indices, array, as_expr, delta,
                   fmt_vec, gamma, gamma_inverse, iota, materialize, pi, psi, rho, tau)
from .literal import format_literal, parse_literal
from .omega import OmegaBinary, OmegaFrame, OmegaUnary, omega_binary, omega_unary
from .ops import (catenate, drop, pointwise, ravel, reduce, reshape, reverse, rotate,
                  take, transpose)


def shape_primitives(expr) -> dict:
    """``rho``, ``delta`` and ``tau`` of an expression in one mapping."""
    return {"rho": rho(expr), "delta": delta(expr), "tau": tau(expr)}


__all__ = [
    "ArrayExpr", "MoaArray", "Select", "OmegaFrame", "OmegaUnary", "OmegaBinary",
    "all_indices", "array", "as_expr", "catenate", "delta", "drop", "fmt_vec",
    "format_literal", "gamma", "gamma_inverse", "iota", "materialize", "omega_binary",
    "omega_unary", "parse_literal", "pi", "pointwise", "psi", "ravel", "reduce",
    "reshape", "reverse", "rho", "rotate", "shape_primitives", "take", "tau", "transpose",
]
