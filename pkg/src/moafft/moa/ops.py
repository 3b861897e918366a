"""Structural and pointwise operations as lazy expression nodes.

All structural operations act on axis 0; omega lifts them to other axes.
"""
from __future__ import annotations

import operator
from typing import Sequence

import numpy as np

from ..errors import ArityError, IndexBoundsError, ShapeError
from .core import ArrayExpr, as_expr, fmt_vec, gamma, gamma_inverse, pi, promote

_SYMBOLS = {operator.add: "+", operator.sub: "-", operator.mul: "×"}
_NAMED_OPS = {"+": operator.add, "-": operator.sub, "*": operator.mul, "×": operator.mul,
              "max": max, "min": min}


def _leading(expr: ArrayExpr, what: str) -> int:
    if not expr.shape:
        raise ShapeError(f"{what} needs an array of dimensionality >= 1")
    return expr.shape[0]


class _Axis0(ArrayExpr):
    """Node whose index rule only rewrites the first index component."""

    def rewrite(self, index):
        if not index:
            return None
        return self._rewrite0(index[0], index[1:])


class Take(_Axis0):
    def __init__(self, k: int, child: ArrayExpr):
        s0 = _leading(child, "take")
        if abs(k) > s0:
            raise IndexBoundsError(f"take {k} exceeds leading extent {s0}")
        self.k, self.child = int(k), child
        self.offset = s0 - abs(k) if k < 0 else 0
        self.shape = (abs(k),) + child.shape[1:]
        self.dtype = child.dtype

    def _rewrite0(self, i, rest):
        return (i + self.offset,) + rest, self.child

    def describe(self):
        return f"{self.k} Δ {_prefix_operand(self.child)}"


class Drop(_Axis0):
    def __init__(self, k: int, child: ArrayExpr):
        s0 = _leading(child, "drop")
        if abs(k) > s0:
            raise IndexBoundsError(f"drop {k} exceeds leading extent {s0}")
        self.k, self.child = int(k), child
        self.offset = k if k > 0 else 0
        self.shape = (s0 - abs(k),) + child.shape[1:]
        self.dtype = child.dtype

    def _rewrite0(self, i, rest):
        return (i + self.offset,) + rest, self.child

    def describe(self):
        return f"{self.k} ∇ {_prefix_operand(self.child)}"


class Reverse(_Axis0):
    def __init__(self, child: ArrayExpr):
        _leading(child, "reverse")
        self.child = child
        self.shape = child.shape
        self.dtype = child.dtype

    def _rewrite0(self, i, rest):
        return (self.shape[0] - i - 1,) + rest, self.child

    def describe(self):
        return f"Φ {_prefix_operand(self.child)}"


class Rotate(_Axis0):
    def __init__(self, k: int, child: ArrayExpr):
        _leading(child, "rotate")
        self.k, self.child = int(k), child
        self.shape = child.shape
        self.dtype = child.dtype

    def _rewrite0(self, i, rest):
        return ((i + self.k) % self.shape[0],) + rest, self.child

    def describe(self):
        return f"{self.k} θ {_prefix_operand(self.child)}"


class Catenate(_Axis0):
    def __init__(self, left: ArrayExpr, right: ArrayExpr):
        _leading(left, "catenate")
        _leading(right, "catenate")
        if left.shape[1:] != right.shape[1:]:
            raise ShapeError(f"catenate needs equal trailing shapes, got {fmt_vec(left.shape)} and {fmt_vec(right.shape)}")
        self.left, self.right = left, right
        self.shape = (left.shape[0] + right.shape[0],) + left.shape[1:]
        self.dtype = promote(left.dtype, right.dtype)

    def _rewrite0(self, i, rest):
        n = self.left.shape[0]
        if i < n:
            return (i,) + rest, self.left
        return (i - n,) + rest, self.right

    def describe(self):
        return f"{self.left.operand()} ++ {self.right.operand()}"


class Reshape(ArrayExpr):
    """Row-major reshape; the item count must not change."""

    def __init__(self, shape: Sequence[int], child: ArrayExpr):
        shape = tuple(int(s) for s in shape)
        if any(s < 0 for s in shape):
            raise ShapeError(f"negative reshape extent in {fmt_vec(shape)}")
        if pi(shape) != pi(child.shape):
            raise ShapeError(f"reshape to {fmt_vec(shape)} needs {pi(shape)} items, operand has {pi(child.shape)}")
        self.child = child
        self.shape = shape
        self.dtype = child.dtype

    def rewrite(self, index):
        if len(index) != len(self.shape):
            return None
        return gamma_inverse(self.child.shape, gamma(self.shape, index)), self.child

    def describe(self):
        return f"{fmt_vec(self.shape)} ρ̂ {_prefix_operand(self.child)}"


class Transpose(ArrayExpr):
    """Axis permutation: result axis ``i`` is operand axis ``perm[i]``."""

    def __init__(self, perm: Sequence[int], child: ArrayExpr):
        perm = tuple(int(p) for p in perm)
        if sorted(perm) != list(range(len(child.shape))):
            raise ArityError(f"{fmt_vec(perm)} is not a permutation of axes 0..{len(child.shape) - 1}")
        self.perm, self.child = perm, child
        self.shape = tuple(child.shape[p] for p in perm)
        self.dtype = child.dtype

    def rewrite(self, index):
        if len(index) != len(self.shape):
            return None
        src = [0] * len(index)
        for axis, p in enumerate(self.perm):
            src[p] = index[axis]
        return tuple(src), self.child

    def describe(self):
        return f"{fmt_vec(self.perm)} ⍉ {_prefix_operand(self.child)}"


class Pointwise(ArrayExpr):
    """Data-parallel application of a binary op, with scalar extension."""

    def __init__(self, op, left: ArrayExpr, right: ArrayExpr):
        if left.shape and right.shape and left.shape != right.shape:
            raise ShapeError(f"pointwise operands disagree: {fmt_vec(left.shape)} vs {fmt_vec(right.shape)}")
        self.op, self.left, self.right = op, left, right
        self.shape = left.shape or right.shape
        self.dtype = promote(left.dtype, right.dtype)

    def _item(self, index):
        a = self.left.item(index if self.left.shape else ())
        b = self.right.item(index if self.right.shape else ())
        value = self.op(a, b)
        return complex(value) if self.dtype == np.complex128 else int(value)

    def describe(self):
        sym = _SYMBOLS.get(self.op, getattr(self.op, "__name__", "f"))
        return f"{self.left.operand()} {sym} {self.right.operand()}"


class Reduce(ArrayExpr):
    """Fold ``op`` over axis 0 in ascending order."""

    def __init__(self, op, child: ArrayExpr, identity=None):
        s0 = _leading(child, "reduce")
        if s0 == 0 and identity is None:
            raise ShapeError("reduce over an empty axis needs an identity element")
        self.op, self.child, self.identity = op, child, identity
        self.shape = child.shape[1:]
        self.dtype = child.dtype

    def _item(self, index):
        n = self.child.shape[0]
        if n == 0:
            return self.identity
        acc = self.child.item((0,) + index)
        for i in range(1, n):
            acc = self.op(acc, self.child.item((i,) + index))
        return acc

    def describe(self):
        sym = _SYMBOLS.get(self.op, getattr(self.op, "__name__", "f"))
        return f"{sym}/ {_prefix_operand(self.child)}"


def _prefix(expr):
    return isinstance(expr, (Take, Drop, Reverse, Rotate, Reshape, Transpose, Reduce))


def _prefix_operand(expr):
    # prefix operators associate to the right, so "2 Δ Φ A" needs no parentheses
    return expr.describe() if expr.atomic or _prefix(expr) else expr.operand()


def _op(op):
    if isinstance(op, str):
        try:
            return _NAMED_OPS[op]
        except KeyError:
            raise ValueError(f"unknown operation {op!r}") from None
    return op


def take(k: int, expr) -> ArrayExpr:
    """First ``k`` slices along axis 0 (last ``|k|`` when ``k < 0``)."""
    return Take(k, as_expr(expr))


def drop(k: int, expr) -> ArrayExpr:
    """Remove the first ``k`` slices along axis 0 (last ``|k|`` when ``k < 0``)."""
    return Drop(k, as_expr(expr))


def reverse(expr) -> ArrayExpr:
    return Reverse(as_expr(expr))


def rotate(k: int, expr) -> ArrayExpr:
    """Cyclic shift along axis 0: ``(k drop u) ++ (k take u)`` for vectors."""
    return Rotate(k, as_expr(expr))


def catenate(left, right) -> ArrayExpr:
    return Catenate(as_expr(left), as_expr(right))


def reshape(shape: Sequence[int], expr) -> ArrayExpr:
    return Reshape(shape, as_expr(expr))


def ravel(expr) -> ArrayExpr:
    expr = as_expr(expr)
    return Reshape((pi(expr.shape),), expr)


def transpose(perm: Sequence[int], expr) -> ArrayExpr:
    return Transpose(perm, as_expr(expr))


def pointwise(op, left, right) -> ArrayExpr:
    return Pointwise(_op(op), as_expr(left), as_expr(right))


def reduce(op, expr, identity=None) -> ArrayExpr:
    return Reduce(_op(op), as_expr(expr), identity)


__all__ = [
    "Take", "Drop", "Reverse", "Rotate", "Catenate", "Reshape", "Transpose",
    "Pointwise", "Reduce", "take", "drop", "reverse", "rotate", "catenate",
    "reshape", "ravel", "transpose", "pointwise", "reduce",
]
