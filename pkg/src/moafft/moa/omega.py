"""The higher-order omega operator: apply a function over array cells.

A unary ``f`` with cell dimensionality ``sigma`` is applied to every
``sigma``-dimensional cell of its argument; the leading axes form the
frame. A binary ``g`` pairs cells of two arguments whose frames agree on
a shared suffix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import CellShapeError, ShapeError
from .core import (ArrayExpr, MoaArray, Select, all_indices, as_expr, fmt_vec, pi)


@dataclass(frozen=True)
class OmegaFrame:
    """Frame/cell decomposition of omega's argument shapes.

    Unary: ``shape = u ++ z``; binary: ``shape_l = u ++ x ++ y`` and
    ``shape_r = v ++ x ++ z``. ``w`` is the shape of each result cell.
    """

    sigmas: tuple[int, ...]
    u: tuple[int, ...]
    v: tuple[int, ...]
    x: tuple[int, ...]
    y: tuple[int, ...]
    z: tuple[int, ...]
    w: tuple[int, ...]

    @property
    def result_shape(self) -> tuple[int, ...]:
        return self.u + self.v + self.x + self.w


def _zero_cell(shape, dtype) -> MoaArray:
    # stands in for a cell when the frame is empty; only its shape matters
    return MoaArray(shape, np.zeros(pi(shape), dtype=dtype))


class OmegaUnary(ArrayExpr):
    def __init__(self, f: Callable, sigma: int, xi: ArrayExpr):
        sigma = int(sigma)
        d = len(xi.shape)
        if sigma < 0 or d < sigma:
            raise ShapeError(f"cell dimensionality {sigma} invalid for an argument of dimensionality {d}")
        self.f, self.xi = f, xi
        u = xi.shape[:d - sigma]
        z = xi.shape[d - sigma:]
        if pi(u) > 0:
            first = self._cell(tuple(0 for _ in u))
        else:
            first = as_expr(f(_zero_cell(z, xi.dtype)))
        self.frame = OmegaFrame((sigma,), u, (), (), (), z, first.shape)
        self.shape = self.frame.result_shape
        self.dtype = first.dtype

    def _cell(self, i) -> ArrayExpr:
        return as_expr(self.f(Select(i, self.xi)))

    def _checked_cell(self, i) -> ArrayExpr:
        cell = self._cell(i)
        if cell.shape != self.frame.w:
            raise CellShapeError(
                f"cell {fmt_vec(i)} produced shape {fmt_vec(cell.shape)}, first cell produced {fmt_vec(self.frame.w)}")
        return cell

    def _item(self, index):
        k = len(self.frame.u)
        return self._checked_cell(index[:k]).item(index[k:])

    def _materialize(self) -> MoaArray:
        items = []
        for i in all_indices(self.frame.u):
            cell = self._checked_cell(i)
            items.extend(cell.item(j) for j in all_indices(self.frame.w))
        return MoaArray(self.shape, np.array(items, dtype=self.dtype))

    def describe(self):
        name = getattr(self.f, "__name__", "f")
        return f"({name} Ω{fmt_vec(self.frame.sigmas)}) {self.xi.operand()}"


class OmegaBinary(ArrayExpr):
    def __init__(self, g: Callable, sigmas: Sequence[int], left: ArrayExpr, right: ArrayExpr):
        sl, sr = (int(s) for s in sigmas)
        dl, dr = len(left.shape), len(right.shape)
        if sl < 0 or sr < 0 or dl < sl or dr < sr:
            raise ShapeError(f"cell dimensionalities {fmt_vec((sl, sr))} invalid for arguments of "
                             f"dimensionality {dl} and {dr}")
        frame_l = left.shape[:dl - sl]
        frame_r = right.shape[:dr - sr]
        m = min(len(frame_l), len(frame_r))
        shared_l = frame_l[len(frame_l) - m:]
        shared_r = frame_r[len(frame_r) - m:]
        if shared_l != shared_r:
            raise ShapeError(f"frames disagree: {fmt_vec(shared_l)} vs {fmt_vec(shared_r)}")
        self.g, self.left, self.right = g, left, right
        u, v, x = frame_l[:len(frame_l) - m], frame_r[:len(frame_r) - m], shared_l
        y, z = left.shape[dl - sl:], right.shape[dr - sr:]
        if pi(u) and pi(v) and pi(x):
            first = self._cell(tuple(0 for _ in u), tuple(0 for _ in v), tuple(0 for _ in x))
        else:
            first = as_expr(g(_zero_cell(y, left.dtype), _zero_cell(z, right.dtype)))
        self.frame = OmegaFrame((sl, sr), u, v, x, y, z, first.shape)
        self.shape = self.frame.result_shape
        self.dtype = first.dtype

    def _cell(self, i, j, k) -> ArrayExpr:
        return as_expr(self.g(Select(i + k, self.left), Select(j + k, self.right)))

    def _split(self, index):
        fr = self.frame
        a, b, c = len(fr.u), len(fr.u) + len(fr.v), len(fr.u) + len(fr.v) + len(fr.x)
        return index[:a], index[a:b], index[b:c], index[c:]

    def _checked_cell(self, i, j, k) -> ArrayExpr:
        cell = self._cell(i, j, k)
        if cell.shape != self.frame.w:
            raise CellShapeError(
                f"cell {fmt_vec(i + j + k)} produced shape {fmt_vec(cell.shape)}, "
                f"first cell produced {fmt_vec(self.frame.w)}")
        return cell

    def _item(self, index):
        i, j, k, rest = self._split(index)
        return self._checked_cell(i, j, k).item(rest)

    def _materialize(self) -> MoaArray:
        fr = self.frame
        items = []
        for frame_idx in all_indices(fr.u + fr.v + fr.x):
            i, j, k, _ = self._split(frame_idx)
            cell = self._checked_cell(i, j, k)
            items.extend(cell.item(c) for c in all_indices(fr.w))
        return MoaArray(self.shape, np.array(items, dtype=self.dtype))

    def describe(self):
        name = getattr(self.g, "__name__", "g")
        return f"{self.left.operand()} ({name} Ω{fmt_vec(self.frame.sigmas)}) {self.right.operand()}"


def omega_unary(f: Callable, sigma: int, xi) -> OmegaUnary:
    """Apply ``f`` to every ``sigma``-dimensional cell of ``xi``.

    ``f`` receives each cell as a lazy expression and returns an array
    expression or a scalar; every cell must give the same result shape.
    """
    return OmegaUnary(f, sigma, as_expr(xi))


def omega_binary(g: Callable | str, sigmas: Sequence[int], left, right) -> OmegaBinary:
    """Apply ``g`` to paired cells of ``left`` and ``right``.

    ``g`` may be one of the named operations of :func:`pointwise`
    (``"+"``, ``"-"``, ``"*"``, ...), applied to the two cells.
    """
    from .ops import _op
    return OmegaBinary(_op(g), sigmas, as_expr(left), as_expr(right))
