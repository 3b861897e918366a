"""Shapes, row-major gamma, and the psi indexing function.

Arrays are ``{shape, items}`` pairs with items in lexicographic (row major)
order. Every lazy expression node knows its shape without touching item
values; psi indexing walks the node chain, rewriting the index at each
node until it reaches a node that can produce the item directly.
"""
from __future__ import annotations

import itertools
import math
import operator
from typing import Callable, Iterable, Sequence

import numpy as np

from ..errors import ArityError, IndexBoundsError, ShapeError

Index = tuple[int, ...]


def as_shape(dims: Iterable[int]) -> tuple[int, ...]:
    shape = tuple(int(d) for d in dims)
    if any(d < 0 for d in shape):
        raise ShapeError(f"shape components must be non-negative: {shape}")
    return shape


def pi(v: Iterable[int]) -> int:
    """Product of the components of ``v``; 1 for the empty vector."""
    return math.prod(int(c) for c in v)


def gamma(shape: Sequence[int], index: Sequence[int]) -> int:
    """Row-major offset of a full index.

    Uses the recurrence ``x_0 = p_0``, ``x_j = x_{j-1} * s_j + p_j``.
    The scalar shape ``<>`` has the single offset 0.
    """
    shape = tuple(shape)
    index = tuple(index)
    if len(index) != len(shape):
        raise ArityError(f"full index for shape {fmt_vec(shape)} needs {len(shape)} components, got {len(index)}")
    _check_bounds(shape, index)
    offset = 0
    for s, p in zip(shape, index):
        offset = offset * s + p
    return offset


def gamma_inverse(shape: Sequence[int], offset: int) -> Index:
    shape = tuple(shape)
    offset = int(offset)
    if not 0 <= offset < pi(shape):
        raise IndexBoundsError(f"offset {offset} outside [0, {pi(shape)}) for shape {fmt_vec(shape)}")
    out = []
    for s in reversed(shape):
        offset, p = divmod(offset, s)
        out.append(p)
    return tuple(reversed(out))


def _check_bounds(shape, index):
    for axis, (s, p) in enumerate(zip(shape, index)):
        if not 0 <= p < s:
            raise IndexBoundsError(f"index component {p} on axis {axis} outside [0, {s})")


def fmt_vec(v: Iterable) -> str:
    return "⟨" + " ".join(str(c) for c in v) + "⟩"


def _dtype_of(values: np.ndarray) -> np.dtype:
    if values.dtype.kind in "biu":
        return np.dtype(np.int64)
    if values.dtype.kind in "fc":
        return np.dtype(np.complex128)
    raise TypeError(f"unsupported element type {values.dtype}")


def promote(*dtypes) -> np.dtype:
    if any(np.dtype(d) == np.complex128 for d in dtypes):
        return np.dtype(np.complex128)
    return np.dtype(np.int64)


class ArrayExpr:
    """A lazily evaluated array expression.

    Subclasses set ``shape`` and ``dtype`` at construction and implement
    either :meth:`rewrite` (an index rewrite onto a child node) or
    :meth:`_item` (direct production of a scalar).
    """

    shape: tuple[int, ...]
    dtype: np.dtype
    #: whether ``describe`` output can follow a prefix operator unparenthesised
    atomic = False

    def rewrite(self, index: Index) -> tuple[Index, "ArrayExpr"] | None:
        return None

    def _item(self, index: Index):
        raise NotImplementedError(type(self).__name__)

    def item(self, index: Sequence[int]):
        """Scalar at a full index, following rewrites down to a producing node."""
        expr, idx = self, tuple(index)
        while True:
            step = expr.rewrite(idx)
            if step is None:
                return expr._item(idx)
            idx, expr = step

    def describe(self) -> str:
        return type(self).__name__

    def operand(self) -> str:
        text = self.describe()
        return text if self.atomic else f"({text})"

    def __repr__(self):
        return f"<{type(self).__name__} shape={fmt_vec(self.shape)} {self.describe()}>"

    # pointwise operators build lazy nodes
    def __add__(self, other):
        from .ops import pointwise
        return pointwise(operator.add, self, other)

    def __radd__(self, other):
        from .ops import pointwise
        return pointwise(operator.add, other, self)

    def __sub__(self, other):
        from .ops import pointwise
        return pointwise(operator.sub, self, other)

    def __rsub__(self, other):
        from .ops import pointwise
        return pointwise(operator.sub, other, self)

    def __mul__(self, other):
        from .ops import pointwise
        return pointwise(operator.mul, self, other)

    def __rmul__(self, other):
        from .ops import pointwise
        return pointwise(operator.mul, other, self)

    def __neg__(self):
        from .ops import pointwise
        return pointwise(operator.mul, -1, self)


class MoaArray(ArrayExpr):
    """Materialized array: a shape plus its row-major item vector.

    Items are stored as int64 or complex128 and are read-only.
    """

    def __init__(self, shape: Iterable[int], items, name: str | None = None):
        shape = as_shape(shape)
        values = np.array(items).reshape(-1)
        if values.size == 0 and values.dtype == np.float64:
            values = values.astype(np.int64)
        values = values.astype(_dtype_of(values), copy=False)
        if values.size != pi(shape):
            raise ShapeError(f"{values.size} items do not fill shape {fmt_vec(shape)} (needs {pi(shape)})")
        values.setflags(write=False)
        self.shape = shape
        self.items = values
        self.dtype = values.dtype
        self.name = name

    atomic = True

    def _item(self, index):
        offset = 0
        for s, p in zip(self.shape, index):
            offset = offset * s + p
        return self.items[offset].item()

    def describe(self):
        if self.name:
            return self.name
        if not self.shape:
            return str(self.items[0].item())
        return f"array{fmt_vec(self.shape)}"

    def to_numpy(self) -> np.ndarray:
        return self.items.reshape(self.shape)

    def tolist(self):
        return self.to_numpy().tolist()

    def __eq__(self, other):
        if not isinstance(other, MoaArray):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.items, other.items)

    __hash__ = None


class Select(ArrayExpr):
    """Lazy partial-index selection ``prefix psi child``."""

    def __init__(self, prefix: Sequence[int], child: ArrayExpr):
        prefix = tuple(int(c) for c in prefix)
        if len(prefix) > len(child.shape):
            raise ArityError(f"index {fmt_vec(prefix)} longer than dimensionality {len(child.shape)}")
        _check_bounds(child.shape, prefix)
        self.prefix = prefix
        self.child = child
        self.shape = child.shape[len(prefix):]
        self.dtype = child.dtype

    atomic = True

    def rewrite(self, index):
        return self.prefix + index, self.child

    def describe(self):
        return f"{fmt_vec(self.prefix)}ψ{self.child.operand()}"


def as_expr(value) -> ArrayExpr:
    """Wrap a Python/numpy scalar as a scalar array; pass expressions through."""
    if isinstance(value, ArrayExpr):
        return value
    arr = np.asarray(value)
    return MoaArray(arr.shape, arr.reshape(-1))


def array(items, shape: Iterable[int] | None = None, name: str | None = None) -> MoaArray:
    """Build an array from nested sequences, or from a flat item list plus shape."""
    values = np.asarray(items)
    if shape is None:
        shape = values.shape
    return MoaArray(shape, values.reshape(-1), name=name)


def iota(n: int) -> MoaArray:
    """The vector ``<0 1 ... n-1>``."""
    if n < 0:
        raise ShapeError("iota needs n >= 0")
    return MoaArray((n,), np.arange(n, dtype=np.int64))


def rho(expr: ArrayExpr) -> tuple[int, ...]:
    return as_expr(expr).shape


def delta(expr: ArrayExpr) -> int:
    return len(as_expr(expr).shape)


def tau(expr: ArrayExpr) -> int:
    return pi(as_expr(expr).shape)


def all_indices(shape: Sequence[int]) -> Iterable[Index]:
    """Every full index of ``shape`` in lexicographic order."""
    return itertools.product(*(range(s) for s in shape))


def materialize(expr: ArrayExpr) -> MoaArray:
    """Evaluate every item of ``expr`` into a :class:`MoaArray`."""
    expr = as_expr(expr)
    if isinstance(expr, MoaArray):
        return expr
    fast = getattr(expr, "_materialize", None)
    if fast is not None:
        return fast()
    items = np.array([expr.item(idx) for idx in all_indices(expr.shape)], dtype=expr.dtype)
    return MoaArray(expr.shape, items)


def psi(index: Sequence[int], expr: ArrayExpr, trace: list[str] | None = None):
    """Index ``expr`` with a full or partial index.

    A full index yields a scalar; a partial index of length ``k`` yields the
    sub-array of shape ``k drop shape``; the empty index yields the whole
    array. Index rewrites are applied node by node (psi reduction); when
    ``trace`` is a list, each rewritten form is appended to it as text.
    """
    expr = as_expr(expr)
    idx = tuple(int(c) for c in index)
    if len(idx) > len(expr.shape):
        raise ArityError(f"index {fmt_vec(idx)} longer than dimensionality {len(expr.shape)}")
    _check_bounds(expr.shape, idx)
    if trace is not None:
        trace.append(f"{fmt_vec(idx)}ψ{expr.operand()}")
    while True:
        step = expr.rewrite(idx)
        if step is None:
            break
        idx, expr = step
        if trace is not None:
            trace.append(f"= {fmt_vec(idx)}ψ{expr.operand()}")
    if len(idx) == len(expr.shape):
        return expr._item(idx)
    if not idx:
        return materialize(expr)
    return materialize(Select(idx, expr))


BinaryOp = Callable[[object, object], object]
