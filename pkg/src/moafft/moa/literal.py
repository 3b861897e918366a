"""Textual array literals: ``shape: 3 5 4 / items: 0 1 2 ...``."""
import numpy as np

from ..errors import ShapeError
from .core import MoaArray, materialize


def parse_literal(text: str, name: str | None = None) -> MoaArray:
    """Parse a literal; items may be integers or Python complex syntax (``1+2j``)."""
    try:
        head, tail = text.split("/", 1)
        key_s, shape_s = head.split(":", 1)
        key_i, items_s = tail.split(":", 1)
    except ValueError:
        raise ShapeError(f"malformed array literal: {text!r}") from None
    if key_s.strip() != "shape" or key_i.strip() != "items":
        raise ShapeError(f"malformed array literal: {text!r}")
    shape = [int(tok) for tok in shape_s.split()]
    tokens = items_s.split()
    if all(_is_int(tok) for tok in tokens):
        items = np.array([int(tok) for tok in tokens], dtype=np.int64)
    else:
        items = np.array([complex(tok) for tok in tokens], dtype=np.complex128)
    return MoaArray(shape, items, name=name)


def format_literal(expr) -> str:
    arr = materialize(expr)
    shape = " ".join(str(s) for s in arr.shape)
    items = " ".join(_fmt(v) for v in arr.items.tolist())
    return f"shape: {shape} / items: {items}"


def _is_int(tok):
    try:
        int(tok)
    except ValueError:
        return False
    return True


def _fmt(v):
    if isinstance(v, complex):
        return repr(v).strip("()")
    return str(v)
