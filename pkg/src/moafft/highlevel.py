"""The transform written directly as array-algebra expressions.

Each stage views the data as an ``r x 2 x L/2`` array and applies the
butterfly to every ``2 x L/2`` cell with omega:

    cell -> (lo + w*hi) ++ (lo - w*hi),   lo = <0> psi cell, hi = <1> psi cell

Every stage is materialized before the next, so the cost is O(n log n)
item evaluations; it serves as an executable reference for small ``n``.
"""
import numpy as np

from .fftseq import as_signal, bit_reversal_permutation, log2_exact, make_weights
from .moa import (MoaArray, Select, catenate, materialize, omega_unary, ravel,
                  reshape)


def butterfly_cell(weights: MoaArray):
    def butterfly(cell):
        lo, hi = Select((0,), cell), Select((1,), cell)
        c = weights * hi
        h = weights.shape[0]
        return catenate(reshape((1, h), lo + c), reshape((1, h), lo - c))
    return butterfly


def stage_expr(x: MoaArray, q: int, sign: int = -1):
    """Lazy expression for stage ``q`` applied to the length-``n`` vector ``x``."""
    L = 2 ** q
    n = x.shape[0]
    w = MoaArray((L // 2,), make_weights(L, sign), name="w")
    cells = reshape((n // L, 2, L // 2), x)
    return ravel(omega_unary(butterfly_cell(w), 2, cells))


def fft_high_level(x, sign: int = -1) -> np.ndarray:
    x = as_signal(x)
    t = log2_exact(len(x))
    data = MoaArray((len(x),), bit_reversal_permutation(x), name="x")
    for q in range(1, t + 1):
        data = materialize(stage_expr(data, q, sign))
    return data.items.copy()
