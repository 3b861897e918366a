"""Sequential radix-2 FFT: bit reversal, weights, and the refinement variants.

Every variant performs the same per-element arithmetic

    c = weight[row] * x[col' + row + L/2]
    x[col' + row]       <- x[col' + row] + c
    x[col' + row + L/2] <- x[col' + row] - c

so all of them agree bitwise; they differ only in loop structure and in
how the data vector is viewed (2-D, 3-D, strided, sectioned).
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._jit import njit
from .errors import ConfigError, ShapeError


@njit
def twiddle(row, L, sign):
    """``exp(sign * 2*pi*i * row / L)``; the single weight formula used everywhere."""
    theta = 2.0 * math.pi * row / L
    return complex(math.cos(theta), sign * math.sin(theta))


def log2_exact(n: int, what: str = "n") -> int:
    n = int(n)
    if n < 1 or n & (n - 1):
        raise ConfigError(f"{what}={n} is not a power of two")
    return n.bit_length() - 1


@njit
def _weights(L, sign):
    w = np.empty(L // 2, dtype=np.complex128)
    for row in range(L // 2):
        w[row] = twiddle(row, L, sign)
    return w


def make_weights(L: int, sign: int = -1) -> np.ndarray:
    """The ``L/2`` weights ``exp(sign*2*pi*i*row/L)`` of one stage."""
    if log2_exact(L, "L") < 1:
        raise ConfigError(f"L={L} must be at least 2")
    return _weights(int(L), _check_sign(sign))


def _check_sign(sign) -> int:
    sign = int(sign)
    if sign not in (1, -1):
        raise ConfigError(f"exponent sign must be +1 or -1, got {sign}")
    return sign


@dataclass(frozen=True)
class StageSpec:
    """One butterfly stage ``q`` of an ``n``-point transform."""

    q: int
    n: int
    sign: int = -1

    @property
    def L(self) -> int:
        return 2 ** self.q

    @property
    def Lstar(self) -> int:
        return self.L // 2

    @property
    def r(self) -> int:
        return self.n // self.L

    @property
    def weights(self) -> np.ndarray:
        return make_weights(self.L, self.sign)


class SeqVariant(enum.Enum):
    MATRIX2D = "matrix2d"
    VECTOR = "vector"
    STRIDED = "strided"
    RETILED = "retiled"
    UNROLLED = "unrolled"
    UNROLLED_VECTOR = "unrolled-vector"
    OPT_BASIC_BLOCK = "opt-basic-block"
    INPLACE = "inplace"
    VECTORIZED = "vectorized"


# --- bit reversal -----------------------------------------------------------

def bit_reverse(j: int, t: int) -> int:
    """Reverse the ``t``-bit binary representation of ``j``."""
    out = 0
    for _ in range(t):
        out = (out << 1) | (j & 1)
        j >>= 1
    return out


@functools.lru_cache(maxsize=64)
def bit_reversal_indices(n: int) -> np.ndarray:
    """Read-only index table ``j -> rev_t(j)`` for ``n = 2**t``."""
    t = log2_exact(n)
    idx = np.zeros(n, dtype=np.int64)
    # doubling construction: rev(2j) = rev(j)/2, rev(2j+1) = rev(j)/2 + n/2
    for j in range(1, n):
        idx[j] = (idx[j >> 1] >> 1) | ((j & 1) << (t - 1))
    idx.setflags(write=False)
    return idx


def bit_reversal_permutation(x) -> np.ndarray:
    """``out[j] = x[rev_t(j)]``; an involution on length ``2**t`` vectors."""
    x = np.asarray(x)
    return x[bit_reversal_indices(len(x))]


# --- per-stage kernels, one per variant -------------------------------------

@njit
def _stage_matrix2d(x, L, weight):
    n = x.shape[0]
    r = n // L
    xx = np.empty(n, dtype=np.complex128)
    x2 = x.reshape((r, L)).T  # x2[row, col] is x[L*col + row]
    xx2 = xx.reshape((r, L)).T
    h = L // 2
    for col in range(r):
        for row in range(L):
            if row < h:
                xx2[row, col] = x2[row, col] + weight[row] * x2[row + h, col]
            else:
                xx2[row, col] = x2[row - h, col] - weight[row - h] * x2[row, col]
    return xx


@njit
def _stage_vector(x, L, weight):
    n = x.shape[0]
    r = n // L
    h = L // 2
    xx = np.empty(n, dtype=np.complex128)
    for col in range(r):
        for row in range(L):
            if row < h:
                xx[L * col + row] = x[L * col + row] + weight[row] * x[L * col + row + h]
            else:
                xx[L * col + row] = x[L * col + row - h] - weight[row - h] * x[L * col + row]
    return xx


@njit
def _stage_strided(x, L, weight):
    n = x.shape[0]
    h = L // 2
    xx = np.empty(n, dtype=np.complex128)
    for colp in range(0, n, L):
        for row in range(L):
            if row < h:
                xx[colp + row] = x[colp + row] + weight[row] * x[colp + row + h]
            else:
                xx[colp + row] = x[colp + row - h] - weight[row - h] * x[colp + row]
    return xx


@njit
def _stage_retiled(x, L, weight):
    n = x.shape[0]
    r = n // L
    h = L // 2
    xx = np.empty(n, dtype=np.complex128)
    x3 = x.reshape((r, 2, h)).T  # x3[row, group, col] is x[L*col + h*group + row]
    xx3 = xx.reshape((r, 2, h)).T
    for col in range(r):
        for row in range(h):
            for group in range(2):
                if group == 0:
                    xx3[row, group, col] = x3[row, group, col] + weight[row] * x3[row, group + 1, col]
                else:
                    xx3[row, group, col] = x3[row, group - 1, col] - weight[row] * x3[row, group, col]
    return xx


@njit
def _stage_unrolled(x, L, weight):
    n = x.shape[0]
    r = n // L
    h = L // 2
    xx = np.empty(n, dtype=np.complex128)
    x3 = x.reshape((r, 2, h)).T
    xx3 = xx.reshape((r, 2, h)).T
    for col in range(r):
        for row in range(h):
            xx3[row, 0, col] = x3[row, 0, col] + weight[row] * x3[row, 1, col]
            xx3[row, 1, col] = x3[row, 0, col] - weight[row] * x3[row, 1, col]
    return xx


@njit
def _stage_unrolled_vector(x, L, weight):
    n = x.shape[0]
    h = L // 2
    xx = np.empty(n, dtype=np.complex128)
    for colp in range(0, n, L):
        for row in range(h):
            xx[colp + row] = x[colp + row] + weight[row] * x[colp + row + h]
            xx[colp + row + h] = x[colp + row] - weight[row] * x[colp + row + h]
    return xx


@njit
def _stage_opt_basic_block(x, L, weight):
    n = x.shape[0]
    h = L // 2
    xx = np.empty(n, dtype=np.complex128)
    for colp in range(0, n, L):
        for row in range(h):
            c = weight[row] * x[colp + row + h]
            xx[colp + row] = x[colp + row] + c
            xx[colp + row + h] = x[colp + row] - c
    return xx


@njit
def _stage_inplace(x, L, weight):
    n = x.shape[0]
    h = L // 2
    for colp in range(0, n, L):
        for row in range(h):
            c = weight[row] * x[colp + row + h]
            d = x[colp + row]
            x[colp + row] = d + c
            x[colp + row + h] = d - c
    return x


@njit
def _stage_vectorized(x, L, weight):
    n = x.shape[0]
    h = L // 2
    for colp in range(0, n, L):
        cvec = weight[0:h] * x[colp + h:colp + L]
        dvec = x[colp:colp + h].copy()
        x[colp:colp + h] = dvec + cvec
        x[colp + h:colp + L] = dvec - cvec
    return x


_STAGES = {
    SeqVariant.MATRIX2D: _stage_matrix2d,
    SeqVariant.VECTOR: _stage_vector,
    SeqVariant.STRIDED: _stage_strided,
    SeqVariant.RETILED: _stage_retiled,
    SeqVariant.UNROLLED: _stage_unrolled,
    SeqVariant.UNROLLED_VECTOR: _stage_unrolled_vector,
    SeqVariant.OPT_BASIC_BLOCK: _stage_opt_basic_block,
    SeqVariant.INPLACE: _stage_inplace,
    SeqVariant.VECTORIZED: _stage_vectorized,
}


def as_signal(x) -> np.ndarray:
    return np.ascontiguousarray(x, dtype=np.complex128)


def butterfly_stage(variant: SeqVariant, stage: StageSpec, x) -> np.ndarray:
    """Apply one butterfly stage with the loop structure of ``variant``.

    Returns a new array; the input is never modified.
    """
    variant = SeqVariant(variant)
    x = as_signal(x).copy()
    if len(x) != stage.n or len(x) % stage.L:
        raise ShapeError(f"signal of length {len(x)} does not fit stage q={stage.q} of an {stage.n}-point transform")
    return _STAGES[variant](x, stage.L, stage.weights)


def run_sequential_fft(variant: SeqVariant, x, sign: int = -1) -> np.ndarray:
    """Bit-reverse ``x`` then run stages ``q = 1..t``; weights recomputed per stage."""
    variant = SeqVariant(variant)
    sign = _check_sign(sign)
    x = as_signal(x)
    t = log2_exact(len(x))
    if t < 1:
        raise ConfigError("the radix-2 transform needs n >= 2")
    kernel = _STAGES[variant]
    x = bit_reversal_permutation(x)  # fresh copy; the caller's array is untouched
    for q in range(1, t + 1):
        L = 2 ** q
        x = kernel(x, L, _weights(L, sign))
    return x


def stage_counts(n: int) -> dict:
    """Butterfly and weight totals of one full sequential transform."""
    t = log2_exact(n)
    return {"butterflies": t * n // 2, "weights_computed": sum(2 ** (q - 1) for q in range(1, t + 1))}


# --- reference oracle and signal utilities ----------------------------------

def naive_dft(x, sign: int = -1) -> np.ndarray:
    """O(n^2) DFT ``X_k = sum_j x_j exp(sign*2*pi*i*j*k/n)``, summed over ascending ``j``."""
    sign = _check_sign(sign)
    x = as_signal(x)
    n = len(x)
    if n == 0:
        return x.copy()
    table = np.exp(sign * 2j * np.pi * np.arange(n) / n)
    k = np.arange(n)
    out = np.zeros(n, dtype=np.complex128)
    for j in range(n):
        out += x[j] * table[(j * k) % n]
    return out


def rel_l2_error(got, want) -> float:
    got, want = np.asarray(got), np.asarray(want)
    scale = np.linalg.norm(want)
    diff = np.linalg.norm(got - want)
    if scale == 0.0:
        return float(diff)
    return float(diff / scale)


def random_signal(n: int, seed: int) -> np.ndarray:
    """Uniform complex samples with real and imaginary parts in [-1, 1]."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, n) + 1j * rng.uniform(-1.0, 1.0, n)


def read_signal(path) -> np.ndarray:
    values = []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        nums = [float(p) for p in parts]
        values.append(complex(nums[0], nums[1] if len(nums) > 1 else 0.0))
    return np.array(values, dtype=np.complex128)


def write_signal(path, x) -> None:
    lines = [f"{float(v.real)!r} {float(v.imag)!r}" for v in as_signal(x)]
    Path(path).write_text("\n".join(lines) + "\n")
