"""Loop-nest kernels for the per-processor parts of the parallel plans.

Each kernel runs one processor's share ``p`` of a range of stages
``q_lo..q_hi`` on one data array, exactly as the corresponding loop nest is
written: full-length ``x`` with block or cyclic responsibility, or the
processor-local ``xblock`` / ``xcyclic`` arrays of ``psize`` elements.

All kernels update ``counters[kind, p, q]`` and, when ``log`` has nonzero
capacity, append one row per data access (see :mod:`moafft.trace`).
Local offsets map to global element indices as

    xblock[j]  holds x[p*psize + j]
    xcyclic[j] holds x[m*j + p]
"""
import numpy as np

from ._jit import njit
from .fftseq import twiddle
from .trace import ARR_X, ARR_XBLOCK, ARR_XCYCLIC, READ, WRITE, log_access


@njit(inline=True)
def _butterfly(a, lo, hi, w, p, q, glo, ghi, arr, log, pos):
    c = w * a[hi]
    d = a[lo]
    a[lo] = d + c
    a[hi] = d - c
    if log.shape[0] > 0:
        log_access(log, pos, p, q, ghi, hi, arr, READ)
        log_access(log, pos, p, q, glo, lo, arr, READ)
        log_access(log, pos, p, q, glo, lo, arr, WRITE)
        log_access(log, pos, p, q, ghi, hi, arr, WRITE)


@njit
def _count(counters, p, q, nb):
    counters[0, p, q] += nb
    counters[2, p, q] += 2 * nb


@njit
def full_weights(L, sign, p, q, counters):
    weight = np.empty(L // 2, dtype=np.complex128)
    for row in range(L // 2):
        weight[row] = twiddle(row, L, sign)
    counters[1, p, q] += L // 2
    return weight


@njit
def cyclic_weights(L, m, p, sign, q, counters):
    """Only the ``L/(2m)`` weights processor ``p`` uses, stored contiguously."""
    nw = L // (2 * m)
    weightcyclic = np.empty(nw, dtype=np.complex128)
    for rowp in range(nw):
        weightcyclic[rowp] = twiddle(m * rowp + p, L, sign)
    counters[1, p, q] += nw
    return weightcyclic


@njit
def block_loop_x(x, p, psize, q_lo, q_hi, sign, counters, log, pos):
    """First stage loop on full-length ``x``, block responsibility."""
    for q in range(q_lo, q_hi + 1):
        L = 2 ** q
        h = L // 2
        weight = full_weights(L, sign, p, q, counters)
        nb = 0
        for colp in range(p * psize, (p + 1) * psize, L):
            for row in range(h):
                lo = colp + row
                _butterfly(x, lo, lo + h, weight[row], p, q, lo, lo + h, ARR_X, log, pos)
                nb += 1
        _count(counters, p, q, nb)


@njit
def cyclic_loop_x(x, p, m, q_lo, q_hi, sign, needed_only, counters, log, pos):
    """Second stage loop on full-length ``x``, cyclic responsibility.

    With ``needed_only`` only the weights with ``row = p (mod m)`` are
    computed; the rest of the weight vector is never read.
    """
    n = x.shape[0]
    for q in range(q_lo, q_hi + 1):
        L = 2 ** q
        h = L // 2
        if needed_only:
            weight = np.empty(h, dtype=np.complex128)
            for row in range(p, h, m):
                weight[row] = twiddle(row, L, sign)
                counters[1, p, q] += 1
        else:
            weight = full_weights(L, sign, p, q, counters)
        nb = 0
        for colp in range(0, n, L):
            for row in range(p, h, m):
                lo = colp + row
                _butterfly(x, lo, lo + h, weight[row], p, q, lo, lo + h, ARR_X, log, pos)
                nb += 1
        _count(counters, p, q, nb)


@njit
def cyclic_loop_weightcyclic_x(x, p, m, q_lo, q_hi, sign, counters, log, pos):
    """Second stage loop on ``x`` reading the contiguous ``weightcyclic``."""
    n = x.shape[0]
    for q in range(q_lo, q_hi + 1):
        L = 2 ** q
        h = L // 2
        weightcyclic = cyclic_weights(L, m, p, sign, q, counters)
        nb = 0
        for colp in range(0, n, L):
            for row in range(p, h, m):
                lo = colp + row
                _butterfly(x, lo, lo + h, weightcyclic[(row - p) // m], p, q, lo, lo + h, ARR_X, log, pos)
                nb += 1
        _count(counters, p, q, nb)


@njit
def cyclic_loop_xcyclic_raw(xcyclic, p, m, n, q_lo, q_hi, sign, counters, log, pos):
    """Second stage loop on ``xcyclic`` with the original ``col', row`` loop control."""
    for q in range(q_lo, q_hi + 1):
        L = 2 ** q
        h = L // 2
        weightcyclic = cyclic_weights(L, m, p, sign, q, counters)
        nb = 0
        for colp in range(0, n, L):
            for row in range(p, h, m):
                lo = colp // m + (row - p) // m
                hi = lo + L // (2 * m)
                _butterfly(xcyclic, lo, hi, weightcyclic[(row - p) // m], p, q, m * lo + p, m * hi + p,
                           ARR_XCYCLIC, log, pos)
                nb += 1
        _count(counters, p, q, nb)


@njit
def cyclic_loop_xcyclic(xcyclic, p, m, q_lo, q_hi, sign, counters, log, pos):
    """Second stage loop on ``xcyclic`` with unit-stride ``col'', row'`` loops."""
    psize = xcyclic.shape[0]
    for q in range(q_lo, q_hi + 1):
        L = 2 ** q
        hm = L // (2 * m)
        weightcyclic = cyclic_weights(L, m, p, sign, q, counters)
        nb = 0
        for colpp in range(0, psize, L // m):
            for rowp in range(hm):
                lo = colpp + rowp
                _butterfly(xcyclic, lo, lo + hm, weightcyclic[rowp], p, q, m * lo + p, m * (lo + hm) + p,
                           ARR_XCYCLIC, log, pos)
                nb += 1
        _count(counters, p, q, nb)


@njit
def block_loop_xblock_raw(xblock, p, q_lo, q_hi, sign, counters, log, pos):
    """First stage loop on ``xblock`` with the original global ``col'`` loop control."""
    psize = xblock.shape[0]
    base = p * psize
    for q in range(q_lo, q_hi + 1):
        L = 2 ** q
        h = L // 2
        weight = full_weights(L, sign, p, q, counters)
        nb = 0
        for colp in range(base, base + psize, L):
            for row in range(h):
                lo = colp + row - base
                _butterfly(xblock, lo, lo + h, weight[row], p, q, base + lo, base + lo + h, ARR_XBLOCK, log, pos)
                nb += 1
        _count(counters, p, q, nb)


@njit
def block_loop_xblock(xblock, p, q_lo, q_hi, sign, counters, log, pos):
    """First stage loop on ``xblock`` with local ``col''`` loop control."""
    psize = xblock.shape[0]
    base = p * psize
    for q in range(q_lo, q_hi + 1):
        L = 2 ** q
        h = L // 2
        weight = full_weights(L, sign, p, q, counters)
        nb = 0
        for colpp in range(0, psize, L):
            for row in range(h):
                lo = colpp + row
                _butterfly(xblock, lo, lo + h, weight[row], p, q, base + lo, base + lo + h, ARR_XBLOCK, log, pos)
                nb += 1
        _count(counters, p, q, nb)


# --- whole-plan kernels -------------------------------------------------------

@njit
def split_loops(x, breakpoint, t, sign, prow, counters, log, pos):
    """The stage loop split at ``breakpoint`` into two identical loops.

    There is no processor loop; all work is counted in row ``prow``.
    """
    n = x.shape[0]
    for part in range(2):
        q_lo = 1 if part == 0 else breakpoint
        q_hi = breakpoint - 1 if part == 0 else t
        for q in range(q_lo, q_hi + 1):
            L = 2 ** q
            h = L // 2
            weight = full_weights(L, sign, prow, q, counters)
            nb = 0
            for colp in range(0, n, L):
                for row in range(h):
                    lo = colp + row
                    _butterfly(x, lo, lo + h, weight[row], prow, q, lo, lo + h, ARR_X, log, pos)
                    nb += 1
            _count(counters, prow, q, nb)


@njit
def initial_parallel(x, m, breakpoint, t, sign, counters, log, pos):
    """Stage loops outermost, a processor loop inside each stage.

    Weights are computed once per stage outside the processor loop, so they
    are counted in row ``m``.
    """
    n = x.shape[0]
    psize = n // m
    for q in range(1, breakpoint):
        L = 2 ** q
        h = L // 2
        weight = full_weights(L, sign, m, q, counters)
        for p in range(m):
            nb = 0
            for colp in range(p * psize, (p + 1) * psize, L):
                for row in range(h):
                    lo = colp + row
                    _butterfly(x, lo, lo + h, weight[row], p, q, lo, lo + h, ARR_X, log, pos)
                    nb += 1
            _count(counters, p, q, nb)
    for q in range(breakpoint, t + 1):
        L = 2 ** q
        h = L // 2
        weight = full_weights(L, sign, m, q, counters)
        for p in range(m):
            nb = 0
            for colp in range(0, n, L):
                for row in range(p, h, m):
                    lo = colp + row
                    _butterfly(x, lo, lo + h, weight[row], p, q, lo, lo + h, ARR_X, log, pos)
                    nb += 1
            _count(counters, p, q, nb)


@njit
def combined(x, m, breakpoint, t, sign, counters, log, pos):
    """Both stage loops on partitioned local arrays, copies done inline."""
    n = x.shape[0]
    psize = n // m
    for p in range(m):
        xblock = x[p * psize:(p + 1) * psize].copy()
        counters[3, p, 0] += psize
        block_loop_xblock(xblock, p, 1, breakpoint - 1, sign, counters, log, pos)
        x[p * psize:(p + 1) * psize] = xblock
        counters[3, p, 0] += psize
    for p in range(m):
        xcyclic = x[p:n:m].copy()
        counters[3, p, 0] += psize
        cyclic_loop_xcyclic(xcyclic, p, m, breakpoint, t, sign, counters, log, pos)
        x[p:n:m] = xcyclic
        counters[3, p, 0] += psize
