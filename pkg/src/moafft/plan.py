"""Parallel computation plans executed sequentially (processor loop run serially).

A plan fixes which processor ``p`` performs which butterflies: before the
breakpoint stage each processor owns a contiguous block of ``psize``
elements, from the breakpoint on it owns the elements congruent to ``p``
modulo ``m``. Each :class:`PlanId` runs its own loop nest.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels as K
from .errors import ConfigError, MapError
from .fftseq import as_signal, bit_reversal_permutation, log2_exact
from .trace import MOVED, AccessLog, TraceRecord


@dataclass(frozen=True)
class FftConfig:
    n: int
    m: int
    breakpoint: int

    @property
    def t(self) -> int:
        return self.n.bit_length() - 1

    @property
    def psize(self) -> int:
        return self.n // self.m

    @property
    def breakpoint_range(self) -> range:
        return breakpoint_range(self.n, self.m)


def breakpoint_range(n: int, m: int) -> range:
    """Allowed breakpoints ``log2(m)+1 .. log2(psize)+1``."""
    lm, lp = log2_exact(m, "m"), log2_exact(n // m, "psize")
    return range(lm + 1, lp + 2)


def validate_config(n: int, m: int = 1, breakpoint: int | None = None) -> FftConfig:
    """Check ``n``, ``m`` and ``breakpoint``; default breakpoint is the low end.

    Raises :class:`ConfigError` naming the violated bound. ``requirement``
    is 1 for the upper bound (stages before the breakpoint must fit in one
    block, ``L <= psize``) and 2 for the lower bound (stages from the
    breakpoint on need ``L/2 >= m``).
    """
    n, m = int(n), int(m)
    t = log2_exact(n, "n")
    if t < 1:
        raise ConfigError("the radix-2 transform needs n >= 2")
    lm = log2_exact(m, "m")
    psize = n // m
    if psize < m:
        raise ConfigError(f"psize = n/m = {psize} is smaller than m = {m}; plans need psize >= m")
    lp = psize.bit_length() - 1
    if breakpoint is None:
        breakpoint = lm + 1
    breakpoint = int(breakpoint)
    if breakpoint > lp + 1:
        raise ConfigError(f"breakpoint {breakpoint} > log2(psize)+1 = {lp + 1} (Requirement 1: L <= psize "
                          "in the first stage loop)", requirement=1)
    if breakpoint < lm + 1:
        raise ConfigError(f"breakpoint {breakpoint} < log2(m)+1 = {lm + 1} (Requirement 2: L/2 >= m "
                          "in the second stage loop)", requirement=2)
    return FftConfig(n, m, breakpoint)


class PlanId(enum.Enum):
    SPLIT_LOOPS = "split-loops"
    INITIAL_PARALLEL = "initial-parallel"
    PROCESSOR_OUTERMOST = "processor-outermost"
    NEEDED_WEIGHTS = "needed-weights"
    WEIGHT_CYCLIC = "weight-cyclic"
    XCYCLIC = "xcyclic"
    XCYCLIC_SIMPLIFIED = "xcyclic-simplified"
    XBLOCK = "xblock"
    XBLOCK_SIMPLIFIED = "xblock-simplified"
    COMBINED = "combined"


# --- ownership and local index maps -----------------------------------------

def block_owner(i: int, cfg: FftConfig) -> int:
    return int(i) // cfg.psize


def cyclic_owner(i: int, cfg: FftConfig) -> int:
    return int(i) % cfg.m


def cyclic_local_index(colp: int, row: int, p: int, cfg: FftConfig) -> int:
    """Offset in ``xcyclic`` of element ``x[col' + row]`` held by processor ``p``.

    ``col'`` is a multiple of the column length (hence of ``m``) and ``row``
    must be congruent to ``p`` modulo ``m``.
    """
    if colp % cfg.m:
        raise MapError(f"col'={colp} is not a multiple of m={cfg.m}")
    if (row - p) % cfg.m:
        raise MapError(f"row={row} is not congruent to p={p} modulo m={cfg.m}")
    return colp // cfg.m + (row - p) // cfg.m


def block_local_index(colp: int, row: int, p: int, cfg: FftConfig) -> int:
    """Offset in ``xblock`` of element ``x[col' + row]`` held by processor ``p``."""
    g = colp + row
    if block_owner(g, cfg) != p:
        raise MapError(f"element {g} is not in the block of processor {p}")
    return g - p * cfg.psize


# --- plan execution ---------------------------------------------------------

def _copy_block_in(x, p, cfg, tr):
    tr.counters[MOVED, p, 0] += cfg.psize
    return x[p * cfg.psize:(p + 1) * cfg.psize].copy()


def _copy_block_out(xblock, x, p, cfg, tr):
    x[p * cfg.psize:(p + 1) * cfg.psize] = xblock
    tr.counters[MOVED, p, 0] += cfg.psize


def _copy_cyclic_in(x, p, cfg, tr):
    tr.counters[MOVED, p, 0] += cfg.psize
    return x[p::cfg.m].copy()


def _copy_cyclic_out(xcyclic, x, p, cfg, tr):
    x[p::cfg.m] = xcyclic
    tr.counters[MOVED, p, 0] += cfg.psize


# first-loop and second-loop composition for the plans built from per-processor kernels
_FIRST = {
    PlanId.PROCESSOR_OUTERMOST: "x",
    PlanId.NEEDED_WEIGHTS: "x",
    PlanId.WEIGHT_CYCLIC: "x",
    PlanId.XCYCLIC: "x",
    PlanId.XCYCLIC_SIMPLIFIED: "x",
    PlanId.XBLOCK: "xblock-raw",
    PlanId.XBLOCK_SIMPLIFIED: "xblock",
}
_SECOND = {
    PlanId.PROCESSOR_OUTERMOST: "x-full-weights",
    PlanId.NEEDED_WEIGHTS: "x-needed-weights",
    PlanId.WEIGHT_CYCLIC: "x-weightcyclic",
    PlanId.XCYCLIC: "xcyclic-raw",
    PlanId.XCYCLIC_SIMPLIFIED: "xcyclic",
    PlanId.XBLOCK: "xcyclic",
    PlanId.XBLOCK_SIMPLIFIED: "xcyclic",
}


def _first_loop(kind, x, cfg, sign, tr, log):
    bp = cfg.breakpoint
    for p in range(cfg.m):
        if kind == "x":
            K.block_loop_x(x, p, cfg.psize, 1, bp - 1, sign, tr.counters, log.data, log.pos)
        else:
            xblock = _copy_block_in(x, p, cfg, tr)
            loop = K.block_loop_xblock_raw if kind == "xblock-raw" else K.block_loop_xblock
            loop(xblock, p, 1, bp - 1, sign, tr.counters, log.data, log.pos)
            _copy_block_out(xblock, x, p, cfg, tr)


def _second_loop(kind, x, cfg, sign, tr, log):
    bp, t, m = cfg.breakpoint, cfg.t, cfg.m
    for p in range(m):
        if kind.startswith("x-"):
            if kind == "x-weightcyclic":
                K.cyclic_loop_weightcyclic_x(x, p, m, bp, t, sign, tr.counters, log.data, log.pos)
            else:
                K.cyclic_loop_x(x, p, m, bp, t, sign, kind == "x-needed-weights", tr.counters, log.data, log.pos)
            continue
        xcyclic = _copy_cyclic_in(x, p, cfg, tr)
        if kind == "xcyclic-raw":
            K.cyclic_loop_xcyclic_raw(xcyclic, p, m, cfg.n, bp, t, sign, tr.counters, log.data, log.pos)
        else:
            K.cyclic_loop_xcyclic(xcyclic, p, m, bp, t, sign, tr.counters, log.data, log.pos)
        _copy_cyclic_out(xcyclic, x, p, cfg, tr)


def run_plan(plan: PlanId, x_bitreversed, cfg: FftConfig, sign: int = -1,
             record: bool = False) -> tuple[np.ndarray, TraceRecord]:
    """Run ``plan`` on an already bit-reversed signal.

    Returns the transformed signal (a new array) and the trace. With
    ``record`` the trace carries an :class:`AccessLog` of every data access.
    """
    plan = PlanId(plan)
    x = as_signal(x_bitreversed).copy()
    if len(x) != cfg.n:
        raise ConfigError(f"signal length {len(x)} does not match n={cfg.n}")
    sign = int(sign)
    log = AccessLog.for_transform(cfg.n, cfg.t) if record else AccessLog(0)
    tr = TraceRecord(cfg.m, cfg.t, log=log if record else None)
    args = (tr.counters, log.data, log.pos)
    if plan is PlanId.SPLIT_LOOPS:
        K.split_loops(x, cfg.breakpoint, cfg.t, sign, cfg.m, *args)
    elif plan is PlanId.INITIAL_PARALLEL:
        K.initial_parallel(x, cfg.m, cfg.breakpoint, cfg.t, sign, *args)
    elif plan is PlanId.COMBINED:
        K.combined(x, cfg.m, cfg.breakpoint, cfg.t, sign, *args)
    else:
        _first_loop(_FIRST[plan], x, cfg, sign, tr, log)
        _second_loop(_SECOND[plan], x, cfg, sign, tr, log)
    tr.elements_moved = tr.copied
    return x, tr


def plan_fft(plan: PlanId, x, cfg: FftConfig, sign: int = -1, record: bool = False):
    """Bit-reverse then run ``plan``; the full transform of ``x``."""
    return run_plan(plan, bit_reversal_permutation(as_signal(x)), cfg, sign, record)
