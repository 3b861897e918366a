"""One entry point for every implementation: ``compute(mode, ident, x, ...)``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fftseq import SeqVariant, _check_sign, as_signal, log2_exact, naive_dft, run_sequential_fft
from .highlevel import fft_high_level
from .msgsim import DistTemplateId, run_distributed
from .plan import PlanId, plan_fft, validate_config
from .shmsim import SharedTemplateId, shared_fft

MODES = ("seq", "plan", "dist", "shm", "oracle")

IDS = {
    "seq": [v.value for v in SeqVariant] + ["high-level"],
    "plan": [p.value for p in PlanId],
    "dist": [d.value for d in DistTemplateId],
    "shm": [s.value for s in SharedTemplateId],
    "oracle": ["naive-dft"],
}


DEFAULT_IDS = {"seq": "inplace", "plan": "combined", "dist": "partitioned", "shm": "simple-shared",
               "oracle": "naive-dft"}


@dataclass(frozen=True)
class Entry:
    """A mode and implementation id, written ``mode:id`` on the command line."""

    mode: str
    ident: str

    @classmethod
    def parse(cls, text: str) -> "Entry":
        mode, _, ident = text.partition(":")
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
        if not ident:
            ident = DEFAULT_IDS[mode]
        if ident not in IDS[mode]:
            raise ValueError(f"unknown {mode} id {ident!r}; expected one of {', '.join(IDS[mode])}")
        return cls(mode, ident)

    @property
    def parallel(self) -> bool:
        return self.mode in ("plan", "dist", "shm")

    def __str__(self) -> str:
        return f"{self.mode}:{self.ident}"


def compute(mode: str, ident: str, x, m: int = 1, breakpoint: int | None = None, sign: int = -1,
            serial: bool = False, sends_first: bool = False, via_central: bool = False):
    """Transform ``x`` (natural order) with the chosen implementation.

    Returns ``(y, trace)`` where ``trace`` is a :class:`TraceRecord` or
    ``None`` for modes without one. Raises :class:`ConfigError` on an
    invalid ``n, m, breakpoint``.
    """
    x = as_signal(x)
    sign = _check_sign(sign)
    if mode == "oracle":
        log2_exact(len(x))
        return naive_dft(x, sign), None
    if mode == "seq":
        validate_config(len(x), 1)
        if ident == "high-level":
            return fft_high_level(x, sign), None
        return run_sequential_fft(SeqVariant(ident), x, sign), None
    cfg = validate_config(len(x), m, breakpoint)
    if mode == "plan":
        return plan_fft(PlanId(ident), x, cfg, sign)
    if mode == "dist":
        return run_distributed(DistTemplateId(ident), x, cfg, sign, sends_first=sends_first,
                               via_central=via_central)
    if mode == "shm":
        return shared_fft(SharedTemplateId(ident), x, cfg, sign, serial=serial)
    raise ValueError(f"unknown mode {mode!r}")


def all_entries(include_high_level: bool = False) -> list[Entry]:
    out = []
    for mode in ("seq", "plan", "dist", "shm"):
        for ident in IDS[mode]:
            if ident == "high-level" and not include_high_level:
                continue
            out.append(Entry(mode, ident))
    return out


def max_rel_error(ys, refs) -> float:
    from .fftseq import rel_l2_error
    return max((rel_l2_error(y, r) for y, r in zip(ys, refs)), default=0.0)


__all__ = ["MODES", "IDS", "DEFAULT_IDS", "Entry", "compute", "all_entries", "max_rel_error", "np"]
