"""Shared-memory templates: two parallel-do regions over ``m`` workers.

Workers share one array ``x`` and each holds its own private arrays. A
barrier separates the block-stage region from the cyclic-stage region,
and the block-to-cyclic handoff goes through shared ``x`` in two steps
(private block out, private cyclic in); private data never moves between
workers directly.

With ``instrument=True`` every shared access is stamped with a logical
clock and the run is checked afterwards: within a region the workers'
shared writes partition ``[0, n)``, no region-2 shared read is stamped
before the last region-1 shared write, and no copy is private-to-private.
"""
from __future__ import annotations

import enum
import itertools
import threading
from dataclasses import dataclass

import numpy as np

from . import kernels as K
from .errors import ContractViolation, StateError
from .fftseq import as_signal, bit_reversal_permutation
from .plan import FftConfig
from .trace import MOVED, WRITE, AccessLog, TraceRecord


class SharedTemplateId(enum.Enum):
    SIMPLE_SHARED = "simple-shared"
    PRIVATE_BLOCK_CYCLIC = "private-block-cyclic"
    PRIVATE_PARTITIONED = "private-partitioned"


class CopyKind(enum.Enum):
    CENTRALIZED_TO_PRIVATE_BLOCK = "centralized-to-private-block"
    PRIVATE_BLOCK_TO_CENTRALIZED = "private-block-to-centralized"
    CENTRALIZED_TO_PRIVATE_CYCLIC = "centralized-to-private-cyclic"
    PRIVATE_CYCLIC_TO_CENTRALIZED = "private-cyclic-to-centralized"
    CENTRALIZED_TO_PRIVATE_BLOCK_PARTITIONED = "centralized-to-private-block-partitioned"
    PRIVATE_BLOCK_PARTITIONED_TO_CENTRALIZED = "private-block-partitioned-to-centralized"
    CENTRALIZED_TO_PRIVATE_CYCLIC_PARTITIONED = "centralized-to-private-cyclic-partitioned"
    PRIVATE_CYCLIC_PARTITIONED_TO_CENTRALIZED = "private-cyclic-partitioned-to-centralized"


@dataclass
class SharedEvent:
    stamp: int
    p: int
    region: int
    access: str  # "read" or "write"
    index: np.ndarray


class SharedMemory:
    """The shared array plus the instrumentation log of shared accesses."""

    def __init__(self, x, instrument: bool = False):
        self.x = x
        self.instrument = instrument
        self.events: list[SharedEvent] = []
        self.copies: list[tuple] = []  # (kind, p, src_space, dst_space, count)
        self._clock = itertools.count()
        self._lock = threading.Lock()

    def tick(self) -> int:
        with self._lock:
            return next(self._clock)

    def record(self, p, region, access, index, stamp: int | None = None) -> None:
        if not self.instrument:
            return
        with self._lock:
            if stamp is None:
                stamp = next(self._clock)
            self.events.append(SharedEvent(stamp, p, region, access, np.asarray(index)))

    def record_copy(self, kind, p, src_space, dst_space, count) -> None:
        if not self.instrument:
            return
        with self._lock:
            self.copies.append((kind, p, src_space, dst_space, count))


class WorkerContext:
    """Worker ``p``: a reference to shared ``x`` and its own private arrays.

    A context holds no reference to any other worker's private data, so a
    cross-worker private access can only be attempted by naming another
    owner, which :meth:`private` refuses.
    """

    def __init__(self, p: int, cfg: FftConfig, shared: SharedMemory, counters, log: AccessLog):
        self.p = p
        self.cfg = cfg
        self.shared = shared
        self.counters = counters
        self.log = log
        self.region = 0
        self._private = {
            "x": np.zeros(cfg.n, dtype=np.complex128),
            "xblock": np.zeros(cfg.psize, dtype=np.complex128),
            "xcyclic": np.zeros(cfg.psize, dtype=np.complex128),
        }

    def private(self, name: str, owner: int | None = None) -> np.ndarray:
        if owner is not None and owner != self.p:
            raise ContractViolation(f"worker {self.p} tried to access private {name} of worker {owner}")
        if name not in self._private:
            raise KeyError(f"no private array named {name!r}")
        return self._private[name]


def _sections(kind: CopyKind, p: int, cfg: FftConfig):
    """(shared index, private array name, private index) of one copy kind."""
    n, m, psize = cfg.n, cfg.m, cfg.psize
    blk = np.arange(psize * p, psize * (p + 1), dtype=np.int64)
    cyc = np.arange(p, n, m, dtype=np.int64)
    local = np.arange(psize, dtype=np.int64)
    C = CopyKind
    if kind in (C.CENTRALIZED_TO_PRIVATE_BLOCK, C.PRIVATE_BLOCK_TO_CENTRALIZED):
        return blk, "x", blk
    if kind in (C.CENTRALIZED_TO_PRIVATE_CYCLIC, C.PRIVATE_CYCLIC_TO_CENTRALIZED):
        return cyc, "x", cyc
    if kind in (C.CENTRALIZED_TO_PRIVATE_BLOCK_PARTITIONED, C.PRIVATE_BLOCK_PARTITIONED_TO_CENTRALIZED):
        return blk, "xblock", local
    return cyc, "xcyclic", local


def copy_shared_private(kind: CopyKind, ctx: WorkerContext, cfg: FftConfig) -> int:
    """One section assignment between shared ``x`` and worker ``ctx.p``'s private data.

    Returns the number of elements copied.
    """
    kind = CopyKind(kind)
    shared_idx, name, private_idx = _sections(kind, ctx.p, cfg)
    priv = ctx.private(name)
    x = ctx.shared.x
    inbound = kind.value.startswith("centralized-to")
    if inbound:
        ctx.shared.record(ctx.p, ctx.region, "read", shared_idx)
        priv[private_idx] = x[shared_idx]
        ctx.shared.record_copy(kind, ctx.p, "shared", "private", len(shared_idx))
    else:
        x[shared_idx] = priv[private_idx]
        ctx.shared.record(ctx.p, ctx.region, "write", shared_idx)
        ctx.shared.record_copy(kind, ctx.p, "private", "shared", len(shared_idx))
    ctx.counters[MOVED, ctx.p, 0] += len(shared_idx)
    return len(shared_idx)


def _shared_compute(ctx: WorkerContext, fn, *args) -> None:
    """Run a kernel directly on shared ``x`` and record its shared accesses.

    Reads are stamped before the kernel starts and writes after it ends,
    the conservative ordering for the barrier check.
    """
    log = ctx.log
    start = int(log.pos[0])
    before = ctx.shared.tick() if ctx.shared.instrument else None
    fn(ctx.shared.x, *args, ctx.counters, log.data, log.pos)
    if ctx.shared.instrument:
        rows = log.entries[start:]
        ctx.shared.record(ctx.p, ctx.region, "read", np.unique(rows[rows[:, 5] != WRITE, 2]), stamp=before)
        ctx.shared.record(ctx.p, ctx.region, "write", np.unique(rows[rows[:, 5] == WRITE, 2]))


def _region(template: SharedTemplateId, region: int, ctx: WorkerContext, sign: int) -> None:
    cfg, p = ctx.cfg, ctx.p
    m, psize, bp, t = cfg.m, cfg.psize, cfg.breakpoint, cfg.t
    ctx.region = region
    C = CopyKind
    args = (ctx.counters, ctx.log.data, ctx.log.pos)
    if template is SharedTemplateId.SIMPLE_SHARED:
        if region == 1:
            _shared_compute(ctx, K.block_loop_x, p, psize, 1, bp - 1, sign)
        else:
            _shared_compute(ctx, K.cyclic_loop_x, p, m, bp, t, sign, False)
    elif template is SharedTemplateId.PRIVATE_BLOCK_CYCLIC:
        xp = ctx.private("x")
        if region == 1:
            copy_shared_private(C.CENTRALIZED_TO_PRIVATE_BLOCK, ctx, cfg)
            K.block_loop_x(xp, p, psize, 1, bp - 1, sign, *args)
            copy_shared_private(C.PRIVATE_BLOCK_TO_CENTRALIZED, ctx, cfg)
        else:
            copy_shared_private(C.CENTRALIZED_TO_PRIVATE_CYCLIC, ctx, cfg)
            K.cyclic_loop_x(xp, p, m, bp, t, sign, False, *args)
            copy_shared_private(C.PRIVATE_CYCLIC_TO_CENTRALIZED, ctx, cfg)
    else:
        if region == 1:
            copy_shared_private(C.CENTRALIZED_TO_PRIVATE_BLOCK_PARTITIONED, ctx, cfg)
            K.block_loop_xblock(ctx.private("xblock"), p, 1, bp - 1, sign, *args)
            copy_shared_private(C.PRIVATE_BLOCK_PARTITIONED_TO_CENTRALIZED, ctx, cfg)
        else:
            copy_shared_private(C.CENTRALIZED_TO_PRIVATE_CYCLIC_PARTITIONED, ctx, cfg)
            K.cyclic_loop_xcyclic(ctx.private("xcyclic"), p, m, bp, t, sign, *args)
            copy_shared_private(C.PRIVATE_CYCLIC_PARTITIONED_TO_CENTRALIZED, ctx, cfg)


def check_contract(shared: SharedMemory, cfg: FftConfig) -> None:
    """Raise :class:`ContractViolation` unless the recorded run obeys the region rules."""
    n = cfg.n
    for region in (1, 2):
        writes = [e for e in shared.events if e.region == region and e.access == "write"]
        per_worker = {}
        for e in writes:
            per_worker.setdefault(e.p, []).append(np.unique(e.index))
        # overlap between workers, not repeated writes by one worker
        owner_counts = np.zeros(n, dtype=np.int64)
        for parts in per_worker.values():
            owner_counts[np.unique(np.concatenate(parts))] += 1
        if (owner_counts > 1).any():
            g = int(np.flatnonzero(owner_counts > 1)[0])
            raise ContractViolation(f"region {region}: element {g} written by more than one worker")
        if owner_counts.any() and (owner_counts == 0).any():
            g = int(np.flatnonzero(owner_counts == 0)[0])
            raise ContractViolation(f"region {region}: element {g} is never written")
    last_write_1 = max((e.stamp for e in shared.events if e.region == 1 and e.access == "write"), default=-1)
    first_read_2 = min((e.stamp for e in shared.events if e.region == 2 and e.access == "read"), default=None)
    if first_read_2 is not None and first_read_2 < last_write_1:
        raise ContractViolation("a region-2 shared read precedes the last region-1 shared write")
    for kind, p, src, dst, _ in shared.copies:
        if src == "private" and dst == "private":
            raise ContractViolation(f"worker {p}: private-to-private copy {kind.value}")


def run_shared(template: SharedTemplateId, x_bitreversed, cfg: FftConfig, sign: int = -1,
               serial: bool = False, instrument: bool = False) -> tuple[np.ndarray, TraceRecord]:
    """Run a shared-memory template on an already bit-reversed signal.

    By default each worker is a thread and a barrier separates the two
    regions; ``serial`` runs the workers one after another per region.
    ``instrument`` records shared accesses and checks them with
    :func:`check_contract`.
    """
    template = SharedTemplateId(template)
    x = as_signal(x_bitreversed).copy()
    if len(x) != cfg.n:
        raise StateError(f"signal length {len(x)} does not match n={cfg.n}")
    sign = int(sign)
    shared = SharedMemory(x, instrument)
    tr = TraceRecord(cfg.m, cfg.t)
    ctxs = []
    for p in range(cfg.m):
        log = AccessLog.for_transform(cfg.n, cfg.t) if instrument else AccessLog(0)
        ctxs.append(WorkerContext(p, cfg, shared, tr.counters, log))

    if serial or cfg.m == 1:
        for region in (1, 2):
            for ctx in ctxs:
                _region(template, region, ctx, sign)
    else:
        barrier = threading.Barrier(cfg.m)
        errors: list[BaseException] = []

        def worker(ctx):
            try:
                _region(template, 1, ctx, sign)
                barrier.wait()
                _region(template, 2, ctx, sign)
            except threading.BrokenBarrierError:
                pass
            except BaseException as exc:  # surfaced to the caller below
                errors.append(exc)
                barrier.abort()

        threads = [threading.Thread(target=worker, args=(ctx,)) for ctx in ctxs]
        for th in threads:
            th.start()
        for th in threads:
            th.join()
        if errors:
            raise errors[0]

    if instrument:
        check_contract(shared, cfg)
    tr.elements_moved = tr.copied
    tr.local_copies = 0
    tr.messages = 0
    tr.phases = [{"name": f"region-{r}", "elements_copied": _region_copies(shared, r)} for r in (1, 2)] \
        if instrument else [{"name": "region-1"}, {"name": "region-2"}]
    return x, tr


def _region_copies(shared: SharedMemory, region: int) -> int:
    return 0 if not shared.copies else sum(c[4] for c in shared.copies if _copy_region(c[0]) == region)


def _copy_region(kind: CopyKind) -> int:
    block_kinds = {CopyKind.CENTRALIZED_TO_PRIVATE_BLOCK, CopyKind.PRIVATE_BLOCK_TO_CENTRALIZED,
                   CopyKind.CENTRALIZED_TO_PRIVATE_BLOCK_PARTITIONED, CopyKind.PRIVATE_BLOCK_PARTITIONED_TO_CENTRALIZED}
    return 1 if kind in block_kinds else 2


def shared_fft(template: SharedTemplateId, x, cfg: FftConfig, sign: int = -1, serial: bool = False,
               instrument: bool = False):
    """Bit-reverse then run ``template``; the full transform of ``x``."""
    return run_shared(template, bit_reversal_permutation(as_signal(x)), cfg, sign, serial, instrument)
