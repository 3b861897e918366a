"""Simulated message passing on ``m`` virtual processors.

Each processor runs its per-processor program as a Python generator that
yields at every communication operation. ``SEND`` is nonblocking and
buffered (the payload is copied into the channel at once); ``RECEIVE``
blocks until a message from the named sender is available. Channels are
FIFO per ordered (src, dst) pair. A scheduler picks the next runnable
processor, round-robin or seeded-random; if no live processor can run,
a :class:`DeadlockError` lists who waits on whom.

Every local array slot carries the global index of the element it holds
and a flag saying whether the slot currently holds that element. Sends
give up the sent slots, receives check that the arriving global indices
match the destination slots, so a misplaced or duplicated element is an
error rather than a silently wrong answer.
"""
from __future__ import annotations

import enum
from collections import defaultdict, deque
from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from .errors import DeadlockError, StateError
from .fftseq import as_signal, bit_reversal_permutation
from .plan import FftConfig
from .trace import ARR_X, ARR_XBLOCK, ARR_XCYCLIC, AccessLog, TraceRecord

ARRAY_IDS = {ARR_X: "x", ARR_XBLOCK: "xblock", ARR_XCYCLIC: "xcyclic"}


def section(start: int, stop: int, stride: int = 1) -> np.ndarray:
    """Indices of the inclusive section ``start:stop:stride``."""
    return np.arange(start, stop + 1, stride, dtype=np.int64)


def block(start: int, count: int) -> np.ndarray:
    """``count`` consecutive indices from ``start`` (a first-element placement)."""
    return np.arange(start, start + count, dtype=np.int64)


@dataclass
class Message:
    src: int
    dst: int
    payload: np.ndarray
    gids: np.ndarray
    phase: str = ""

    def __post_init__(self):
        if self.src == self.dst:
            raise StateError(f"processor {self.src} cannot message itself")

    @property
    def element_count(self) -> int:
        return len(self.payload)


@dataclass
class Send:
    dst: int
    array: str
    index: np.ndarray


@dataclass
class Recv:
    src: int
    count: int
    array: str
    index: np.ndarray


class ProcessorState:
    """Local memory of virtual processor ``myid``.

    ``x`` has room for all ``n`` elements, ``xblock`` and ``xcyclic`` for
    ``psize``; ``gids[name][j]`` is the global element index slot ``j``
    stands for and ``held[name][j]`` says whether the slot holds it now.
    """

    def __init__(self, myid: int, cfg: FftConfig):
        n, m, psize = cfg.n, cfg.m, cfg.psize
        self.myid = myid
        self.cfg = cfg
        self.arrays = {
            "x": np.zeros(n, dtype=np.complex128),
            "xblock": np.zeros(psize, dtype=np.complex128),
            "xcyclic": np.zeros(psize, dtype=np.complex128),
        }
        self.gids = {
            "x": np.arange(n, dtype=np.int64),
            "xblock": myid * psize + np.arange(psize, dtype=np.int64),
            "xcyclic": m * np.arange(psize, dtype=np.int64) + myid,
        }
        self.held = {name: np.zeros(len(a), dtype=bool) for name, a in self.arrays.items()}
        self.phase = "start"
        self.local_copies = 0

    @property
    def x(self):
        return self.arrays["x"]

    @property
    def xblock(self):
        return self.arrays["xblock"]

    @property
    def xcyclic(self):
        return self.arrays["xcyclic"]

    def load(self, name: str, values) -> None:
        self.arrays[name][:] = values
        self.held[name][:] = True

    def hold(self, name: str, index, values) -> None:
        """Place ``values`` in slots ``index`` of ``name`` and mark them held."""
        index = np.asarray(index)
        self.arrays[name][index] = values
        self.held[name][index] = True

    def require(self, name: str, index: np.ndarray, what: str) -> None:
        if not self.held[name][index].all():
            missing = self.gids[name][index][~self.held[name][index]]
            raise StateError(f"processor {self.myid} does not hold elements {missing[:8].tolist()} "
                             f"of {name} needed for {what}")

    def held_gids(self) -> np.ndarray:
        return np.concatenate([self.gids[k][self.held[k]] for k in self.arrays])

    def local_copy(self, src: str, src_index, dst: str, dst_index) -> int:
        """Move elements between two local arrays of this processor."""
        src_index, dst_index = np.asarray(src_index), np.asarray(dst_index)
        self.require(src, src_index, f"a local copy into {dst}")
        if not np.array_equal(self.gids[src][src_index], self.gids[dst][dst_index]):
            raise StateError(f"processor {self.myid}: local copy {src} -> {dst} misplaces elements")
        self.arrays[dst][dst_index] = self.arrays[src][src_index]
        self.held[src][src_index] = False
        self.held[dst][dst_index] = True
        return len(dst_index)


@dataclass
class RedistStats:
    messages: int = 0
    elements_moved: int = 0
    local_copies: int = 0
    message_sizes: list = field(default_factory=list)
    by_phase: dict = field(default_factory=dict)


class Runtime:
    """Drives processor programs to completion under a chosen schedule."""

    def __init__(self, states, scheduler: str = "round-robin", seed: int | None = None, audit: bool = False):
        if scheduler not in ("round-robin", "random"):
            raise ValueError(f"unknown scheduler {scheduler!r}")
        self.states = list(states)
        self.scheduler = scheduler
        self.rng = np.random.default_rng(seed)
        self.audit = audit
        self.channels: dict[tuple[int, int], deque] = defaultdict(deque)
        self.stats = RedistStats()
        self.total = sum(len(s.held_gids()) for s in self.states)

    # -- communication ------------------------------------------------------

    def _send(self, st: ProcessorState, op: Send) -> None:
        if not 0 <= op.dst < len(self.states):
            raise StateError(f"processor {st.myid} sends to unknown processor {op.dst}")
        st.require(op.array, op.index, f"a send to processor {op.dst}")
        msg = Message(st.myid, op.dst, st.arrays[op.array][op.index].copy(),
                      st.gids[op.array][op.index].copy(), st.phase)
        st.held[op.array][op.index] = False
        self.channels[(st.myid, op.dst)].append(msg)
        self.stats.messages += 1
        self.stats.elements_moved += msg.element_count
        self.stats.message_sizes.append(msg.element_count)
        ph = self.stats.by_phase.setdefault(st.phase, [0, 0])
        ph[0] += 1
        ph[1] += msg.element_count

    def _receive(self, st: ProcessorState, op: Recv) -> None:
        msg = self.channels[(op.src, st.myid)].popleft()
        if msg.element_count != op.count:
            raise StateError(f"processor {st.myid} expected {op.count} elements from {op.src}, "
                             f"got {msg.element_count}")
        if st.held[op.array][op.index].any():
            raise StateError(f"processor {st.myid}: receive from {op.src} would overwrite live data in {op.array}")
        if not np.array_equal(msg.gids, st.gids[op.array][op.index]):
            raise StateError(f"processor {st.myid}: message from {op.src} does not match its placement in {op.array}")
        st.arrays[op.array][op.index] = msg.payload
        st.held[op.array][op.index] = True

    def _check_conservation(self) -> None:
        parts = [s.held_gids() for s in self.states]
        parts += [msg.gids for ch in self.channels.values() for msg in ch]
        gids = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
        if len(gids) != self.total or len(np.unique(gids)) != len(gids):
            raise StateError(f"element conservation violated: {len(gids)} elements live, expected {self.total}")

    # -- scheduling ---------------------------------------------------------

    def run(self, programs: dict) -> RedistStats:
        """Run ``{myid: generator}`` until every program finishes."""
        live = dict(programs)
        waiting: dict[int, Recv | None] = {p: None for p in live}
        cursor = 0
        m = len(self.states)
        while live:
            runnable = [p for p in sorted(live)
                        if waiting[p] is None or self.channels[(waiting[p].src, p)]]
            if not runnable:
                raise DeadlockError({p: waiting[p].src for p in live})
            if self.scheduler == "random":
                p = int(self.rng.choice(runnable))
            else:
                p = min(runnable, key=lambda q: (q - cursor) % m)
                cursor = (p + 1) % m
            st = self.states[p]
            if waiting[p] is not None:
                self._receive(st, waiting[p])
                waiting[p] = None
            try:
                op = next(live[p])
            except StopIteration:
                del live[p]
                continue
            if isinstance(op, Send):
                self._send(st, op)
            elif isinstance(op, Recv):
                waiting[p] = op
            else:
                raise TypeError(f"processor {p} yielded {op!r}")
            if self.audit:
                self._check_conservation()
        leftover = sum(len(ch) for ch in self.channels.values())
        if leftover:
            raise StateError(f"{leftover} messages were sent but never received")
        return self.stats


# --- redistribution programs ---------------------------------------------------

class RedistKind(enum.Enum):
    CENTRALIZED_TO_BLOCK = "centralized-to-block"
    BLOCK_TO_CENTRALIZED = "block-to-centralized"
    CENTRALIZED_TO_CYCLIC = "centralized-to-cyclic"
    CYCLIC_TO_CENTRALIZED = "cyclic-to-centralized"
    BLOCK_TO_CYCLIC_DIRECT = "block-to-cyclic-direct"
    BLOCK_TO_CYCLIC_VIA_CENTRAL = "block-to-cyclic-via-central"
    CENTRALIZED_TO_BLOCK_PARTITIONED = "centralized-to-block-partitioned"
    BLOCK_PARTITIONED_TO_CENTRALIZED = "block-partitioned-to-centralized"
    CENTRALIZED_TO_CYCLIC_PARTITIONED = "centralized-to-cyclic-partitioned"
    CYCLIC_PARTITIONED_TO_CENTRALIZED = "cyclic-partitioned-to-centralized"
    BLOCK_PARTITIONED_TO_CYCLIC_PARTITIONED_DIRECT = "block-partitioned-to-cyclic-partitioned-direct"
    BLOCK_PARTITIONED_TO_CYCLIC_PARTITIONED_VIA_CENTRAL = "block-partitioned-to-cyclic-partitioned-via-central"


def _centralized_to_block(st, cfg, sends_first):
    n, m, psize, me = cfg.n, cfg.m, cfg.psize, st.myid
    if me == 0:
        st.require("x", section(0, n - 1), "centralized-to-block")
        for otherp in range(1, m):
            yield Send(otherp, "x", block(psize * otherp, psize))
    else:
        yield Recv(0, psize, "x", block(psize * me, psize))


def _block_to_centralized(st, cfg, sends_first):
    m, psize, me = cfg.m, cfg.psize, st.myid
    st.require("x", block(psize * me, psize), "block-to-centralized")
    if me == 0:
        for otherp in range(1, m):
            yield Recv(otherp, psize, "x", block(psize * otherp, psize))
    else:
        yield Send(0, "x", block(psize * me, psize))


def _centralized_to_cyclic(st, cfg, sends_first):
    n, m, psize, me = cfg.n, cfg.m, cfg.psize, st.myid
    if me == 0:
        st.require("x", section(0, n - 1), "centralized-to-cyclic")
        for otherp in range(1, m):
            yield Send(otherp, "x", section(otherp, n - 1, m))
    else:
        yield Recv(0, psize, "x", section(me, n - 1, m))


def _cyclic_to_centralized(st, cfg, sends_first):
    n, m, psize, me = cfg.n, cfg.m, cfg.psize, st.myid
    st.require("x", section(me, n - 1, m), "cyclic-to-centralized")
    if me == 0:
        for otherp in range(1, m):
            yield Recv(otherp, psize, "x", section(otherp, n - 1, m))
    else:
        yield Send(0, "x", section(me, n - 1, m))


def _block_to_cyclic_direct(st, cfg, sends_first):
    m, psize, me = cfg.m, cfg.psize, st.myid
    st.require("x", block(psize * me, psize), "block-to-cyclic")
    others = [p for p in range(m) if p != me]
    sends = [Send(p, "x", section(psize * me + p, psize * (me + 1) - 1, m)) for p in others]
    recvs = [Recv(p, psize // m, "x", section(psize * p + me, psize * (p + 1) - 1, m)) for p in others]
    if sends_first:
        ops = sends + recvs
    else:
        ops = [op for pair in zip(sends, recvs) for op in pair]
    for op in ops:
        yield op


def _block_to_cyclic_via_central(st, cfg, sends_first):
    yield from _block_to_centralized(st, cfg, sends_first)
    yield from _centralized_to_cyclic(st, cfg, sends_first)


def _centralized_to_block_partitioned(st, cfg, sends_first):
    n, m, psize, me = cfg.n, cfg.m, cfg.psize, st.myid
    if me == 0:
        st.require("x", section(0, n - 1), "centralized-to-block-partitioned")
        st.local_copies += st.local_copy("x", section(0, psize - 1), "xblock", section(0, psize - 1))
        for otherp in range(1, m):
            yield Send(otherp, "x", block(psize * otherp, psize))
    else:
        yield Recv(0, psize, "xblock", section(0, psize - 1))


def _block_partitioned_to_centralized(st, cfg, sends_first):
    m, psize, me = cfg.m, cfg.psize, st.myid
    st.require("xblock", section(0, psize - 1), "block-partitioned-to-centralized")
    if me == 0:
        st.local_copies += st.local_copy("xblock", section(0, psize - 1), "x", section(0, psize - 1))
        for otherp in range(1, m):
            yield Recv(otherp, psize, "x", block(psize * otherp, psize))
    else:
        yield Send(0, "xblock", section(0, psize - 1))


def _centralized_to_cyclic_partitioned(st, cfg, sends_first):
    n, m, psize, me = cfg.n, cfg.m, cfg.psize, st.myid
    if me == 0:
        st.require("x", section(0, n - 1), "centralized-to-cyclic-partitioned")
        st.local_copies += st.local_copy("x", section(0, n - 1, m), "xcyclic", section(0, psize - 1))
        for otherp in range(1, m):
            yield Send(otherp, "x", section(otherp, n - 1, m))
    else:
        yield Recv(0, psize, "xcyclic", section(0, psize - 1))


def _cyclic_partitioned_to_centralized(st, cfg, sends_first):
    n, m, psize, me = cfg.n, cfg.m, cfg.psize, st.myid
    st.require("xcyclic", section(0, psize - 1), "cyclic-partitioned-to-centralized")
    if me == 0:
        st.local_copies += st.local_copy("xcyclic", section(0, psize - 1), "x", section(0, n - 1, m))
        for otherp in range(1, m):
            yield Recv(otherp, psize, "x", section(otherp, n - 1, m))
    else:
        yield Send(0, "xcyclic", section(0, psize - 1))


def _block_partitioned_to_cyclic_partitioned_direct(st, cfg, sends_first):
    m, psize, me = cfg.m, cfg.psize, st.myid
    k = psize // m
    st.require("xblock", section(0, psize - 1), "block-partitioned-to-cyclic-partitioned")
    # the slice that stays on this processor needs no message
    st.local_copies += st.local_copy("xblock", section(me, psize - 1, m),
                                     "xcyclic", section(me * k, (me + 1) * k - 1))
    others = [p for p in range(m) if p != me]
    sends = [Send(p, "xblock", section(p, psize - 1, m)) for p in others]
    recvs = [Recv(p, k, "xcyclic", block(p * k, k)) for p in others]
    if sends_first:
        ops = sends + recvs
    else:
        ops = [op for pair in zip(sends, recvs) for op in pair]
    for op in ops:
        yield op


def _block_partitioned_to_cyclic_partitioned_via_central(st, cfg, sends_first):
    yield from _block_partitioned_to_centralized(st, cfg, sends_first)
    yield from _centralized_to_cyclic_partitioned(st, cfg, sends_first)


_REDIST = {
    RedistKind.CENTRALIZED_TO_BLOCK: _centralized_to_block,
    RedistKind.BLOCK_TO_CENTRALIZED: _block_to_centralized,
    RedistKind.CENTRALIZED_TO_CYCLIC: _centralized_to_cyclic,
    RedistKind.CYCLIC_TO_CENTRALIZED: _cyclic_to_centralized,
    RedistKind.BLOCK_TO_CYCLIC_DIRECT: _block_to_cyclic_direct,
    RedistKind.BLOCK_TO_CYCLIC_VIA_CENTRAL: _block_to_cyclic_via_central,
    RedistKind.CENTRALIZED_TO_BLOCK_PARTITIONED: _centralized_to_block_partitioned,
    RedistKind.BLOCK_PARTITIONED_TO_CENTRALIZED: _block_partitioned_to_centralized,
    RedistKind.CENTRALIZED_TO_CYCLIC_PARTITIONED: _centralized_to_cyclic_partitioned,
    RedistKind.CYCLIC_PARTITIONED_TO_CENTRALIZED: _cyclic_partitioned_to_centralized,
    RedistKind.BLOCK_PARTITIONED_TO_CYCLIC_PARTITIONED_DIRECT: _block_partitioned_to_cyclic_partitioned_direct,
    RedistKind.BLOCK_PARTITIONED_TO_CYCLIC_PARTITIONED_VIA_CENTRAL:
        _block_partitioned_to_cyclic_partitioned_via_central,
}


def redistribution_program(kind: RedistKind, st: ProcessorState, cfg: FftConfig, sends_first: bool = False):
    """Generator running one redistribution on processor ``st.myid``."""
    kind = RedistKind(kind)
    st.phase = kind.value
    yield from _REDIST[kind](st, cfg, sends_first)


def make_states(cfg: FftConfig) -> list[ProcessorState]:
    return [ProcessorState(p, cfg) for p in range(cfg.m)]


def redistribute(kind: RedistKind, states, cfg: FftConfig, sends_first: bool = False,
                 scheduler: str = "round-robin", seed: int | None = None, audit: bool = False) -> RedistStats:
    """Run one redistribution on every processor; returns message statistics.

    Local copies are counted in ``local_copies`` and never as messages.
    """
    for st in states:
        st.local_copies = 0
    rt = Runtime(states, scheduler, seed, audit)
    stats = rt.run({st.myid: redistribution_program(kind, st, cfg, sends_first) for st in states})
    stats.local_copies = sum(st.local_copies for st in states)
    return stats


# --- distributed templates ---------------------------------------------------------

class DistTemplateId(enum.Enum):
    FULL_LOCAL_COPY = "full-local-copy"
    PARTITIONED = "partitioned"
    PARTITIONED_DIRECT = "partitioned-direct"


def _compute(st, tr, log, audit, name, fn, *args):
    st.phase = name
    start = int(log.pos[0])
    fn(*args, tr.counters, log.data, log.pos)
    if audit:
        rows = log.data[start:int(log.pos[0])]
        for arr_id, arr_name in ARRAY_IDS.items():
            sel = rows[rows[:, 4] == arr_id]
            if len(sel) == 0:
                continue
            lidx = sel[:, 3]
            if not st.held[arr_name][lidx].all():
                bad = sel[~st.held[arr_name][lidx], 2]
                raise StateError(f"processor {st.myid} touches elements {bad[:8].tolist()} it does not own "
                                 f"during {name}")
            if not np.array_equal(st.gids[arr_name][lidx], sel[:, 2]):
                raise StateError(f"processor {st.myid}: local/global index mismatch in {arr_name}")


def _template_program(template, st, cfg, sign, sends_first, via_central, tr, log, audit):
    me, m, psize, bp, t = st.myid, cfg.m, cfg.psize, cfg.breakpoint, cfg.t
    R = RedistKind
    if template is DistTemplateId.FULL_LOCAL_COPY:
        yield from redistribution_program(R.CENTRALIZED_TO_BLOCK, st, cfg, sends_first)
        _compute(st, tr, log, audit, "block-stages", K.block_loop_x, st.x, me, psize, 1, bp - 1, sign)
        middle = R.BLOCK_TO_CYCLIC_VIA_CENTRAL if via_central else R.BLOCK_TO_CYCLIC_DIRECT
        yield from redistribution_program(middle, st, cfg, sends_first)
        _compute(st, tr, log, audit, "cyclic-stages", K.cyclic_loop_x, st.x, me, m, bp, t, sign, False)
        yield from redistribution_program(R.CYCLIC_TO_CENTRALIZED, st, cfg, sends_first)
        return
    yield from redistribution_program(R.CENTRALIZED_TO_BLOCK_PARTITIONED, st, cfg, sends_first)
    _compute(st, tr, log, audit, "block-stages", K.block_loop_xblock, st.xblock, me, 1, bp - 1, sign)
    if template is DistTemplateId.PARTITIONED_DIRECT:
        yield from redistribution_program(R.BLOCK_PARTITIONED_TO_CYCLIC_PARTITIONED_DIRECT, st, cfg, sends_first)
    else:
        yield from redistribution_program(R.BLOCK_PARTITIONED_TO_CENTRALIZED, st, cfg, sends_first)
        yield from redistribution_program(R.CENTRALIZED_TO_CYCLIC_PARTITIONED, st, cfg, sends_first)
    _compute(st, tr, log, audit, "cyclic-stages", K.cyclic_loop_xcyclic, st.xcyclic, me, m, bp, t, sign)
    yield from redistribution_program(R.CYCLIC_PARTITIONED_TO_CENTRALIZED, st, cfg, sends_first)


def template_phases(template: DistTemplateId, via_central: bool = False) -> list[str]:
    R = RedistKind
    if template is DistTemplateId.FULL_LOCAL_COPY:
        middle = [R.BLOCK_TO_CYCLIC_VIA_CENTRAL] if via_central else [R.BLOCK_TO_CYCLIC_DIRECT]
        kinds = [R.CENTRALIZED_TO_BLOCK, *middle, R.CYCLIC_TO_CENTRALIZED]
    elif template is DistTemplateId.PARTITIONED_DIRECT:
        kinds = [R.CENTRALIZED_TO_BLOCK_PARTITIONED, R.BLOCK_PARTITIONED_TO_CYCLIC_PARTITIONED_DIRECT,
                 R.CYCLIC_PARTITIONED_TO_CENTRALIZED]
    else:
        kinds = [R.CENTRALIZED_TO_BLOCK_PARTITIONED, R.BLOCK_PARTITIONED_TO_CENTRALIZED,
                 R.CENTRALIZED_TO_CYCLIC_PARTITIONED, R.CYCLIC_PARTITIONED_TO_CENTRALIZED]
    return [k.value for k in kinds]


def run_distributed(template: DistTemplateId, x, cfg: FftConfig, sign: int = -1, sends_first: bool = False,
                    via_central: bool = False, scheduler: str = "round-robin", seed: int | None = None,
                    audit: bool = False) -> tuple[np.ndarray, TraceRecord]:
    """Run a per-processor template on ``m`` virtual processors.

    ``x`` starts on processor 0 in natural order; processor 0 applies the
    bit-reversal permutation before distributing. The result is collected
    on processor 0. ``via_central`` selects the two-step block-to-cyclic
    route for the full-local-copy template. With ``audit`` every compute
    phase is checked to touch only owned elements and every scheduling
    step is checked for element conservation.
    """
    template = DistTemplateId(template)
    x = as_signal(x)
    if len(x) != cfg.n:
        raise StateError(f"signal length {len(x)} does not match n={cfg.n}")
    states = make_states(cfg)
    states[0].load("x", bit_reversal_permutation(x))
    for st in states:
        st.local_copies = 0
    log = AccessLog.for_transform(cfg.n, cfg.t) if audit else AccessLog(0)
    tr = TraceRecord(cfg.m, cfg.t, log=log if audit else None)
    rt = Runtime(states, scheduler, seed, audit)
    stats = rt.run({st.myid: _template_program(template, st, cfg, int(sign), sends_first, via_central,
                                               tr, log, audit)
                    for st in states})
    states[0].require("x", section(0, cfg.n - 1), "collecting the result")
    tr.messages = stats.messages
    tr.elements_moved = stats.elements_moved
    tr.local_copies = sum(st.local_copies for st in states)
    tr.phases = []
    for name in template_phases(template, via_central):
        msgs, elems = stats.by_phase.get(name, [0, 0])
        tr.phases.append({"name": name, "messages": msgs, "elements": elems})
    return states[0].x.copy(), tr
