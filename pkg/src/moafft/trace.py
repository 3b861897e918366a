"""Work counters and optional access logs recorded by plans and simulators."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._jit import njit

# counter kinds (first axis of TraceRecord.counters)
BUTTERFLIES, WEIGHTS, ASSIGNS, MOVED = 0, 1, 2, 3
# array ids and access kinds in the access log
ARR_X, ARR_XBLOCK, ARR_XCYCLIC = 0, 1, 2
READ, WRITE = 0, 1
LOG_COLUMNS = ("p", "q", "gidx", "lidx", "arr", "kind")


@njit
def log_access(log, pos, p, q, gidx, lidx, arr, kind):
    k = pos[0]
    if k < log.shape[0]:
        log[k, 0] = p
        log[k, 1] = q
        log[k, 2] = gidx
        log[k, 3] = lidx
        log[k, 4] = arr
        log[k, 5] = kind
    pos[0] = k + 1


class AccessLog:
    """Fixed-capacity int64 log of data-array accesses.

    One row per access with columns ``p, q, gidx, lidx, arr, kind``; a
    disabled log has capacity 0 and kernels skip recording entirely.
    """

    def __init__(self, capacity: int = 0):
        self.data = np.zeros((int(capacity), len(LOG_COLUMNS)), dtype=np.int64)
        self.pos = np.zeros(1, dtype=np.int64)

    @classmethod
    def for_transform(cls, n: int, t: int) -> "AccessLog":
        # two reads and two writes per butterfly, n/2 butterflies per stage
        return cls(2 * n * t)

    @property
    def enabled(self) -> bool:
        return self.data.shape[0] > 0

    @property
    def entries(self) -> np.ndarray:
        if self.pos[0] > self.data.shape[0]:
            raise OverflowError(f"access log overflow: {self.pos[0]} entries, capacity {self.data.shape[0]}")
        return self.data[: self.pos[0]]

    def column(self, name: str) -> np.ndarray:
        return self.entries[:, LOG_COLUMNS.index(name)]

    def select(self, **where) -> np.ndarray:
        rows = self.entries
        mask = np.ones(len(rows), dtype=bool)
        for key, value in where.items():
            mask &= rows[:, LOG_COLUMNS.index(key)] == value
        return rows[mask]


def new_counters(m: int, t: int) -> np.ndarray:
    """Counter array indexed ``[kind, p, q]``.

    Row ``p = m`` holds work done outside any processor loop and column
    ``q = 0`` holds work done outside any stage loop (data copies).
    """
    return np.zeros((4, m + 1, t + 1), dtype=np.int64)


@dataclass
class TraceRecord:
    m: int
    t: int
    counters: np.ndarray = None
    messages: int = 0
    elements_moved: int = 0
    local_copies: int = 0
    phases: list = field(default_factory=list)
    log: AccessLog | None = None

    def __post_init__(self):
        if self.counters is None:
            self.counters = new_counters(self.m, self.t)

    def count(self, kind: int, p: int | None = None, q: int | None = None) -> int:
        sel = self.counters[kind]
        if p is not None:
            sel = sel[p]
        if q is not None:
            sel = sel[..., q]
        return int(np.sum(sel))

    @property
    def butterflies(self) -> int:
        return self.count(BUTTERFLIES)

    @property
    def weights_computed(self) -> int:
        return self.count(WEIGHTS)

    @property
    def copied(self) -> int:
        return self.count(MOVED)

    def per_processor(self) -> list[dict]:
        return [{"butterflies": self.count(BUTTERFLIES, p), "weights_computed": self.count(WEIGHTS, p)}
                for p in range(self.m)]

    def to_dict(self) -> dict:
        return {
            "butterflies": self.butterflies,
            "weights_computed": self.weights_computed,
            "messages": int(self.messages),
            "elements_moved": int(self.elements_moved),
            "local_copies": int(self.local_copies),
            "per_processor": self.per_processor(),
            "phases": list(self.phases),
        }
