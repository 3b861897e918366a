import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from moafft.errors import ContractViolation
from moafft.fftseq import SeqVariant, bit_reversal_permutation, random_signal, run_sequential_fft
from moafft.msgsim import DistTemplateId, run_distributed
from moafft.plan import breakpoint_range, validate_config
from moafft.shmsim import (CopyKind, SharedEvent, SharedMemory, SharedTemplateId, WorkerContext,
                           check_contract, copy_shared_private, run_shared, shared_fft)
from moafft.trace import AccessLog, new_counters

TEMPLATES = list(SharedTemplateId)
C = CopyKind


def context(cfg, p, x):
    shared = SharedMemory(x, instrument=True)
    return WorkerContext(p, cfg, shared, new_counters(cfg.m, cfg.t), AccessLog(0))


# --- copies --------------------------------------------------------------------

def test_block_copy_first_worker():
    cfg = validate_config(16, 4)
    x = random_signal(16, 0)
    ctx = context(cfg, 0, x)
    assert copy_shared_private(C.CENTRALIZED_TO_PRIVATE_BLOCK, ctx, cfg) == 4
    assert np.array_equal(ctx.private("x")[:4], x[:4])
    copy_shared_private(C.CENTRALIZED_TO_PRIVATE_BLOCK_PARTITIONED, ctx, cfg)
    assert np.array_equal(ctx.private("xblock"), x[:4])


@pytest.mark.parametrize("p", range(4))
def test_cyclic_copy_sections(p):
    cfg = validate_config(16, 4)
    x = random_signal(16, 1)
    ctx = context(cfg, p, x)
    copy_shared_private(C.CENTRALIZED_TO_PRIVATE_CYCLIC, ctx, cfg)
    assert np.array_equal(ctx.private("x")[p::4], x[p::4])
    copy_shared_private(C.CENTRALIZED_TO_PRIVATE_CYCLIC_PARTITIONED, ctx, cfg)
    assert np.array_equal(ctx.private("xcyclic"), x[p:16:4])


@pytest.mark.parametrize("inbound,outbound", [
    (C.CENTRALIZED_TO_PRIVATE_BLOCK, C.PRIVATE_BLOCK_TO_CENTRALIZED),
    (C.CENTRALIZED_TO_PRIVATE_CYCLIC, C.PRIVATE_CYCLIC_TO_CENTRALIZED),
    (C.CENTRALIZED_TO_PRIVATE_BLOCK_PARTITIONED, C.PRIVATE_BLOCK_PARTITIONED_TO_CENTRALIZED),
    (C.CENTRALIZED_TO_PRIVATE_CYCLIC_PARTITIONED, C.PRIVATE_CYCLIC_PARTITIONED_TO_CENTRALIZED),
])
def test_copy_round_trip(inbound, outbound):
    cfg = validate_config(64, 4)
    x = random_signal(64, 2)
    keep = x.copy()
    for p in range(4):
        ctx = context(cfg, p, x)
        copy_shared_private(inbound, ctx, cfg)
        copy_shared_private(outbound, ctx, cfg)
    assert np.array_equal(x, keep)


def test_other_workers_private_data_is_refused():
    cfg = validate_config(16, 2)
    ctx = context(cfg, 0, random_signal(16, 0))
    assert ctx.private("xblock", owner=0) is ctx.private("xblock")
    with pytest.raises(ContractViolation):
        ctx.private("xblock", owner=1)


# --- templates -------------------------------------------------------------------

@pytest.mark.parametrize("template", TEMPLATES)
@pytest.mark.parametrize("m", [1, 2, 4, 8])
def test_templates_match_sequential(template, m):
    x = random_signal(256, m)
    ref = run_sequential_fft(SeqVariant.INPLACE, x)
    for bp in breakpoint_range(256, m):
        y, tr = shared_fft(template, x, validate_config(256, m, bp), instrument=True)
        assert np.linalg.norm(y - ref) <= 1e-12 * np.linalg.norm(ref)
        assert tr.messages == 0
        assert tr.butterflies == 128 * 8


@pytest.mark.parametrize("template", TEMPLATES)
def test_single_worker_bitwise_inplace(template):
    x = random_signal(128, 4)
    y, _ = shared_fft(template, x, validate_config(128, 1))
    assert np.array_equal(y, run_sequential_fft(SeqVariant.INPLACE, x))


@given(st.sampled_from(TEMPLATES), st.sampled_from([1, 2, 4, 8]), st.integers(0, 2 ** 32 - 1), st.booleans())
def test_threaded_and_serial_agree(template, m, seed, serial):
    cfg = validate_config(128, m)
    x = random_signal(128, seed)
    y, _ = shared_fft(template, x, cfg, serial=serial, instrument=True)
    assert np.array_equal(y, run_sequential_fft(SeqVariant.INPLACE, x))


@pytest.mark.parametrize("m", [2, 4, 8])
def test_simple_shared_disjoint_writes(m, monkeypatch):
    from moafft import shmsim
    cfg = validate_config(512, m)
    captured = {}
    original = shmsim.check_contract

    def spy(sh, c):
        captured["shared"] = sh
        original(sh, c)

    monkeypatch.setattr(shmsim, "check_contract", spy)
    run_shared(SharedTemplateId.SIMPLE_SHARED, bit_reversal_permutation(random_signal(512, 0)), cfg,
               instrument=True)
    events = captured["shared"].events
    for region in (1, 2):
        per_worker = [np.concatenate([e.index for e in events
                                      if e.region == region and e.p == p and e.access == "write"])
                      for p in range(m)]
        for a in range(m):
            for b in range(a + 1, m):
                assert len(np.intersect1d(per_worker[a], per_worker[b])) == 0
        assert sorted(np.concatenate(per_worker).tolist()) == list(range(512))


def test_private_templates_count_copies():
    cfg = validate_config(256, 4)
    for template in (SharedTemplateId.PRIVATE_BLOCK_CYCLIC, SharedTemplateId.PRIVATE_PARTITIONED):
        _, tr = shared_fft(template, random_signal(256, 0), cfg)
        assert tr.elements_moved == 4 * 256
    _, tr = shared_fft(SharedTemplateId.SIMPLE_SHARED, random_signal(256, 0), cfg)
    assert tr.elements_moved == 0


@pytest.mark.parametrize("template", TEMPLATES)
def test_matches_distributed_templates(template):
    x = random_signal(1024, 5)
    cfg = validate_config(1024, 4, 5)
    y, _ = shared_fft(template, x, cfg)
    for dist in DistTemplateId:
        yd, _ = run_distributed(dist, x, cfg)
        assert np.linalg.norm(y - yd) <= 1e-12 * np.linalg.norm(yd)


# --- the contract checker catches what it should -------------------------------------

def _events(*rows):
    return [SharedEvent(stamp, p, region, access, np.asarray(idx)) for stamp, p, region, access, idx in rows]


def test_checker_flags_overlapping_writes():
    cfg = validate_config(8, 2)
    sh = SharedMemory(np.zeros(8, dtype=complex), instrument=True)
    sh.events = _events((0, 0, 1, "write", [0, 1, 2, 3, 4]), (1, 1, 1, "write", [4, 5, 6, 7]))
    with pytest.raises(ContractViolation):
        check_contract(sh, cfg)


def test_checker_flags_early_region_two_read():
    cfg = validate_config(8, 2)
    sh = SharedMemory(np.zeros(8, dtype=complex), instrument=True)
    sh.events = _events((0, 0, 1, "write", [0, 1, 2, 3]), (1, 0, 2, "read", [0, 2]),
                        (2, 1, 1, "write", [4, 5, 6, 7]))
    with pytest.raises(ContractViolation):
        check_contract(sh, cfg)


def test_checker_flags_private_to_private():
    cfg = validate_config(8, 2)
    sh = SharedMemory(np.zeros(8, dtype=complex), instrument=True)
    sh.copies = [(C.PRIVATE_BLOCK_TO_CENTRALIZED, 0, "private", "private", 4)]
    with pytest.raises(ContractViolation):
        check_contract(sh, cfg)


def test_checker_accepts_ordered_regions():
    cfg = validate_config(8, 2)
    sh = SharedMemory(np.zeros(8, dtype=complex), instrument=True)
    sh.events = _events((0, 0, 1, "write", [0, 1, 2, 3]), (1, 1, 1, "write", [4, 5, 6, 7]),
                        (2, 0, 2, "read", [0, 2, 4, 6]))
    check_contract(sh, cfg)
