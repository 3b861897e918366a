"""Acceptance gate. Each test carries a criterion marker; the terminal summary
prints one PASS/FAIL line per criterion."""
import numpy as np
import pytest

from conftest import signal_and_oracle, valid_configs
from moafft.cli import TOLERANCE, build_parser, sweep_command
from moafft.fftseq import random_signal, rel_l2_error
from moafft.moa import MoaArray, parse_literal, psi, reverse, rho, take
from moafft.msgsim import RedistKind, make_states, redistribute
from moafft.plan import PlanId, breakpoint_range, validate_config
from moafft.runner import IDS, compute
from moafft.trace import WEIGHTS

SEEDS = range(20)
CONFIGS = valid_configs(12, (1, 2, 4, 8))
SIZES = sorted({n for n, _, _ in CONFIGS})
# the pure array-algebra form is checked bitwise against inplace elsewhere; it is too slow for this sweep
SEQUENTIAL = [ident for ident in IDS["seq"] if ident != "high-level"]
PARALLEL = [(mode, ident) for mode in ("plan", "dist", "shm") for ident in IDS[mode]]
EVERY = [("seq", ident) for ident in SEQUENTIAL] + PARALLEL


# --- oracle equivalence ------------------------------------------------------

@pytest.mark.criterion("oracle equivalence")
@pytest.mark.parametrize("n", SIZES)
@pytest.mark.parametrize("ident", SEQUENTIAL)
def test_sequential_matches_oracle(ident, n):
    worst = max(rel_l2_error(compute("seq", ident, x)[0], ref)
                for x, ref in (signal_and_oracle(n, s) for s in SEEDS))
    assert worst <= TOLERANCE


@pytest.mark.criterion("oracle equivalence")
@pytest.mark.parametrize("n", SIZES)
@pytest.mark.parametrize("mode,ident", PARALLEL)
def test_parallel_matches_oracle(mode, ident, n):
    checked = 0
    for _, m, bp in (c for c in CONFIGS if c[0] == n):
        for s in SEEDS:
            x, ref = signal_and_oracle(n, s)
            y, _ = compute(mode, ident, x, m=m, breakpoint=bp)
            assert rel_l2_error(y, ref) <= TOLERANCE, (m, bp, s)
            checked += 1
    assert checked > 0


# --- worked example ----------------------------------------------------------

@pytest.mark.criterion("worked example")
def test_worked_example(A):
    expr = take(2, reverse(A))
    assert rho(expr) == (2, 5, 4)
    trace = []
    got = psi((1, 2), expr, trace=trace)
    want = psi((1, 2), A)
    assert got.shape == want.shape == (4,)
    assert got.tolist() == want.tolist() == [28, 29, 30, 31]
    assert trace[-1] == "= ⟨1 2⟩ψA"


# --- psi composition -----------------------------------------------------------

@pytest.mark.criterion("psi composition")
def test_psi_composition_thousand_cases():
    rng = np.random.default_rng(2024)
    failures = 0
    for _ in range(1000):
        shape = tuple(int(s) for s in rng.integers(1, 5, size=rng.integers(1, 5)))
        a = MoaArray(shape, rng.integers(-100, 100, size=int(np.prod(shape))))
        k = int(rng.integers(0, len(shape) + 1))
        p = tuple(int(rng.integers(0, s)) for s in shape[:k])
        split = int(rng.integers(0, k + 1))
        whole = psi(p, a)
        composed = psi(p[split:], psi(p[:split], a))
        view = np.asarray(a.items).reshape(shape)[p]
        same = whole == composed
        if k < len(shape):
            same = same and np.array_equal(np.asarray(whole.items).reshape(whole.shape), view)
        else:
            same = same and whole == view
        failures += not same
    assert failures == 0


# --- message counts ----------------------------------------------------------

def _block_states(cfg, x):
    states = make_states(cfg)
    for st in states:
        g = np.arange(st.myid * cfg.psize, (st.myid + 1) * cfg.psize)
        st.hold("x", g, x[g])
    return states


@pytest.mark.criterion("message counts")
@pytest.mark.parametrize("m", [2, 4, 8, 16])
def test_block_to_cyclic_message_counts(m):
    cfg = validate_config(16 * m, m)
    x = random_signal(cfg.n, m)
    assert redistribute(RedistKind.BLOCK_TO_CYCLIC_DIRECT, _block_states(cfg, x), cfg).messages == m * (m - 1)
    assert redistribute(RedistKind.BLOCK_TO_CYCLIC_VIA_CENTRAL, _block_states(cfg, x), cfg).messages == 2 * (m - 1)


# --- needed weights ----------------------------------------------------------

@pytest.mark.criterion("needed weights")
@pytest.mark.parametrize("n,m", [(64, 4), (256, 2), (1024, 8), (4096, 8)])
def test_needed_weights(n, m):
    cfg = validate_config(n, m)
    _, tr = compute("plan", PlanId.NEEDED_WEIGHTS.value, random_signal(n, 0), m=m)
    for p in range(m):
        for q in range(cfg.breakpoint, cfg.t + 1):
            assert tr.count(WEIGHTS, p, q) == 2 ** q // (2 * m)


# --- breakpoint invariance -----------------------------------------------------

@pytest.mark.criterion("breakpoint invariance")
@pytest.mark.parametrize("mode,ident", PARALLEL)
def test_breakpoint_invariance(mode, ident):
    bps = list(breakpoint_range(1024, 4))
    assert bps == list(range(3, 10))
    for s in range(3):
        x, _ = signal_and_oracle(1024, s)
        outs = [compute(mode, ident, x, m=4, breakpoint=bp)[0] for bp in bps]
        for y in outs[1:]:
            assert np.array_equal(y, outs[0])


# --- redistribution round trips --------------------------------------------------

@pytest.mark.criterion("redistribution round trips")
@pytest.mark.parametrize("m", [2, 4, 8])
@pytest.mark.parametrize("there,back", [
    (RedistKind.CENTRALIZED_TO_BLOCK, RedistKind.BLOCK_TO_CENTRALIZED),
    (RedistKind.CENTRALIZED_TO_CYCLIC, RedistKind.CYCLIC_TO_CENTRALIZED),
])
def test_round_trip(there, back, m):
    cfg = validate_config(256, m)
    x = random_signal(256, m)
    states = make_states(cfg)
    states[0].load("x", x)
    redistribute(there, states, cfg, audit=True)
    redistribute(back, states, cfg, audit=True)
    assert np.array_equal(states[0].x, x)


@pytest.mark.criterion("redistribution round trips")
@pytest.mark.parametrize("m", [2, 4, 8])
def test_block_to_cyclic_routes_agree(m):
    cfg = validate_config(256, m)
    x = random_signal(256, 3)
    a, b = _block_states(cfg, x), _block_states(cfg, x)
    redistribute(RedistKind.BLOCK_TO_CYCLIC_DIRECT, a, cfg, audit=True)
    redistribute(RedistKind.BLOCK_TO_CYCLIC_VIA_CENTRAL, b, cfg, audit=True)
    for sa, sb in zip(a, b):
        mine = np.arange(sa.myid, 256, m)
        assert np.array_equal(sa.x[mine], x[mine])
        assert np.array_equal(sb.x[mine], x[mine])
        assert np.array_equal(sa.held["x"], sb.held["x"])


# --- Parseval and linearity ------------------------------------------------------

@pytest.mark.criterion("parseval and linearity")
@pytest.mark.parametrize("mode,ident", EVERY)
def test_parseval_and_linearity(mode, ident):
    a, b = 0.75 - 0.5j, -1.25 + 2j
    for n, m in [(64, 1), (256, 4), (1024, 8)]:
        if mode == "seq":
            m = 1
        for s in range(5):
            x, y = random_signal(n, s), random_signal(n, s + 100)
            X = compute(mode, ident, x, m=m)[0]
            Y = compute(mode, ident, y, m=m)[0]
            energy = n * np.sum(np.abs(x) ** 2)
            assert abs(np.sum(np.abs(X) ** 2) - energy) <= 1e-10 * energy
            Z = compute(mode, ident, a * x + b * y, m=m)[0]
            assert rel_l2_error(Z, a * X + b * Y) <= 1e-10


# --- sweep format -----------------------------------------------------------------

@pytest.mark.criterion("sweep format")
def test_sweep_format_and_doubling_report():
    args = build_parser().parse_args(["sweep", "--sizes", "3-8", "--entries", "seq:inplace,dist:partitioned",
                                      "--m", "2", "--repeat", "1", "--output", "json"])
    table = sweep_command(args)
    assert table["columns"] == ["t", "n", "seq:inplace time_s", "seq:inplace ok",
                                "dist:partitioned@m=2 time_s", "dist:partitioned@m=2 ok"]
    assert [r["t"] for r in table["rows"]] == list(range(3, 9))
    for row in table["rows"]:
        assert row["seq:inplace ok"] is True and row["dist:partitioned@m=2 ok"] is True
        assert row["seq:inplace time_s"] > 0
    # ratios are reported, never judged
    for pairs in table["doubling"].values():
        assert [p["from_t"] for p in pairs] == list(range(3, 8))
        assert all(p["ratio"] > 0 for p in pairs)
