import functools

import numpy as np
import pytest
from hypothesis import settings

from moafft.fftseq import naive_dft, random_signal
from moafft.moa import parse_literal

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture
def A():
    """The 3 x 5 x 4 array holding 0..59."""
    items = " ".join(str(i) for i in range(60))
    return parse_literal(f"shape: 3 5 4 / items: {items}", name="A")


@functools.lru_cache(maxsize=None)
def signal_and_oracle(n: int, seed: int, sign: int = -1):
    x = random_signal(n, seed)
    x.setflags(write=False)
    ref = naive_dft(x, sign)
    ref.setflags(write=False)
    return x, ref


@pytest.fixture
def oracle():
    return signal_and_oracle


def valid_configs(t_max: int = 12, ms=(1, 2, 4, 8)):
    """Every (n, m, breakpoint) with n = 2..2**t_max, m <= psize."""
    out = []
    for t in range(1, t_max + 1):
        n = 2 ** t
        for m in ms:
            if m * m > n:
                continue
            lm = m.bit_length() - 1
            lp = (n // m).bit_length() - 1
            out.extend((n, m, bp) for bp in range(lm + 1, lp + 2))
    return out


# --- one pass/fail line per acceptance criterion ------------------------------

_CRITERIA: dict[str, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion a test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "call" or (report.when == "setup" and report.failed):
        _CRITERIA.setdefault(name, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, results in _CRITERIA.items():
        status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  ({sum(results)}/{len(results)} checks)")


__all__ = ["signal_and_oracle", "valid_configs", "np"]
