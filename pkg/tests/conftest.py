import math
import random

import pytest

from rdcache.trace import AccessTrace

FIG2_LETTERS = "ABCADBBAAB"


def letters_trace(letters, app_id="fig2"):
    return AccessTrace(app_id, [ord(c) for c in letters])


@pytest.fixture
def fig2():
    return letters_trace(FIG2_LETTERS)


def random_corpus(count=1000, seed=20240601, max_len=10**4, max_footprint=1 << 10):
    """Seeded traces: a tenth at full length, the rest log-uniform in length and footprint.

    Mixes uniform, skewed (squared-uniform) and cyclic address draws.
    """
    rng = random.Random(seed)
    out = []
    for i in range(count):
        if i % 10 == 0:
            length = max_len
        else:
            length = int(math.exp(rng.uniform(0, math.log(max_len))))
        footprint = max(1, int(math.exp(rng.uniform(0, math.log(max_footprint)))))
        style = i % 3
        if style == 0:
            seq = [rng.randrange(footprint) for _ in range(length)]
        elif style == 1:
            seq = [int(footprint * rng.random() ** 2) for _ in range(length)]
        else:
            start = rng.randrange(footprint)
            seq = [(start + k) % footprint for k in range(length)]
        out.append(AccessTrace(f"t{i}", seq))
    return out


_CORPUS = None


@pytest.fixture(scope="session")
def corpus():
    global _CORPUS
    if _CORPUS is None:
        _CORPUS = random_corpus()
    return _CORPUS


# one pass/fail line per acceptance criterion, printed after the run
_CRITERIA: list[tuple[int, str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        _CRITERIA.append((marker.args[0], marker.args[1], rep.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome, detail in sorted(_CRITERIA):
        status = "PASS" if outcome == "passed" else "FAIL"
        line = f"[{status}] criterion {number}: {title}"
        terminalreporter.write_line(f"{line} ({detail})" if detail else line)
