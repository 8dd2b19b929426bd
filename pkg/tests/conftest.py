import itertools

import pytest

from suffixient import fixtures, structs
from suffixient.index import build_index
from suffixient.text import from_codes, normalize, reverse_text

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}

# reference start for the RLZ oracle on the 1 MB fixture; the default start
# is larger than the whole fixture and would leave nothing to compress
FIXTURE_RHO0 = 1 << 10


def small_corpus(sigma: int, max_len: int):
    """Every sentinel-terminated string over the first ``sigma`` letters, lengths 1..max_len."""
    for length in range(1, max_len + 1):
        for w in itertools.product(range(1, sigma + 1), repeat=length):
            yield from_codes(bytes(w) + b"\0")


def structs_of(t):
    return structs.build(reverse_text(t))


@pytest.fixture(scope="session")
def banana():
    return normalize(b"BANANA")


@pytest.fixture(scope="session")
def repetitive_raw():
    return fixtures.repetitive_dna()


@pytest.fixture(scope="session")
def repetitive_text(repetitive_raw):
    return normalize(repetitive_raw)


@pytest.fixture(scope="session")
def repetitive_index(repetitive_text):
    idx, info = build_index(repetitive_text)
    return idx, info


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
