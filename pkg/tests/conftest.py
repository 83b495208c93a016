import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polyspec.corpus import corpus_list, load_entry  # noqa: E402

NAMES = [e.name for e in corpus_list()]

# filled by tests/test_acceptance.py, printed at the end of the run
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture(scope="session")
def poly():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_entry(name)
        return cache[name]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_frequencies(rng, n, d, r_max, r_min=0.0):
    """Uniform directions, radii uniform in [r_min, r_max]."""
    u = rng.normal(size=(n, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return u * rng.uniform(r_min, r_max, size=(n, 1))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
