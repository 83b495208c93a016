import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyspec._divdiff import exp_divided_difference

mpmath.mp.dps = 50


def mp_divdiff(nodes):
    """Reference: contour-free recursive formula in 50-digit arithmetic with distinct nodes."""
    z = [mpmath.mpc(complex(x)) for x in nodes]

    def dd(lo, hi):
        if lo == hi:
            return mpmath.exp(z[lo])
        return (dd(lo + 1, hi) - dd(lo, hi - 1)) / (z[hi] - z[lo])

    return complex(dd(0, len(z) - 1))


@pytest.mark.parametrize("nodes", [
    [0.0, 1j, 2j],
    [-3j, 4.5j, 0.2j, -7j],
    [1e-3j, 2e-3j, -1e-3j],
    [10j, 10.0001j, -30j],
    [0.5 + 0j, -0.25 + 1j],
])
def test_matches_high_precision(nodes):
    got = exp_divided_difference(np.array(nodes, dtype=complex))
    want = mp_divdiff(nodes)
    assert abs(got - want) <= 1e-13 * max(1.0, abs(want))


def test_repeated_nodes_give_derivative_limit():
    # exp[a, a] = exp(a), exp[a, a, a] = exp(a) / 2
    a = 0.7j
    assert exp_divided_difference(np.array([a, a])) == pytest.approx(np.exp(a), abs=1e-15)
    assert exp_divided_difference(np.array([a, a, a])) == pytest.approx(np.exp(a) / 2, abs=1e-15)


def test_all_zero_nodes():
    for m in range(1, 6):
        got = exp_divided_difference(np.zeros(m, dtype=complex))
        assert got == pytest.approx(1 / math.factorial(m - 1), rel=1e-15)


def test_batched_shape():
    z = np.array([[0, 1j, 2j], [0, 0, 0], [5j, -5j, 1j]], dtype=complex)
    out = exp_divided_difference(z)
    assert out.shape == (3,)
    for row, v in zip(z, out):
        assert v == pytest.approx(exp_divided_difference(row), abs=1e-15)


node = st.floats(-40, 40, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(node, min_size=2, max_size=5), st.randoms())
def test_symmetric_in_nodes(xs, rnd):
    z = 1j * np.array(xs)
    perm = list(range(len(xs)))
    rnd.shuffle(perm)
    a = exp_divided_difference(z)
    b = exp_divided_difference(z[perm])
    assert abs(a - b) <= 1e-11


@settings(max_examples=60, deadline=None)
@given(st.lists(node, min_size=2, max_size=4), node)
def test_shift_factor(xs, c):
    # exp[z + c] = e^c exp[z] for imaginary shifts
    z = 1j * np.array(xs)
    a = exp_divided_difference(z + 1j * c)
    b = np.exp(1j * c) * exp_divided_difference(z)
    assert abs(a - b) <= 1e-11
