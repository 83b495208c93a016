import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import NAMES, random_frequencies
from oracles import central_difference_gradient, quadrature_ft
from polyspec.fourier import (
    boundary_decay_bound,
    estimate_grad_constant,
    evaluate,
    face_transforms,
    ft_boundary,
    ft_exact,
    ft_gradient,
    slice_profile,
)

freq = st.floats(-30, 30, allow_nan=False)


def cube_ft(eta):
    eta = np.atleast_2d(eta)
    return np.prod(np.sinc(eta), axis=1)


@pytest.mark.parametrize("name", NAMES)
def test_zero_frequency_is_volume(poly, name):
    p = poly(name)
    assert ft_exact(p, np.zeros(p.d)) == pytest.approx(p.volume, rel=1e-14)


def test_cube_closed_form(poly, rng):
    eta = random_frequencies(rng, 300, 2, 40)
    assert np.abs(ft_exact(poly("cube2"), eta) - cube_ft(eta)).max() < 1e-13
    eta3 = random_frequencies(rng, 100, 3, 20)
    assert np.abs(ft_exact(poly("cube3"), eta3) - cube_ft(eta3)).max() < 1e-13


def test_triangle_against_quadrature(poly, rng):
    p = poly("triangle")
    for eta in random_frequencies(rng, 5, 2, 20):
        assert abs(ft_exact(p, eta) - quadrature_ft(p, eta)) < 1e-9


def test_notched_against_quadrature(poly, rng):
    p = poly("notched")
    for eta in random_frequencies(rng, 3, 2, 3):
        assert abs(ft_exact(p, eta) - quadrature_ft(p, eta)) < 1e-9


@pytest.mark.parametrize("name", NAMES)
def test_boundary_formula_agrees(poly, rng, name):
    p = poly(name)
    eta = random_frequencies(rng, 200, p.d, 50, 1e-3)
    assert np.abs(ft_exact(p, eta) - ft_boundary(p, eta)).max() < 1e-9


def test_boundary_formula_rejects_origin(poly):
    with pytest.raises(ValueError):
        ft_boundary(poly("triangle"), [0.0, 0.0])


def test_face_transforms_at_origin_are_measures(poly):
    p = poly("pentagon")
    got = face_transforms(p, np.zeros(2))[0]
    assert np.allclose(got, [f.measure for f in p.faces], atol=1e-14)


@pytest.mark.parametrize("name", ["triangle", "pentagon", "notched", "cube3"])
def test_gradient_against_finite_differences(poly, rng, name):
    p = poly(name)
    for eta in random_frequencies(rng, 10, p.d, 20):
        fd = central_difference_gradient(lambda e: ft_exact(p, e), eta)
        assert np.abs(ft_gradient(p, eta) - fd).max() < 1e-6


def test_decay_bound(poly, rng):
    for name in ("triangle", "pentagon", "notched"):
        p = poly(name)
        eta = random_frequencies(rng, 500, 2, 60, 0.5)
        assert np.all(np.abs(ft_exact(p, eta)) <= boundary_decay_bound(p, eta) * (1 + 1e-12))


def test_evaluate_methods(poly):
    p = poly("pentagon")
    a = evaluate(p, [0.3, -1.2], "exact-simplex")
    b = evaluate(p, [0.3, -1.2], "boundary-formula")
    assert abs(a.value - b.value) < 1e-12
    assert a.as_dict()["method"] == "exact-simplex"
    with pytest.raises(ValueError):
        evaluate(p, [1, 0], "simpson")


@settings(max_examples=40, deadline=None)
@given(freq, freq)
def test_conjugate_symmetry(x, y):
    from polyspec.corpus import load_entry

    p = load_entry("pentagon")
    eta = np.array([x, y])
    assert abs(ft_exact(p, -eta) - np.conj(ft_exact(p, eta))) < 1e-11


@settings(max_examples=30, deadline=None)
@given(freq, freq, st.floats(-3, 3), st.floats(-3, 3))
def test_translation_is_a_phase(x, y, a, b):
    from polyspec.corpus import load_entry

    p = load_entry("triangle")
    eta = np.array([x, y])
    shifted = p.translated([a, b])
    want = np.exp(-2j * math.pi * (a * x + b * y)) * ft_exact(p, eta)
    assert abs(ft_exact(shifted, eta) - want) < 1e-11


@settings(max_examples=30, deadline=None)
@given(freq, freq, st.floats(0.25, 4))
def test_dilation(x, y, c):
    from polyspec.corpus import load_entry

    p = load_entry("notched")
    eta = np.array([x, y]) / 4
    assert abs(ft_exact(p.scaled(c), eta) - c ** 2 * ft_exact(p, c * eta)) < 1e-9 * c ** 2


def test_triangle_slice_residual_constant(poly):
    # chi_hat(t e1) = 1/(ia) + (1 - e^{-ia}) / a^2 with a = 2 pi t; the residual
    # peaks at half-integers t with value t^2 * 2 / a^2 = 1 / (2 pi^2)
    prof = slice_profile(poly("triangle"), [1, 0], 1, 20, 0.01)
    assert prof.constant == pytest.approx(1 / (2 * math.pi ** 2), rel=1e-9)


def test_slice_rejects_small_t(poly):
    with pytest.raises(ValueError):
        slice_profile(poly("triangle"), [1, 0], 0.5, 10)


def test_cube_slice_has_no_residual(poly):
    prof = slice_profile(poly("cube2"), [1, 0], 1, 30, 0.01)
    assert prof.constant < 1e-12


def test_grad_constant_is_seeded(poly):
    a = estimate_grad_constant(poly("triangle"), t_max=10, n_samples=500, seed=3)
    b = estimate_grad_constant(poly("triangle"), t_max=10, n_samples=500, seed=3)
    assert a == b
    assert a.value == pytest.approx(2 * a.sup)
    assert not a.rigorous
