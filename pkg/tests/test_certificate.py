import math
from fractions import Fraction

import numpy as np
import pytest

from polyspec.certificate import (
    CERTIFIED,
    INCONCLUSIVE,
    CriterionInapplicable,
    PreconditionError,
    density_contradiction,
    derive_constants,
    direction_frame,
    separation_check,
    synthetic_pair,
    tube_capacity,
)
from polyspec.fourier import estimate_grad_constant, estimate_slice_constant
from polyspec.geometry import build_polytope


@pytest.fixture(scope="module")
def tri_constants(poly):
    p = poly("triangle")
    return estimate_grad_constant(p), estimate_slice_constant(p, [1, 0])


@pytest.fixture(scope="module")
def tri_report(poly, tri_constants):
    g, s = tri_constants
    return derive_constants(poly("triangle"), [1, 0], Fraction(1, 6), grad_constant=g, slice_constant=s)


def test_constants_follow_the_formulas(tri_report):
    r = tri_report
    d, eps = 2, 1 / 6
    assert r.N > 6 * r.k_cert * r.ell * math.sqrt(d - 1) / eps
    assert r.N - 1 <= 1.05 * max(6 * r.k_cert * r.ell / eps, r.k_cert * r.ell / eps)
    assert r.D > 2 * r.k_cert / eps
    assert r.D == pytest.approx(12 * r.k_cert * 1.05)
    assert r.k_cert >= 1
    parts = r.constants["K_cert_parts"]
    assert r.k_cert == pytest.approx(max(1, *parts.values()))


def test_all_logged_inequalities_hold(tri_report):
    bad = [c for c in tri_report.log if not c.holds]
    assert not bad
    assert all(c.margin >= 0 for c in tri_report.log)


def test_chain_signs(tri_report):
    log = {c.name: c for c in tri_report.log}
    assert log["boundary.f_upper_bound"].rhs == pytest.approx(1 / 3)
    assert log["boundary.f_upper_bound"].margin > 0
    assert log["boundary.f_lower_bound"].rhs == pytest.approx(1 - 4 / 6)
    assert log["boundary.contradiction"].margin > 0
    eps_check = log["eps_contradiction"]
    assert eps_check.margin == 0 and eps_check.holds  # 2 eps = 1 - 4 eps at eps = 1/6


def test_monotone_in_epsilon(poly, tri_constants):
    g, s = tri_constants
    reps = [derive_constants(poly("triangle"), [1, 0], Fraction(1, q), grad_constant=g, slice_constant=s)
            for q in (6, 8, 12)]
    assert reps[0].N <= reps[1].N <= reps[2].N
    assert reps[0].D < reps[1].D < reps[2].D


def test_pentagon_constants(poly):
    r = derive_constants(poly("pentagon"), [0, 1])
    assert r.ell == pytest.approx(0.474, abs=2e-3)
    assert r.N == math.floor(max(36 * r.k_cert * r.ell, 6 * r.k_cert * r.ell) * 1.05) + 1
    P, Q = tube_capacity(r, 1.0)
    assert Q == 2 * r.N * P


def test_rejections(poly):
    with pytest.raises(ValueError):
        derive_constants(poly("triangle"), [1, 0], 0)
    with pytest.raises(CriterionInapplicable):
        derive_constants(poly("cube2"), [1, 0])


def test_tube_region(tri_report):
    tube = tri_report.tube
    h = tri_report.side
    assert tube.interval(0) == (0.0, h)
    assert tube.taus[0 - tube.k_min] == 0.0
    for k in range(tube.k_min, tube.k_max + 1, 997):
        a, b = tube.interval(k)
        assert b - a == pytest.approx(h)
        assert k * tube.ell - 1e-12 <= a and b <= (k + 1) * tube.ell + 1e-12
    assert tube.contains([[0.5 * h, 0.5 * h]]).all()
    assert not tube.contains([[0.5 * h, 2 * h]]).any()


def test_find_shift_places_both_points(poly):
    r = derive_constants(poly("pentagon"), [0, 1])
    lam1, lam2 = np.array([0.3, 7.0]), np.array([0.3 + 0.5 * r.side, -3.0])
    s = r.tube.find_shift(lam1, lam2)
    assert s is not None
    assert r.tube.contains(np.vstack([lam1, lam2]), s).all()
    assert r.tube.find_shift(lam1, lam2 + [5 * r.side, 0]) is None  # transverse gap too wide
    assert r.tube.find_shift(lam1, lam2 + [0, 0.25]) is None  # no pair of L-intervals that far apart


def test_direction_frame():
    F = direction_frame(np.array([0.6, 0.8]))
    assert np.allclose(F @ F.T, np.eye(2))
    assert np.allclose(F[-1], [0.6, 0.8])
    assert np.array_equal(direction_frame(np.array([0.0, 1.0])), [[1.0, 0.0], [0.0, 1.0]])


def test_synthetic_pair_is_in_one_translate(tri_report):
    lam1, lam2 = synthetic_pair(tri_report)
    assert np.linalg.norm(lam1 - lam2) >= tri_report.D
    assert tri_report.tube.contains(np.vstack([lam1, lam2])).all()


def test_separation_rejects_close_pair(tri_report):
    with pytest.raises(PreconditionError):
        separation_check(tri_report, np.array([0.0, 0.0]), np.array([1.0, 0.0]), assume_orthogonal=True)


def test_separation_rejects_non_orthogonal_pair(tri_report):
    lam1, lam2 = synthetic_pair(tri_report)
    with pytest.raises(PreconditionError):
        separation_check(tri_report, lam1, lam2)


def test_capacity(tri_report):
    P, Q = tube_capacity(tri_report, 1.0)
    assert Q == 2 * tri_report.N * P
    assert tube_capacity(tri_report, 1e9)[0] == 1
    with pytest.raises(ValueError):
        tube_capacity(tri_report, 0.0)
    tube_capacity(tri_report, 1.0)


def test_density_contradiction_empty_and_small(tri_report):
    tube_capacity(tri_report, math.sqrt(2))
    res = density_contradiction(tri_report, np.zeros((0, 2)), (np.zeros(2), np.full(2, 50.0)))
    assert res["verdict"] == CERTIFIED and res["max_tube_count"] == 0
    assert res["empirical_density"] == 0.0
    small = density_contradiction(tri_report, np.zeros((0, 2)), (np.zeros(2), np.full(2, 1e-4)))
    assert small["verdict"] == INCONCLUSIVE
    assert tri_report.verdict == INCONCLUSIVE
    density_contradiction(tri_report, np.zeros((0, 2)), (np.zeros(2), np.full(2, 50.0)))
    assert tri_report.verdict == CERTIFIED


def test_density_contradiction_counts_tubes(tri_report):
    tube_capacity(tri_report, math.sqrt(2))
    # every point in one tube translate: count exceeds Q
    Q = tri_report.Q
    pts = np.column_stack([np.arange(Q + 1, dtype=float), np.zeros(Q + 1)])
    res = density_contradiction(tri_report, pts, (np.zeros(2), np.array([Q + 1.0, 50.0])))
    assert res["max_tube_count"] == Q + 1
    assert res["verdict"] == INCONCLUSIVE
    density_contradiction(tri_report, np.zeros((0, 2)), (np.zeros(2), np.full(2, 50.0)))


def test_tetrahedron_in_three_dimensions():
    V = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]
    F = [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]]
    p = build_polytope(V, F, name="tetra")
    r = derive_constants(p, [0, 0, 1])
    assert r.imbalance == pytest.approx(-0.5)
    assert r.N > 6 * r.k_cert * r.ell * math.sqrt(2) / (1 / 6)
    assert all(c.holds for c in r.log)
    P, Q = tube_capacity(r, 1.0)
    assert Q == 2 * r.N * P


def test_report_serializes(tri_report):
    import json

    tube_capacity(tri_report, math.sqrt(2))
    doc = tri_report.as_dict()
    assert doc["epsilon"] == "1/6"
    assert doc["Q"] == 2 * doc["N"] * doc["P"]
    json.dumps(doc)
