import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import NAMES
from oracles import face_imbalance_from_closure
from polyspec.geometry import (
    ClosureViolation,
    DegenerateBody,
    FaceOrientationError,
    NonConvexWithoutDecomposition,
    NonPlanarFace,
    NonUnitDirection,
    OverlappingSimplices,
    ParseError,
    VolumeMismatch,
    axis,
    build_polytope,
    direction_report,
    imbalance_criterion,
    load_polytope,
    normalize_volume,
    parse_vector,
)

SQUARE = {"dimension": 2, "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]], "faces": [[0, 1], [1, 2], [2, 3], [3, 0]]}


def cube3_doc():
    V = [[x, y, z] for z in (0, 1) for y in (0, 1) for x in (0, 1)]
    F = [[0, 2, 6, 4], [1, 3, 7, 5], [0, 1, 5, 4], [2, 3, 7, 6], [0, 1, 3, 2], [4, 5, 7, 6]]
    return {"dimension": 3, "vertices": V, "faces": F}


@pytest.mark.parametrize("name", NAMES)
def test_corpus_closure(poly, name):
    p = poly(name)
    assert np.abs(p.closure_vector()).max() <= 1e-9
    assert p.divergence_volume() == pytest.approx(p.volume, rel=1e-12)


def test_volumes(poly):
    assert poly("cube2").volume == pytest.approx(1.0)
    assert poly("cube3").volume == pytest.approx(1.0)
    assert poly("triangle").volume == pytest.approx(0.5)
    assert poly("pentagon").volume == pytest.approx(3.5)
    assert poly("notched").volume == pytest.approx(10.5)
    assert poly("rect2x1").volume == pytest.approx(2.0)


def test_outward_normals_square():
    p = load_polytope(SQUARE)
    normals = {tuple(np.round(f.normal, 12)) for f in p.faces}
    assert normals == {(0.0, -1.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0)}


def test_cube3_from_quads():
    p = load_polytope(cube3_doc())
    assert p.volume == pytest.approx(1.0)
    assert p.surface_measure == pytest.approx(6.0)


def test_parse_errors():
    with pytest.raises(ParseError):
        load_polytope("{not json")
    with pytest.raises(ParseError):
        load_polytope({"dimension": 2, "vertices": [[0, 0]]})
    with pytest.raises(ParseError):
        load_polytope({**SQUARE, "faces": [[0, 1], [1, 9]]})
    with pytest.raises(ParseError):
        load_polytope({**SQUARE, "vertices": [[0, 0, 0]] * 4})


def test_nonplanar_face():
    doc = cube3_doc()
    doc["vertices"][6] = [0, 1, 1.2]
    with pytest.raises(NonPlanarFace):
        load_polytope(doc)


def test_open_boundary_rejected():
    doc = {**SQUARE, "faces": [[0, 1], [1, 2], [2, 3]]}
    with pytest.raises((ClosureViolation, NonConvexWithoutDecomposition)):
        load_polytope(doc)


def test_degenerate_body():
    with pytest.raises(DegenerateBody):
        build_polytope([[0, 0], [1, 0], [2, 0]], [[0, 1], [1, 2], [2, 0]])


def test_nonconvex_needs_simplices(poly):
    doc = poly("notched").as_document()
    doc.pop("simplices", None)
    with pytest.raises(NonConvexWithoutDecomposition):
        load_polytope(doc)


def test_overlapping_decomposition():
    # two triangles of the right total area that cover half the square twice
    doc = {**SQUARE, "simplices": [[0, 1, 2], [0, 1, 3]]}
    with pytest.raises((OverlappingSimplices, FaceOrientationError)):
        load_polytope(doc)


def test_decomposition_volume_mismatch():
    doc = {**SQUARE, "simplices": [[0, 1, 2], [0, 2, 3], [0, 1, 3]]}
    with pytest.raises(VolumeMismatch):
        load_polytope(doc)


@pytest.mark.parametrize("name,k,expected", [
    ("triangle", 0, -1.0), ("triangle", 1, -1.0),
    ("pentagon", 0, -1.0), ("pentagon", 1, -1.0),
    ("notched", 0, 1.0), ("notched", 1, -1.0),
    ("cube2", 0, 0.0), ("cube2", 1, 0.0), ("rect2x1", 0, 0.0),
])
def test_imbalance_against_edge_oracle(poly, name, k, expected):
    p = poly(name)
    rep = direction_report(p, axis(2, k))
    assert rep.imbalance == pytest.approx(expected, abs=1e-12)
    assert rep.imbalance == pytest.approx(face_imbalance_from_closure(p, k), abs=1e-12)
    applicable, s = imbalance_criterion(p, axis(2, k))
    assert applicable == (expected != 0)


def test_imbalance_flips_with_direction(poly):
    p = poly("pentagon")
    assert direction_report(p, [0, -1]).imbalance == pytest.approx(1.0)


def test_cube3_balanced(poly):
    for k in range(3):
        assert direction_report(poly("cube3"), axis(3, k)).imbalance == pytest.approx(0.0, abs=1e-12)


def test_non_unit_direction(poly):
    with pytest.raises(NonUnitDirection):
        direction_report(poly("triangle"), [1, 1])


def test_pentagon_faces_along_e2(poly):
    rep = direction_report(poly("pentagon"), [0, 1])
    terms = sorted((f.sign * f.measure, f.offset) for f in rep.faces)
    assert terms == [pytest.approx((-2.0, 0.0)), pytest.approx((1.0, 2.0))]


def test_contains(poly):
    p = poly("notched")
    assert p.contains([[0.5, 0.5], [3.5, 2.5]]).all()
    assert not p.contains([[3.5, 1.5]]).any()  # the notch
    assert not p.contains([[0.2, 2.9]]).any()  # cut corner


def test_normalize_volume(poly):
    q = normalize_volume(poly("pentagon"))
    assert q.volume == pytest.approx(1.0)
    assert q.scale == pytest.approx(3.5 ** -0.5)


def test_roundtrip_document(poly):
    p = poly("notched")
    q = load_polytope(json.dumps(p.as_document()))
    assert q.volume == pytest.approx(p.volume)


def test_parse_vector():
    assert parse_vector("1, 0,-2").tolist() == [1.0, 0.0, -2.0]


@settings(max_examples=30, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0.2, 5))
def test_translation_and_scaling(dx, dy, c):
    p = load_polytope(SQUARE)
    q = p.translated([dx, dy]).scaled(c)
    assert q.volume == pytest.approx(c * c, rel=1e-9)
    assert np.abs(q.closure_vector()).max() <= 1e-9 * max(1.0, c)
    assert direction_report(q, [1, 0]).imbalance == pytest.approx(0.0, abs=1e-9 * max(1, c))
