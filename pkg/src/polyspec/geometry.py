"""Polytopes in R^d: loading, validation, faces orthogonal to a direction.

A polytope is given by its vertices, its boundary faces (vertex-index
cycles) and a decomposition of the solid into simplices. Convex input gets
a fan decomposition from vertex 0; non-convex input must supply one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .tolerances import DEFAULT, Tolerances


class PolytopeError(ValueError):
    """Base class for malformed or invalid polytope input."""


class ParseError(PolytopeError):
    pass


class ValidationError(PolytopeError):
    pass


class NonPlanarFace(ValidationError):
    pass


class ClosureViolation(ValidationError):
    pass


class DegenerateBody(ValidationError):
    pass


class NonConvexWithoutDecomposition(ValidationError):
    pass


class OverlappingSimplices(ValidationError):
    pass


class VolumeMismatch(ValidationError):
    pass


class FaceOrientationError(ValidationError):
    pass


class NonUnitDirection(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Face:
    vertices: tuple[int, ...]
    normal: np.ndarray
    measure: float
    offset: float
    # (d-1)-simplices covering the face: vertex-index tuples and signed measures
    pieces: tuple[tuple[int, ...], ...] = ()
    piece_measures: tuple[float, ...] = ()


@dataclass(frozen=True, eq=False)
class Simplex:
    points: np.ndarray
    signed_volume: float


@dataclass(frozen=True, eq=False)
class Polytope:
    dimension: int
    vertices: np.ndarray
    faces: tuple[Face, ...]
    simplices: tuple[Simplex, ...]
    simplex_indices: tuple[tuple[int, ...], ...]
    volume: float
    name: str = ""
    scale: float = 1.0
    explicit_simplices: bool = False
    _bary: np.ndarray = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return self.dimension

    @property
    def surface_measure(self) -> float:
        return float(sum(f.measure for f in self.faces))

    @property
    def diameter(self) -> float:
        v = self.vertices
        return float(np.sqrt(((v[:, None, :] - v[None, :, :]) ** 2).sum(-1)).max())

    @property
    def centroid(self) -> np.ndarray:
        pts = np.array([s.points.mean(axis=0) for s in self.simplices])
        w = np.array([abs(s.signed_volume) for s in self.simplices])
        return (pts * w[:, None]).sum(axis=0) / w.sum()

    def simplex_array(self) -> tuple[np.ndarray, np.ndarray]:
        """Stacked simplex vertices (S, d+1, d) and absolute volumes (S,)."""
        pts = np.stack([s.points for s in self.simplices])
        vol = np.array([abs(s.signed_volume) for s in self.simplices])
        return pts, vol

    def closure_vector(self) -> np.ndarray:
        return sum(f.measure * f.normal for f in self.faces)

    def divergence_volume(self) -> float:
        return float(sum(f.measure * f.offset for f in self.faces)) / self.dimension

    def contains(self, points, tol: float = 1e-12) -> np.ndarray:
        """Boundary-inclusive membership via barycentric coordinates."""
        return _barycentric_min(self._bary, np.atleast_2d(points)).max(axis=0) >= -tol

    def translated(self, shift) -> "Polytope":
        shift = np.asarray(shift, dtype=float)
        return _with_scale(_rebuild(self, self.vertices + shift), self.scale)

    def scaled(self, factor: float) -> "Polytope":
        p = _rebuild(self, self.vertices * factor)
        return _with_scale(p, self.scale * factor)

    def as_document(self) -> dict:
        doc = {
            "dimension": self.dimension,
            "vertices": self.vertices.tolist(),
            "faces": [list(f.vertices) for f in self.faces],
        }
        if self.explicit_simplices:
            doc["simplices"] = [list(s) for s in self.simplex_indices]
        if self.name:
            doc["name"] = self.name
        return doc


def _with_scale(p: Polytope, scale: float) -> Polytope:
    object.__setattr__(p, "scale", float(scale))
    return p


def _rebuild(p: Polytope, vertices: np.ndarray) -> Polytope:
    return build_polytope(
        vertices,
        [f.vertices for f in p.faces],
        simplices=p.simplex_indices if p.explicit_simplices else None,
        name=p.name,
    )


# --- construction ----------------------------------------------------------


def load_polytope(document, tol: Tolerances = DEFAULT) -> Polytope:
    """Build a validated polytope from a JSON string, bytes or parsed dict."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ParseError("polytope document must be a JSON object")
    for key in ("dimension", "vertices", "faces"):
        if key not in document:
            raise ParseError(f"missing field {key!r}")
    try:
        d = int(document["dimension"])
        vertices = np.asarray(document["vertices"], dtype=float)
        faces = [tuple(int(i) for i in f) for f in document["faces"]]
        simplices = document.get("simplices")
        if simplices is not None:
            simplices = [tuple(int(i) for i in s) for s in simplices]
        normals = document.get("normals")
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed polytope document: {exc}") from exc
    if vertices.ndim != 2 or vertices.shape[1] != d:
        raise ParseError(f"vertices must be an array of {d}-vectors")
    return build_polytope(
        vertices, faces, simplices=simplices, normals=normals,
        name=str(document.get("name", "")), tol=tol,
    )


def load_polytope_file(path, tol: Tolerances = DEFAULT) -> Polytope:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return load_polytope(text, tol=tol)


def build_polytope(
    vertices,
    faces: Sequence[Sequence[int]],
    simplices: Sequence[Sequence[int]] | None = None,
    normals=None,
    name: str = "",
    tol: Tolerances = DEFAULT,
) -> Polytope:
    V = np.asarray(vertices, dtype=float)
    if V.ndim != 2:
        raise ParseError("vertices must be a 2-D array")
    n, d = V.shape
    if d < 1:
        raise ParseError("dimension must be >= 1")
    if n < d + 1:
        raise ParseError(f"need at least {d + 1} vertices in dimension {d}")
    if not np.all(np.isfinite(V)):
        raise ParseError("vertices must be finite")
    faces = [tuple(int(i) for i in f) for f in faces]
    if not faces:
        raise ParseError("no faces")
    for f in faces:
        if any(i < 0 or i >= n for i in f):
            raise ParseError(f"face {list(f)} has an out-of-range vertex index")
        if len(set(f)) != len(f):
            raise ParseError(f"face {list(f)} repeats a vertex")
    scale = max(1.0, float(np.abs(V).max()))

    raw = [_face_geometry(V, f, tol, scale) for f in faces]

    if simplices is not None:
        simplex_idx = [tuple(int(i) for i in s) for s in simplices]
        for s in simplex_idx:
            if len(s) != d + 1 or any(i < 0 or i >= n for i in s):
                raise ParseError(f"simplex {list(s)} must list {d + 1} valid vertex indices")
        simplex_objs = [_make_simplex(V[list(s)]) for s in simplex_idx]
        bary = _bary_matrices(simplex_objs, tol)
        oriented = [_orient_by_membership(V, fr, bary, scale) for fr in raw]
        explicit = True
    else:
        inner = V.mean(axis=0)
        oriented = [_orient_away_from(fr, inner) for fr in raw]
        for fr in oriented:
            if np.any(V @ fr["normal"] > fr["offset"] + tol.planar * scale):
                raise NonConvexWithoutDecomposition(
                    f"face {list(fr['vertices'])} does not support the vertex set; "
                    "non-convex polytopes need explicit 'simplices'"
                )
        simplex_idx = _fan(V, oriented, tol, scale)
        if not simplex_idx:
            raise DegenerateBody("body has zero volume")
        simplex_objs = [_make_simplex(V[list(s)]) for s in simplex_idx]
        bary = _bary_matrices(simplex_objs, tol)
        explicit = False

    face_objs = tuple(
        Face(
            vertices=fr["vertices"],
            normal=fr["normal"],
            measure=fr["measure"],
            offset=fr["offset"],
            pieces=tuple(fr["pieces"]),
            piece_measures=tuple(fr["piece_measures"]),
        )
        for fr in oriented
    )

    if normals is not None:
        _check_explicit_normals(face_objs, normals, tol)

    volume = float(sum(abs(s.signed_volume) for s in simplex_objs))
    if volume <= tol.closure:
        raise DegenerateBody("body has zero volume")

    poly = Polytope(
        dimension=d,
        vertices=V,
        faces=face_objs,
        simplices=tuple(simplex_objs),
        simplex_indices=tuple(simplex_idx),
        volume=volume,
        name=name,
        explicit_simplices=explicit,
        _bary=bary,
    )
    _validate(poly, tol)
    return poly


def _face_geometry(V: np.ndarray, f: tuple[int, ...], tol: Tolerances, scale: float) -> dict:
    d = V.shape[1]
    pts = V[list(f)]
    if d == 1:
        if len(f) != 1:
            raise ParseError("faces of a 1-D polytope are single vertices")
        return dict(vertices=f, normal=np.array([1.0]), offset=float(pts[0, 0]),
                    measure=1.0, pieces=[f], piece_measures=[1.0])
    if len(f) < d:
        raise ParseError(f"face {list(f)} needs at least {d} vertices")
    if d == 2 and len(f) != 2:
        raise ParseError("faces of a polygon are edges with exactly 2 vertices")
    if d >= 4 and len(f) != d:
        raise ParseError(f"faces in dimension {d} must be simplices ({d} vertices)")
    diffs = pts[1:] - pts[0]
    _, sv, vt = np.linalg.svd(diffs)
    if len(sv) < d - 1 or sv[d - 2] <= tol.planar * scale:
        raise DegenerateBody(f"face {list(f)} does not span a hyperplane")
    normal = vt[-1]
    # deterministic sign before orientation
    k = int(np.argmax(np.abs(normal)))
    if normal[k] < 0:
        normal = -normal
    offset = float(pts[0] @ normal)
    if np.any(np.abs(pts @ normal - offset) > tol.planar * scale):
        raise NonPlanarFace(f"face {list(f)} is not planar")

    if d == 2:
        pieces = [f]
        measures = [float(np.linalg.norm(diffs[0]))]
    elif d == 3:
        pieces, measures = [], []
        for k in range(1, len(f) - 1):
            a, b = pts[k] - pts[0], pts[k + 1] - pts[0]
            pieces.append((f[0], f[k], f[k + 1]))
            measures.append(0.5 * float(np.cross(a, b) @ normal))
        if sum(measures) < 0:
            measures = [-m for m in measures]
    else:
        gram = diffs @ diffs.T
        pieces = [f]
        measures = [math.sqrt(max(np.linalg.det(gram), 0.0)) / math.factorial(d - 1)]
    measure = float(sum(measures))
    if measure <= 0:
        raise DegenerateBody(f"face {list(f)} has zero measure")
    return dict(vertices=f, normal=normal, offset=offset, measure=measure,
                pieces=pieces, piece_measures=measures)


def _flip(fr: dict) -> dict:
    out = dict(fr)
    out["normal"] = -fr["normal"]
    out["offset"] = -fr["offset"]
    return out


def _orient_away_from(fr: dict, inner: np.ndarray) -> dict:
    if inner @ fr["normal"] > fr["offset"]:
        return _flip(fr)
    return fr


def _orient_by_membership(V: np.ndarray, fr: dict, bary: np.ndarray, scale: float) -> dict:
    delta = 1e-7 * scale
    for piece in fr["pieces"]:
        c = V[list(piece)].mean(axis=0)
        probes = np.array([c + delta * fr["normal"], c - delta * fr["normal"]])
        inside = _barycentric_min(bary, probes).max(axis=0) >= 0.0
        if inside[0] != inside[1]:
            return _flip(fr) if inside[0] else fr
    raise FaceOrientationError(
        f"cannot orient face {list(fr['vertices'])}: the simplices do not border it on one side"
    )


def _fan(V: np.ndarray, faces: list[dict], tol: Tolerances, scale: float) -> list[tuple[int, ...]]:
    d = V.shape[1]
    if d == 1:
        lo, hi = int(np.argmin(V[:, 0])), int(np.argmax(V[:, 0]))
        return [(lo, hi)]
    base = 0
    out = []
    for fr in faces:
        if abs(V[base] @ fr["normal"] - fr["offset"]) <= tol.planar * scale:
            continue
        for piece, m in zip(fr["pieces"], fr["piece_measures"]):
            if abs(m) <= tol.planar * scale:
                continue
            out.append((base,) + tuple(piece))
    return out


def _make_simplex(points: np.ndarray) -> Simplex:
    d = points.shape[1]
    vol = np.linalg.det(points[1:] - points[0]) / math.factorial(d)
    if abs(vol) <= 1e-14 * max(1.0, float(np.abs(points).max())) ** d:
        raise DegenerateBody("simplex with zero volume")
    return Simplex(points=points.copy(), signed_volume=float(vol))


def _bary_matrices(simplices: list[Simplex], tol: Tolerances) -> np.ndarray:
    """Per simplex an affine map x -> barycentric coordinates, shape (S, d+1, d+1)."""
    mats = []
    for s in simplices:
        d = s.points.shape[1]
        A = np.vstack([s.points.T, np.ones(d + 1)])
        mats.append(np.linalg.inv(A))
    return np.stack(mats)


def _barycentric_min(bary: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Minimum barycentric coordinate of each point in each simplex, shape (S, N)."""
    pts = np.asarray(points, dtype=float)
    h = np.hstack([pts, np.ones((len(pts), 1))])
    coords = np.einsum("sij,nj->sni", bary, h)
    return coords.min(axis=2)


def _check_explicit_normals(faces: tuple[Face, ...], normals, tol: Tolerances) -> None:
    normals = np.asarray(normals, dtype=float)
    if normals.shape != (len(faces), faces[0].normal.shape[0]):
        raise ParseError("'normals' must list one normal per face")
    for f, n in zip(faces, normals):
        if abs(np.linalg.norm(n) - 1.0) > tol.unit or np.linalg.norm(n - f.normal) > 1e-6:
            raise ValidationError(
                f"declared normal {n.tolist()} for face {list(f.vertices)} "
                f"disagrees with computed outward normal {f.normal.tolist()}"
            )


def _validate(p: Polytope, tol: Tolerances) -> None:
    scale = max(1.0, float(np.abs(p.vertices).max()))
    closure = p.closure_vector()
    if np.any(np.abs(closure) > tol.closure * scale ** (p.d - 1)):
        raise ClosureViolation(f"sum of measure-weighted normals is {closure.tolist()}, not 0")
    vdiv = p.divergence_volume()
    if abs(vdiv - p.volume) > tol.closure * max(1.0, p.volume):
        raise VolumeMismatch(
            f"simplex volume {p.volume!r} differs from boundary volume {vdiv!r}"
        )
    if p.explicit_simplices and len(p.simplices) > 1:
        _check_overlap(p)


def _check_overlap(p: Polytope) -> None:
    samples, owner = [], []
    for k, s in enumerate(p.simplices):
        c = s.points.mean(axis=0)
        samples.append(c)
        owner.append(k)
        for v in s.points:
            samples.append(0.1 * v + 0.9 * c)
            samples.append(0.6 * v + 0.4 * c)
            owner.extend([k, k])
    mins = _barycentric_min(p._bary, np.array(samples))
    owner = np.array(owner)
    strictly_inside = mins > 1e-9
    strictly_inside[owner, np.arange(len(owner))] = False
    if strictly_inside.any():
        a, b = np.argwhere(strictly_inside)[0]
        raise OverlappingSimplices(f"simplices {int(owner[b])} and {int(a)} overlap")


# --- direction analysis ----------------------------------------------------


@dataclass(frozen=True)
class OrthogonalFace:
    index: int
    sign: int
    measure: float
    offset: float  # value of <x, xi> on the face


@dataclass(frozen=True, eq=False)
class DirectionReport:
    direction: np.ndarray
    faces: tuple[OrthogonalFace, ...]
    imbalance: float
    near_parallel: tuple[int, ...] = ()

    @property
    def flagged(self) -> bool:
        return bool(self.near_parallel)

    def as_dict(self) -> dict:
        return {
            "direction": self.direction.tolist(),
            "faces": [vars(f) for f in self.faces],
            "imbalance": self.imbalance,
            "near_parallel_faces": list(self.near_parallel),
        }


def unit_direction(xi, tol: Tolerances = DEFAULT) -> np.ndarray:
    xi = np.asarray(xi, dtype=float).ravel()
    if abs(np.linalg.norm(xi) - 1.0) > tol.unit:
        raise NonUnitDirection(f"direction {xi.tolist()} is not a unit vector")
    return xi


def direction_report(p: Polytope, xi, tol: Tolerances = DEFAULT) -> DirectionReport:
    xi = unit_direction(xi, tol)
    if xi.shape != (p.d,):
        raise ValueError(f"direction has dimension {xi.size}, polytope {p.d}")
    entries, near = [], []
    total = 0.0
    for i, f in enumerate(p.faces):
        c = float(f.normal @ xi)
        if c > 1.0 - tol.align:
            sign = 1
        elif c < -(1.0 - tol.align):
            sign = -1
        else:
            if abs(c) > 1.0 - tol.near_parallel:
                near.append(i)
            continue
        lam = float((p.vertices[list(f.vertices)] @ xi).mean())
        entries.append(OrthogonalFace(index=i, sign=sign, measure=f.measure, offset=lam))
        total += sign * f.measure
    return DirectionReport(direction=xi, faces=tuple(entries), imbalance=total,
                           near_parallel=tuple(near))


def imbalance_criterion(p: Polytope, xi, tol: Tolerances = DEFAULT) -> tuple[bool, float]:
    """Whether the signed area of the faces normal to ``xi`` fails to cancel.

    Returns ``(applicable, imbalance)``; when applicable the polytope admits
    no orthonormal basis of exponentials.
    """
    rep = direction_report(p, xi, tol)
    return abs(rep.imbalance) > tol.imbalance, rep.imbalance


def normalize_volume(p: Polytope) -> Polytope:
    """Scale isotropically about the origin to unit volume (scale is recorded)."""
    return p.scaled(p.volume ** (-1.0 / p.d))


def axis(d: int, k: int) -> np.ndarray:
    e = np.zeros(d)
    e[k] = 1.0
    return e


def parse_vector(text: str | Iterable[float]) -> np.ndarray:
    if isinstance(text, str):
        return np.array([float(x) for x in text.replace(" ", "").split(",") if x])
    return np.asarray(list(text), dtype=float)
