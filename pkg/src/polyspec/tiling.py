"""Translational tilings checked by counting multiplicities on a sample grid."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .geometry import Polytope
from .orthopack import PointSet, default_centers, estimate_density

TILES = "tiles"
NOT_A_TILING = "not-a-tiling"


class PaddingError(ValueError):
    """The point sample does not reach far enough around the region."""


@dataclass(eq=False)
class TilingCheck:
    level: float
    verdict: str
    n_samples: int
    n_safe: int
    multiplicity_min: int
    multiplicity_max: int
    multiplicity_mean: float
    exceptional_fraction: float  # boundary-excluded samples
    mismatch_fraction: float  # safe samples whose multiplicity differs from the level
    histogram: dict
    grid_step: float
    boundary_slack: float
    region: tuple = field(default=())

    @property
    def tiles(self) -> bool:
        return self.verdict == TILES

    def as_dict(self) -> dict:
        return {
            "level": self.level,
            "verdict": self.verdict,
            "n_samples": self.n_samples,
            "n_interior_safe": self.n_safe,
            "multiplicity": {"min": self.multiplicity_min, "max": self.multiplicity_max,
                             "mean": self.multiplicity_mean},
            "exceptional_fraction": self.exceptional_fraction,
            "mismatch_fraction": self.mismatch_fraction,
            "histogram": self.histogram,
            "grid_step": self.grid_step,
            "boundary_slack": self.boundary_slack,
            "region": [list(map(float, r)) for r in self.region],
        }


def _sample_grid(lo: np.ndarray, hi: np.ndarray, step: float) -> np.ndarray:
    axes = []
    for a, b in zip(lo, hi):
        n = max(1, int(math.floor((b - a) / step)))
        axes.append(a + step * (np.arange(n) + 0.5))
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, lo.size)


def _near_boundary(tile: Polytope, y: np.ndarray, slack: float) -> np.ndarray:
    """Points of y within ``slack`` of a face (face plane distance plus face bounding box)."""
    near = np.zeros(len(y), dtype=bool)
    for f in tile.faces:
        V = tile.vertices[list(f.vertices)]
        lo, hi = V.min(axis=0) - slack, V.max(axis=0) + slack
        plane = np.abs(y @ f.normal - f.offset) <= slack
        box = np.all((y >= lo) & (y <= hi), axis=1)
        near |= plane & box
    return near


def tiling_check(
    tile: Polytope,
    points: PointSet,
    region,
    level: float = 1.0,
    *,
    grid_step: float | None = None,
    boundary_slack: float | None = None,
    chunk: int = 20_000,
) -> TilingCheck:
    """Count sum_lam 1_tile(x - lam) on a cell-centred grid over ``region``.

    Samples within ``boundary_slack`` of a translated tile boundary are
    excluded. The translates that can reach the region are lam in
    region - tile; the sample must cover that box or the check refuses.
    """
    lo, hi = (np.asarray(r, dtype=float).reshape(tile.d) for r in region)
    diam = tile.diameter
    step = diam / 64 if grid_step is None else grid_step
    slack = 1e-6 * diam if boundary_slack is None else boundary_slack
    pts = points.points
    need_lo = lo - tile.vertices.max(axis=0)
    need_hi = hi - tile.vertices.min(axis=0)
    pad = 1e-9 * max(1.0, diam)
    if len(pts) == 0 or np.any(pts.min(axis=0) > need_lo + pad) or np.any(pts.max(axis=0) < need_hi - pad):
        raise PaddingError(
            f"points must cover the box {need_lo.tolist()} .. {need_hi.tolist()} (region minus tile)"
        )
    x = _sample_grid(lo, hi, step)
    center = tile.centroid
    reach = float(np.linalg.norm(tile.vertices - center, axis=1).max()) + slack
    tree = cKDTree(pts)
    counts = np.zeros(len(x), dtype=np.int64)
    excluded = np.zeros(len(x), dtype=bool)
    for s in range(0, len(x), chunk):
        xs = x[s:s + chunk]
        nbrs = tree.query_ball_point(xs - center, reach)
        rows = np.repeat(np.arange(len(xs)), [len(n) for n in nbrs])
        cols = np.concatenate([np.asarray(n, dtype=np.int64) for n in nbrs]) if len(rows) else np.zeros(0, int)
        y = xs[rows] - pts[cols]
        inside = tile.contains(y, tol=1e-12) if len(y) else np.zeros(0, bool)
        near = _near_boundary(tile, y, slack) if len(y) else np.zeros(0, bool)
        counts[s:s + chunk] = np.bincount(rows[inside], minlength=len(xs))
        excluded[s:s + chunk] = np.bincount(rows[near], minlength=len(xs)) > 0
    safe = counts[~excluded]
    values, freq = np.unique(safe, return_counts=True)
    level_f = float(level)
    mismatch = float(np.mean(safe != level_f)) if len(safe) else 1.0
    verdict = TILES if len(safe) and mismatch == 0.0 else NOT_A_TILING
    return TilingCheck(
        level=level_f,
        verdict=verdict,
        n_samples=int(len(x)),
        n_safe=int(len(safe)),
        multiplicity_min=int(safe.min()) if len(safe) else 0,
        multiplicity_max=int(safe.max()) if len(safe) else 0,
        multiplicity_mean=float(safe.mean()) if len(safe) else 0.0,
        exceptional_fraction=float(excluded.mean()),
        mismatch_fraction=mismatch,
        histogram={str(int(v)): int(c) for v, c in zip(values, freq)},
        grid_step=step,
        boundary_slack=slack,
        region=(lo, hi),
    )


def remark1_check(tile: Polytope, points: PointSet, level: float, check: TilingCheck | None = None,
                  centers=None, radii=None, rel_tol: float = 0.05) -> dict:
    """Compare the density of a tiling set with level / volume."""
    if check is not None and not check.tiles:
        raise ValueError("the density identity applies to tilings; the check did not tile")
    pts = points.points
    window = (pts.min(axis=0), pts.max(axis=0))
    side = float((window[1] - window[0]).min())
    if radii is None:
        radii = side * np.array([0.1, 0.2, 0.4])
    if centers is None:
        centers = default_centers(window, float(np.max(radii)))
    dens = estimate_density(points, centers, radii, window)
    target = float(level) / tile.volume
    err = abs(dens["estimate"] - target) / target
    return {
        "density_estimate": dens["estimate"],
        "spread": dens["spread"],
        "clipped": dens["clipped"],
        "target": target,
        "relative_error": err,
        "tolerance": rel_tol,
        "passed": bool(err <= rel_tol and not dens["clipped"]),
    }
