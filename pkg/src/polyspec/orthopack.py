"""Orthogonal exponentials: zero probing, greedy packing, density and the tiling-sum probe.

Two frequencies lam, mu give orthogonal exponentials on the body exactly when
chi_hat(lam - mu) = 0, so everything here reduces to locating zeros of the
transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fourier import ft_boundary, ft_exact, ft_gradient
from .geometry import Polytope, unit_direction
from .tolerances import DEFAULT, Tolerances

PROVENANCES = ("lattice", "greedy-packing", "user-supplied")


class ProbeError(ValueError):
    pass


class TailTooLarge(ValueError):
    pass


@dataclass(eq=False)
class PointSet:
    dimension: int
    points: np.ndarray
    provenance: str = "user-supplied"
    seed: int | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, self.dimension)
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}")
        if len(pts) > 1:
            uniq = np.unique(pts, axis=0)
            if len(uniq) != len(pts):
                raise ValueError("points must be pairwise distinct")
        self.points = pts

    def __len__(self) -> int:
        return len(self.points)

    def min_distance(self) -> float:
        if len(self) < 2:
            return math.inf
        from scipy.spatial import cKDTree

        dist, _ = cKDTree(self.points).query(self.points, k=2)
        return float(dist[:, 1].min())

    def as_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "points": self.points.tolist(),
            "provenance": self.provenance,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PointSet":
        return cls(int(doc["dimension"]), np.asarray(doc["points"], dtype=float).reshape(-1, int(doc["dimension"])),
                   doc.get("provenance", "user-supplied"), doc.get("seed"))


def lattice_points(lo, hi, spacing=1.0, offset=0.0) -> PointSet:
    """Points of offset + (spacing-scaled) Z^d inside the box [lo, hi]."""
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    d = lo.size
    spacing = np.broadcast_to(np.asarray(spacing, dtype=float), (d,))
    offset = np.broadcast_to(np.asarray(offset, dtype=float), (d,))
    axes = []
    for a, b, s, o in zip(lo, hi, spacing, offset):
        k0, k1 = math.ceil((a - o) / s - 1e-9), math.floor((b - o) / s + 1e-9)
        axes.append(o + s * np.arange(k0, k1 + 1))
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    return PointSet(d, grid, "lattice")


def orthogonality_test(p: Polytope, lam, mu, tol: Tolerances = DEFAULT) -> bool:
    lam, mu = np.asarray(lam, dtype=float), np.asarray(mu, dtype=float)
    if np.array_equal(lam, mu):
        raise ValueError("orthogonality is tested between distinct frequencies")
    return bool(abs(complex(ft_exact(p, lam - mu))) <= tol.zero)


def pairwise_orthogonal(p: Polytope, points: PointSet, tol: Tolerances = DEFAULT) -> bool:
    """Exhaustive check that every pair of distinct points is orthogonal."""
    pts = points.points
    n = len(pts)
    for i in range(n - 1):
        vals = np.abs(ft_exact(p, pts[i] - pts[i + 1:]))
        if np.any(vals > tol.zero):
            return False
    return True


# --- zeros -----------------------------------------------------------------


@dataclass(eq=False)
class ZeroSetProbe:
    spec: dict
    zeros: np.ndarray
    residuals: np.ndarray
    n_candidates: int
    tolerances: Tolerances = field(default=DEFAULT, repr=False)

    @property
    def r0(self) -> float | None:
        if len(self.zeros) == 0:
            return None
        return float(np.linalg.norm(self.zeros, axis=1).min())

    def as_dict(self) -> dict:
        return {
            "spec": self.spec,
            "n_candidates": self.n_candidates,
            "n_zeros": int(len(self.zeros)),
            "r0": self.r0,
            "zeros": [
                {"frequency": z.tolist(), "modulus": float(np.linalg.norm(z)), "abs_value": float(r)}
                for z, r in zip(self.zeros, self.residuals)
            ],
            "tolerances": self.tolerances.as_dict(),
        }


def _refine(p: Polytope, eta: np.ndarray, basis: np.ndarray, iters: int = 40, tol: float = 1e-15):
    """Batched Gauss-Newton on (Re, Im) of chi_hat restricted to eta0 + span(basis)."""
    eta = np.array(eta, dtype=float)
    active = np.ones(len(eta), dtype=bool)
    for _ in range(iters):
        if not active.any():
            break
        e = eta[active]
        v = np.atleast_1d(ft_exact(p, e))
        g = ft_gradient(p, e) @ basis.T
        J = np.stack([g.real, g.imag], axis=1)
        step = np.einsum("nkr,nr->nk", np.linalg.pinv(J), np.stack([v.real, v.imag], axis=1))
        eta[active] = e - step @ basis
        small = np.linalg.norm(step, axis=1) < tol * np.maximum(1.0, np.linalg.norm(eta[active], axis=1))
        active[np.flatnonzero(active)[small]] = False
    return eta, np.abs(np.atleast_1d(ft_exact(p, eta)))


def _local_minima(values: np.ndarray) -> np.ndarray:
    """Boolean mask of grid points no larger than any axis neighbour."""
    mask = np.ones(values.shape, dtype=bool)
    for ax in range(values.ndim):
        n = values.shape[ax]
        if n < 3:
            continue
        fwd = np.full(values.shape, np.inf)
        bwd = np.full(values.shape, np.inf)
        sl = [slice(None)] * values.ndim
        src = list(sl)
        sl[ax], src[ax] = slice(0, n - 1), slice(1, n)
        fwd[tuple(sl)] = values[tuple(src)]
        sl[ax], src[ax] = slice(1, n), slice(0, n - 1)
        bwd[tuple(sl)] = values[tuple(src)]
        mask &= (values <= fwd) & (values <= bwd)
    return mask


def probe_zeros(
    p: Polytope,
    *,
    ray=None,
    t_max: float = 10.0,
    window=None,
    step: float = 0.05,
    tol: Tolerances = DEFAULT,
) -> ZeroSetProbe:
    """Locate zeros of chi_hat along a ray {t xi : 0 < t <= t_max} or in a box window.

    Scan |chi_hat| on a grid, keep local minima that are small relative to the
    local slope, refine them by Gauss-Newton and keep those below tol.zero
    under both the simplex and the boundary formula.
    """
    d = p.d
    if (ray is None) == (window is None):
        raise ProbeError("give exactly one of ray or window")
    if ray is not None:
        xi = unit_direction(ray, tol)
        n = int(math.floor(t_max / step))
        t = step * np.arange(1, n + 1)
        grid = t[:, None] * xi[None, :]
        basis = xi[None, :]
        shape = (n,)
        spec = {"kind": "ray", "direction": xi.tolist(), "t_max": t_max, "step": step}
    else:
        lo, hi = (np.asarray(w, dtype=float).reshape(d) for w in window)
        spec = {"kind": "window", "lo": lo.tolist(), "hi": hi.tolist(), "step": step}
        if np.any(hi <= lo):
            return ZeroSetProbe(spec, np.zeros((0, d)), np.zeros(0), 0, tol)
        axes = [a + step * np.arange(int(math.floor((b - a) / step + 1e-9)) + 1) for a, b in zip(lo, hi)]
        shape = tuple(len(a) for a in axes)
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
        basis = np.eye(d)
    if len(grid) == 0:
        return ZeroSetProbe(spec, np.zeros((0, d)), np.zeros(0), 0, tol)

    vals = np.abs(ft_exact(p, grid)).reshape(shape)
    slope = np.linalg.norm(ft_gradient(p, grid), axis=1).reshape(shape)
    cand = _local_minima(vals) & (vals <= tol.coarse_zero + step * slope)
    idx = np.flatnonzero(cand.ravel())
    found, res = [], []
    refined, resid = _refine(p, grid[idx], basis) if len(idx) else (np.zeros((0, d)), np.zeros(0))
    for i, eta, r in zip(idx, refined, resid):
        if r > tol.zero or np.linalg.norm(eta - grid[i]) > 2 * step * math.sqrt(d):
            continue
        if np.linalg.norm(eta) == 0 or abs(complex(ft_boundary(p, eta))) > 10 * tol.zero:
            continue
        if any(np.linalg.norm(eta - z) < 1e-6 for z in found):
            continue
        found.append(eta)
        res.append(r)
    zeros = np.array(found).reshape(-1, d)
    order = np.argsort(np.linalg.norm(zeros, axis=1), kind="stable")
    return ZeroSetProbe(spec, zeros[order], np.array(res)[order], int(len(idx)), tol)


# --- greedy packing ----------------------------------------------------------


def _grid_axes(window, step: float, d: int):
    lo, hi = (np.asarray(w, dtype=float).reshape(d) for w in window)
    counts = [max(0, int(math.floor((b - a) / step + 1e-9)) + 1) for a, b in zip(lo, hi)]
    return lo, counts


def zero_table(p: Polytope, counts, step: float, tol: Tolerances = DEFAULT, chunk: int = 200_000) -> np.ndarray:
    """Boolean table over grid offsets: True where chi_hat(step * offset) vanishes."""
    d = p.d
    ranges = [np.arange(-(n - 1), n) for n in counts]
    shape = tuple(len(r) for r in ranges)
    out = np.zeros(int(np.prod(shape)), dtype=bool)
    offs = np.indices(shape).reshape(d, -1).T
    for i in range(0, len(out), chunk):
        block = offs[i:i + chunk] - (np.array(counts) - 1)
        out[i:i + chunk] = np.abs(ft_exact(p, step * block)) <= tol.zero
    return out.reshape(shape)


def greedy_orthogonal_pack(
    p: Polytope,
    window,
    seed: int = 0,
    step: float = 0.1,
    tol: Tolerances = DEFAULT,
    table: np.ndarray | None = None,
) -> PointSet:
    """Greedy mutually orthogonal set on a seeded shuffle of a grid of the window.

    A candidate joins when chi_hat vanishes at its difference with every
    member. Differences of grid points are grid offsets, so the test is a
    lookup in a precomputed zero table; each new member blocks every grid
    point that fails against it.
    """
    d = p.d
    lo, counts = _grid_axes(window, step, d)
    if min(counts, default=0) == 0:
        return PointSet(d, np.zeros((0, d)), "greedy-packing", seed)
    if table is None:
        table = zero_table(p, counts, step, tol)
    blocked = np.zeros(counts, dtype=bool)
    order = np.random.default_rng(seed).permutation(int(np.prod(counts)))
    flat_blocked = blocked.reshape(-1)
    chosen = []
    for flat in order:
        if flat_blocked[flat]:
            continue
        idx = np.unravel_index(flat, counts)
        chosen.append(idx)
        # table[offset + n - 1] for offset = q - idx
        sl = tuple(slice(n - 1 - i, 2 * n - 1 - i) for n, i in zip(counts, idx))
        blocked |= ~table[sl]
    pts = lo + step * np.array(chosen, dtype=float).reshape(-1, d)
    order = np.lexsort(pts.T[::-1]) if len(pts) else np.arange(0)
    return PointSet(d, pts[order], "greedy-packing", seed)


# --- density -----------------------------------------------------------------


def _ball_volume(d: int, R):
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * np.asarray(R, dtype=float) ** d


def default_centers(window, r_max: float, n: int = 3) -> np.ndarray:
    lo, hi = (np.asarray(w, dtype=float) for w in window)
    a, b = lo + r_max, hi - r_max
    if np.any(b < a):
        a = b = 0.5 * (lo + hi)
    axes = [np.linspace(x, y, n) for x, y in zip(a, b)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, lo.size)


def estimate_density(points: PointSet, centers, radii, window=None) -> dict:
    """Counts in balls B_R(x) over centers and increasing radii.

    The estimate is the mean density at the largest radius and the spread is
    max - min over centers there. Balls leaving the window are flagged.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or np.any(np.diff(radii) <= 0) or np.any(radii <= 0):
        raise ValueError("radii must be positive and increasing")
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    d = points.dimension
    pts = points.points
    if window is None and len(pts):
        window = (pts.min(axis=0), pts.max(axis=0))
    rows, clipped = [], False
    from scipy.spatial import cKDTree

    tree = cKDTree(pts) if len(pts) else None
    for R in radii:
        for c in centers:
            count = len(tree.query_ball_point(c, R * (1 + 1e-12))) if tree is not None else 0
            out = window is not None and bool(
                np.any(c - R < np.asarray(window[0]) - 1e-9) or np.any(c + R > np.asarray(window[1]) + 1e-9)
            )
            clipped |= out
            rows.append({"radius": float(R), "center": c.tolist(), "count": count,
                         "density": count / float(_ball_volume(d, R)), "clipped": out})
    last = np.array([r["density"] for r in rows if r["radius"] == radii[-1]])
    return {
        "estimate": float(last.mean()),
        "spread": float(last.max() - last.min()),
        "clipped": clipped,
        "table": rows,
    }


# --- tiling-sum probe --------------------------------------------------------


def facewise_decay_bound(p: Polytope, eta) -> np.ndarray:
    """Upper estimate of |chi_hat(eta)| built face by face.

    Each face term of the boundary formula is bounded by its measure, or by
    the measure of its own boundary over 2 pi |P eta| once the tangential
    part P eta of the frequency is large (one more integration by parts).
    """
    eta = np.atleast_2d(np.asarray(eta, dtype=float))
    r = np.linalg.norm(eta, axis=1)
    total = np.zeros(len(eta))
    for f in p.faces:
        c = np.abs(eta @ f.normal)
        tang = np.linalg.norm(eta - np.outer(eta @ f.normal, f.normal), axis=1)
        rim = _face_rim(p, f)
        with np.errstate(divide="ignore"):
            inner = np.minimum(f.measure, np.where(tang > 0, rim / (2 * math.pi * tang), np.inf))
        total += c * inner
    with np.errstate(divide="ignore", invalid="ignore"):
        out = total / (2 * math.pi * r ** 2)
    return np.where(r > 0, out, p.volume)


def _face_rim(p: Polytope, f) -> float:
    """(d-2)-measure of a face's relative boundary (number of endpoints when d = 2)."""
    d = p.d
    if d == 1:
        return 0.0
    if d == 2:
        return 2.0
    V = p.vertices[list(f.vertices)]
    ring = np.roll(V, -1, axis=0) - V
    if d == 3:
        return float(np.linalg.norm(ring, axis=1).sum())
    return math.inf  # unused at d >= 4: the bound falls back to the face measure


def _tail_integral(p: Polytope, x: np.ndarray, lo: np.ndarray, hi: np.ndarray, n_in: int = 16, n_out: int = 48,
                   reach: float = 1e3) -> float:
    """Integral of the face-wise bound squared over eta outside (lo - x, hi - x), truncated at reach * side."""
    side = float((hi - lo).max())
    axes, widths = [], []
    for a, b in zip(lo - x, hi - x):
        inner = np.linspace(a, b, n_in + 1)
        out_r = b + np.geomspace(side / n_in, reach * side, n_out)
        out_l = a - np.geomspace(side / n_in, reach * side, n_out)[::-1]
        nodes = np.concatenate([out_l, inner, out_r])
        axes.append(0.5 * (nodes[1:] + nodes[:-1]))
        widths.append(np.diff(nodes))
    mids = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
    vol = np.prod(np.stack(np.meshgrid(*widths, indexing="ij"), axis=-1).reshape(-1, len(lo)), axis=1)
    outside = np.any((mids < (lo - x)) | (mids > (hi - x)), axis=1)
    b = facewise_decay_bound(p, mids[outside])
    return float((b ** 2 * vol[outside]).sum())


def spectral_pair_probe(
    p: Polytope,
    points: PointSet,
    grid,
    window=None,
    tail_tolerance: float | None = None,
) -> dict:
    """Max over ``grid`` of |sum_lam |chi_hat(x - lam)|^2 / V^2 - 1|.

    For a spectrum the sum is identically V^2. The points missing outside the
    window are accounted for by an estimate: the density of the sample times
    the integral of the squared face-wise decay bound over the complement.
    """
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    V2 = p.volume ** 2
    pts = points.points
    sums = np.zeros(len(grid))
    for i, x in enumerate(grid):
        if len(pts):
            sums[i] = float((np.abs(ft_exact(p, x - pts)) ** 2).sum())
    dev = np.abs(sums / V2 - 1.0)
    result = {
        "n_points": int(len(pts)),
        "n_grid": int(len(grid)),
        "max_deviation": float(dev.max()) if len(dev) else 0.0,
        "mean_sum_over_V2": float((sums / V2).mean()) if len(sums) else 0.0,
        "tail_estimate": None,
        "tail_kind": "estimate: sample density x integral of squared face-wise bound outside the window",
        "crude_decay_bound": "|chi_hat(eta)| <= sigma(boundary) / (2 pi |eta|)",
    }
    if len(pts) and window is None:
        window = (pts.min(axis=0) - 0.5, pts.max(axis=0) + 0.5)
    if len(pts):
        lo, hi = (np.asarray(w, dtype=float) for w in window)
        rho = len(pts) / float(np.prod(hi - lo))
        tails = [rho * _tail_integral(p, x, lo, hi) / V2 for x in grid]
        result["tail_estimate"] = float(max(tails))
        result["sample_density"] = rho
        if tail_tolerance is not None and result["tail_estimate"] > tail_tolerance:
            raise TailTooLarge(
                f"tail estimate {result['tail_estimate']:.3g} exceeds {tail_tolerance:.3g}; enlarge the window"
            )
    return result


def interior_grid(window, margin: float, n: int = 11) -> np.ndarray:
    lo, hi = (np.asarray(w, dtype=float) for w in window)
    axes = [np.linspace(a + margin, b - margin, n) for a, b in zip(lo, hi)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, lo.size)


def best_of_seeds(p: Polytope, window, seeds, step: float = 0.1, tol: Tolerances = DEFAULT,
                  centers=None, radii=None) -> list[dict]:
    """Greedy packs across seeds sharing one zero table, each with its density estimate."""
    d = p.d
    lo, counts = _grid_axes(window, step, d)
    table = zero_table(p, counts, step, tol)
    side = float(min(np.asarray(window[1]) - np.asarray(window[0])))
    if radii is None:
        radii = side * np.array([0.1, 0.2, 0.4])
    if centers is None:
        centers = default_centers(window, float(np.max(radii)))
    out = []
    for s in seeds:
        pack = greedy_orthogonal_pack(p, window, s, step, tol, table)
        dens = estimate_density(pack, centers, radii, window)
        out.append({"seed": int(s), "pack": pack, "density": dens,
                    "normalized_density": dens["estimate"] * p.volume})
    return out


__all__ = [
    "PointSet", "ZeroSetProbe", "ProbeError", "TailTooLarge", "lattice_points", "orthogonality_test",
    "pairwise_orthogonal", "probe_zeros", "zero_table", "greedy_orthogonal_pack", "estimate_density",
    "default_centers", "facewise_decay_bound", "spectral_pair_probe", "interior_grid", "best_of_seeds",
]
