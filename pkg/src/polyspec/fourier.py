"""Fourier transform of polytope indicators.

``ft_exact`` sums closed-form simplex transforms,

    int_S exp(-2 pi i <x, eta>) dx = d! |S| exp[z_0, ..., z_d],
    z_j = -2 pi i <v_j, eta>,

``ft_boundary`` evaluates the divergence-theorem boundary integral face by
face, and ``ft_gradient`` differentiates the simplex formula with respect
to its nodes (a repeated node). All three accept a single frequency of
shape (d,) or a batch of shape (n, d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._divdiff import exp_divided_difference
from .geometry import DirectionReport, Polytope, direction_report
from .tolerances import DEFAULT, Tolerances

TWO_PI = 2.0 * math.pi


def _batch(p: Polytope, eta) -> tuple[np.ndarray, bool]:
    eta = np.asarray(eta, dtype=float)
    single = eta.ndim == 1
    eta = np.atleast_2d(eta)
    if eta.shape[1] != p.d:
        raise ValueError(f"frequency dimension {eta.shape[1]} != polytope dimension {p.d}")
    return eta, single


def ft_exact(p: Polytope, eta):
    """Return the transform of the indicator of ``p`` at ``eta``."""
    eta, single = _batch(p, eta)
    pts, vol = p.simplex_array()
    fact = math.factorial(p.d)
    out = np.zeros(len(eta), dtype=complex)
    for P, v in zip(pts, vol):
        z = -1j * TWO_PI * (eta @ P.T)
        out += fact * v * exp_divided_difference(z)
    return out[0] if single else out


def ft_gradient(p: Polytope, eta):
    """Gradient of the transform, i.e. the transform of ``-2 pi i x`` on ``p``."""
    eta, single = _batch(p, eta)
    pts, vol = p.simplex_array()
    fact = math.factorial(p.d)
    out = np.zeros((len(eta), p.d), dtype=complex)
    for P, v in zip(pts, vol):
        z = -1j * TWO_PI * (eta @ P.T)
        for j in range(p.d + 1):
            dd = exp_divided_difference(np.hstack([z, z[:, j:j + 1]]))
            out += (fact * v * dd)[:, None] * P[j][None, :]
    out *= -1j * TWO_PI
    return out[0] if single else out


def _face_pieces(p: Polytope):
    pts, meas, normals = [], [], []
    for f in p.faces:
        for piece, m in zip(f.pieces, f.piece_measures):
            pts.append(p.vertices[list(piece)])
            meas.append(m)
            normals.append(f.normal)
    return np.stack(pts), np.array(meas), np.stack(normals)


def face_transforms(p: Polytope, eta) -> np.ndarray:
    """Surface integrals of exp(-2 pi i <x, eta>) over every face, shape (n, F)."""
    eta, _ = _batch(p, eta)
    fact = math.factorial(p.d - 1)
    out = np.zeros((len(eta), len(p.faces)), dtype=complex)
    for k, f in enumerate(p.faces):
        for piece, m in zip(f.pieces, f.piece_measures):
            z = -1j * TWO_PI * (eta @ p.vertices[list(piece)].T)
            out[:, k] += fact * m * exp_divided_difference(z)
    return out


def ft_boundary(p: Polytope, eta):
    """Transform via the boundary integral; ``eta`` must be nonzero.

    chi_hat(eta) = -1/(2 pi i |eta|) * sum_F <eta/|eta|, nu_F> int_F e^{-2 pi i <x, eta>} dsigma
    """
    eta, single = _batch(p, eta)
    r = np.linalg.norm(eta, axis=1)
    if np.any(r == 0):
        raise ValueError("boundary formula is undefined at eta = 0")
    normals = np.stack([f.normal for f in p.faces])
    cosines = (eta @ normals.T) / r[:, None]
    faces = face_transforms(p, eta)
    out = -(cosines * faces).sum(axis=1) / (1j * TWO_PI * r)
    return out[0] if single else out


METHODS = ("exact-simplex", "boundary-formula")


@dataclass(frozen=True)
class FtValue:
    frequency: tuple[float, ...]
    value: complex
    method: str

    def as_dict(self) -> dict:
        return {
            "frequency": list(self.frequency),
            "re": self.value.real,
            "im": self.value.imag,
            "abs": abs(self.value),
            "method": self.method,
        }


def evaluate(p: Polytope, eta, method: str = "exact-simplex") -> FtValue:
    eta = np.asarray(eta, dtype=float)
    if method == "exact-simplex":
        v = ft_exact(p, eta)
    elif method == "boundary-formula":
        v = ft_boundary(p, eta)
    else:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    return FtValue(tuple(float(x) for x in eta), complex(v), method)


def boundary_decay_bound(p: Polytope, eta) -> np.ndarray:
    """sigma(boundary) / (2 pi |eta|), an upper bound for |chi_hat(eta)|."""
    r = np.linalg.norm(np.atleast_2d(eta), axis=-1)
    return p.surface_measure / (TWO_PI * r)


# --- empirical constants ---------------------------------------------------


@dataclass(frozen=True)
class SampledConstant:
    """A sup over samples times a safety factor; never a proven bound."""

    value: float
    sup: float
    safety_factor: float
    n_samples: int
    t_range: tuple[float, float]
    rigorous: bool = False

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "sampled_sup": self.sup,
            "safety_factor": self.safety_factor,
            "n_samples": self.n_samples,
            "range": list(self.t_range),
            "rigorous": self.rigorous,
        }


def estimate_grad_constant(
    p: Polytope,
    t_max: float = 50.0,
    n_samples: int = 10_000,
    seed: int = 0,
    safety_factor: float = 2.0,
) -> SampledConstant:
    """Sampled constant K with |grad chi_hat(eta)| <= K / |eta| for |eta| >= 1.

    Random directions are augmented with the face normals, along which the
    gradient decays slowest.
    """
    rng = np.random.default_rng(seed)
    d = p.d
    dirs = rng.normal(size=(n_samples, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = rng.uniform(1.0, t_max, size=n_samples)
    etas = [dirs * radii[:, None]]
    normals = np.unique(np.round(np.stack([f.normal for f in p.faces]), 12), axis=0)
    along = np.linspace(1.0, t_max, max(200, int(20 * t_max)))
    for n in np.vstack([normals, -normals]):
        etas.append(along[:, None] * n[None, :])
    eta = np.vstack(etas)
    grad = ft_gradient(p, eta)
    sup = float((np.linalg.norm(eta, axis=1) * np.linalg.norm(grad, axis=1)).max())
    return SampledConstant(safety_factor * sup, sup, safety_factor, len(eta), (1.0, t_max))


@dataclass(frozen=True, eq=False)
class SliceProfile:
    direction: np.ndarray
    t: np.ndarray
    values: np.ndarray
    leading: np.ndarray
    residual: np.ndarray
    constant: float  # sup t^2 |residual|

    def rows(self):
        for t, v, lead, res in zip(self.t, self.values, self.leading, self.residual):
            yield (float(t), v.real, v.imag, abs(v), lead.real, lead.imag, abs(res))


def wave_values(report: DirectionReport, t) -> np.ndarray:
    """sum_i sigma*_i exp(-2 pi i lambda_i t) from the faces normal to the direction."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape, dtype=complex)
    for f in report.faces:
        out += f.sign * f.measure * np.exp(-1j * TWO_PI * f.offset * t)
    return out


def slice_profile(
    p: Polytope,
    xi,
    t_min: float = 1.0,
    t_max: float = 100.0,
    step: float = 0.01,
    tol: Tolerances = DEFAULT,
) -> SliceProfile:
    """Sample chi_hat(t xi) against its leading term -f(t) / (2 pi i t)."""
    if t_min < 1.0:
        raise ValueError("slice range must lie in [1, inf)")
    rep = direction_report(p, xi, tol)
    n = int(round((t_max - t_min) / step)) + 1
    t = t_min + step * np.arange(n)
    values = ft_exact(p, t[:, None] * rep.direction[None, :])
    leading = -wave_values(rep, t) / (1j * TWO_PI * t)
    residual = values - leading
    constant = float((t ** 2 * np.abs(residual)).max())
    return SliceProfile(rep.direction, t, values, leading, residual, constant)


def estimate_slice_constant(
    p: Polytope, xi, t_max: float = 100.0, step: float = 0.01, safety_factor: float = 2.0,
    tol: Tolerances = DEFAULT,
) -> SampledConstant:
    prof = slice_profile(p, xi, 1.0, t_max, step, tol)
    return SampledConstant(safety_factor * prof.constant, prof.constant, safety_factor,
                           len(prof.t), (1.0, t_max))
