"""Figures for the CLI reports, rendered off-screen to files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 100,
    "savefig.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
    "svg.hashsalt": "polyspec",
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, bbox_inches="tight", metadata={"Software": None} if path.suffix == ".png" else None)
    plt.close(fig)
    return path


def _outline(ax, p, **kw):
    if p.d != 2:
        return
    for f in p.faces:
        a, b = p.vertices[list(f.vertices)]
        ax.plot([a[0], b[0]], [a[1], b[1]], **kw)


def plot_slice(profile, path) -> Path:
    with plt.rc_context(RC):
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6.0, 5.0))
        ax1.plot(profile.t, np.abs(profile.values), lw=0.8, label="|chi_hat(t xi)|")
        ax1.plot(profile.t, np.abs(profile.leading), lw=0.8, ls="--", label="|leading term|")
        ax1.set_yscale("log")
        ax1.legend(frameon=False)
        ax2.plot(profile.t, profile.t ** 2 * np.abs(profile.residual), lw=0.8, color="C3")
        ax2.set_ylabel("t^2 |residual|")
        ax2.set_xlabel("t")
        return _save(fig, path)


def plot_wave(cert, path, t_max: float | None = None) -> Path:
    w = cert.wave
    t_max = t_max or min(cert.t_range, 20 * cert.ell)
    t = np.linspace(0, t_max, 4000)
    acc = cert.accepted[cert.accepted <= t_max]
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        ax.plot(t, np.abs(w(t)), lw=0.8, label="|f(t)|")
        ax.plot(acc, np.zeros_like(acc), "|", ms=6, color="C2", alpha=0.5, label="translation numbers")
        ax.set_xlabel("t")
        ax.set_title(f"eps = {cert.epsilon:.4g}, ell = {cert.ell:.4g}")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_points(points, path, polytope=None, title: str = "") -> Path:
    pts = points.points
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5.0, 5.0))
        if pts.shape[1] >= 2:
            ax.plot(pts[:, 0], pts[:, 1], ".", ms=2)
        elif len(pts):
            ax.plot(pts[:, 0], np.zeros(len(pts)), "|")
        if polytope is not None:
            _outline(ax, polytope, color="k", lw=1)
        ax.set_aspect("equal")
        ax.set_title(title)
        return _save(fig, path)


def plot_zeros(probe, path, polytope=None) -> Path:
    z = probe.zeros
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5.0, 5.0))
        if len(z) and z.shape[1] >= 2:
            ax.plot(z[:, 0], z[:, 1], "x", ms=4)
            ax.set_aspect("equal")
        elif len(z):
            ax.plot(z[:, 0], np.zeros(len(z)), "x")
        if probe.r0:
            circle = plt.Circle((0, 0), probe.r0, fill=False, ls="--", color="C3")
            ax.add_patch(circle)
        ax.set_title(f"zeros: {len(z)}, r0 = {probe.r0}")
        return _save(fig, path)


def plot_density(table, path) -> Path:
    radii = sorted({r["radius"] for r in table})
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        for R in radii:
            vals = [r["density"] for r in table if r["radius"] == R]
            ax.plot([R] * len(vals), vals, "o", ms=3, color="C0")
        ax.set_xlabel("R")
        ax.set_ylabel("count / |B_R|")
        return _save(fig, path)


def plot_histogram(hist: dict, path, level: float) -> Path:
    keys = sorted(hist, key=int)
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        ax.bar([int(k) for k in keys], [hist[k] for k in keys], width=0.6)
        ax.axvline(level, color="C3", ls="--")
        ax.set_xlabel("multiplicity")
        ax.set_ylabel("samples")
        return _save(fig, path)


def plot_tubes(report, points, path) -> Path:
    """Candidate points in the (transverse, along-xi) frame with the tube grid."""
    trans, along = report.tube.coords(points.points) if len(points) else (np.zeros((0, 1)), np.zeros(0))
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        if trans.shape[1]:
            ax.plot(trans[:, 0], along, ".", ms=2)
        ax.set_xlabel("transverse coordinate")
        ax.set_ylabel("coordinate along xi")
        ax.set_title(f"tube width {report.side:.3g}, Q = {report.Q}")
        return _save(fig, path)
