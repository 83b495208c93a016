"""The face wave f(t) = sum_i sigma*_i exp(-2 pi i lambda_i t) and its translation numbers.

A shift tau is accepted as a translation number belonging to eps when the
coefficient bound

    sum_i |c_i| |exp(-2 pi i lambda_i tau) - 1|  <=  eps

holds. The bound dominates sup_t |f(t + tau) - f(t)|, so every accepted tau
is a genuine translation number; the scan only has to find them densely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import DirectionReport

TWO_PI = 2.0 * math.pi


class NormalizationError(ValueError):
    pass


class NoTranslationNumbers(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FaceWave:
    coefficients: np.ndarray
    frequencies: np.ndarray
    normalization: float = 1.0

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        phase = np.exp(-1j * TWO_PI * np.multiply.outer(t, self.frequencies))
        return phase @ self.coefficients.astype(complex)

    def derivative(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        phase = np.exp(-1j * TWO_PI * np.multiply.outer(t, self.frequencies))
        return phase @ (-1j * TWO_PI * self.frequencies * self.coefficients)

    @property
    def amplitude(self) -> float:
        return float(np.abs(self.coefficients).sum())

    def derivative_bound(self) -> float:
        """2 pi sum |c_i| |lambda_i|, a bound on |f'| over all of R."""
        return float(TWO_PI * (np.abs(self.coefficients) * np.abs(self.frequencies)).sum())

    def translation_bound(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        jumps = np.abs(np.exp(-1j * TWO_PI * np.multiply.outer(tau, self.frequencies)) - 1.0)
        return jumps @ np.abs(self.coefficients)

    def with_frequencies_scaled(self, c: float) -> "FaceWave":
        return FaceWave(self.coefficients, self.frequencies * c, self.normalization)

    def as_dict(self) -> dict:
        return {
            "terms": [
                {"coefficient": float(c), "frequency": float(f)}
                for c, f in zip(self.coefficients, self.frequencies)
            ],
            "normalization": self.normalization,
            "derivative_bound": self.derivative_bound(),
        }


def face_wave(report: DirectionReport, normalize: bool = False) -> FaceWave:
    coef = np.array([f.sign * f.measure for f in report.faces], dtype=float)
    freq = np.array([f.offset for f in report.faces], dtype=float)
    if not normalize:
        return FaceWave(coef, freq, 1.0)
    total = coef.sum()
    if coef.size == 0 or abs(total) <= 1e-12 * max(1.0, np.abs(coef).sum()):
        raise NormalizationError("wave vanishes at t = 0; the faces normal to the direction balance")
    return FaceWave(coef / total, freq, float(total))


def default_tau_step(w: FaceWave) -> float:
    top = float(np.abs(w.frequencies).max()) if w.frequencies.size else 0.0
    return 1e-3 if top == 0 else min(1e-3, 1.0 / (100.0 * top))


@dataclass(eq=False)
class TranslationCertificate:
    epsilon: float
    ell: float
    tau_step: float
    t_range: float
    stable: bool
    gap_history: list
    accepted: np.ndarray = field(repr=False)
    wave: FaceWave = field(repr=False)

    @property
    def n_intervals(self) -> int:
        return int(math.floor(self.t_range / self.ell))

    def tau_for_interval(self, k: int) -> float:
        """A translation number in [k ell, (k+1) ell]; negative k use -tau (also a translation number)."""
        if k < 0:
            return -self.tau_for_interval(-k - 1)
        if k == 0:
            return 0.0
        lo = k * self.ell
        i = int(np.searchsorted(self.accepted, lo - 1e-12))
        if i >= len(self.accepted) or self.accepted[i] > lo + self.ell + 1e-12:
            raise NoTranslationNumbers(f"interval {k} lies outside the scanned range [0, {self.t_range}]")
        return float(self.accepted[i])

    def representatives(self, k_max: int | None = None, sample_t: int = 256) -> list[dict]:
        k_max = self.n_intervals if k_max is None else min(k_max, self.n_intervals)
        if k_max <= 0:
            return []
        taus = np.array([self.tau_for_interval(k) for k in range(k_max)])
        bounds = self.wave.translation_bound(taus)
        sups = sampled_translation_sup(self.wave, taus, n_t=sample_t)
        return [
            {
                "interval": [k * self.ell, (k + 1) * self.ell],
                "tau": float(tau),
                "bound": float(b),
                "sampled_sup": float(s),
            }
            for k, (tau, b, s) in enumerate(zip(taus, bounds, sups))
        ]

    def as_dict(self, max_listed: int = 200) -> dict:
        return {
            "epsilon": self.epsilon,
            "ell": self.ell,
            "tau_step": self.tau_step,
            "scanned_range": [0.0, self.t_range],
            "stable": self.stable,
            "gap_history": self.gap_history,
            "n_intervals": self.n_intervals,
            "n_accepted": int(len(self.accepted)),
            "representatives": self.representatives(max_listed),
        }


def sampled_translation_sup(w: FaceWave, taus, n_t: int = 256, span: float | None = None) -> np.ndarray:
    """sup over a t-grid of |f(t + tau) - f(t)|, one value per tau (a diagnostic, not a bound)."""
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    nz = np.abs(w.frequencies[np.abs(w.frequencies) > 0])
    if span is None:
        span = 4.0 / nz.min() if nz.size else 1.0
    t = np.linspace(0.0, span, n_t)
    base = w(t)
    out = np.empty(len(taus))
    for i in range(0, len(taus), 512):
        chunk = taus[i:i + 512]
        shifted = w(t[None, :] + chunk[:, None])
        out[i:i + 512] = np.abs(shifted - base[None, :]).max(axis=1)
    return out


def _scan(w: FaceWave, eps: float, T: float, step: float) -> tuple[np.ndarray, float]:
    n = int(math.ceil(T / step))
    taus = step * np.arange(n + 1)
    ok = np.empty(n + 1, dtype=bool)
    for i in range(0, n + 1, 200_000):
        ok[i:i + 200_000] = w.translation_bound(taus[i:i + 200_000]) <= eps
    ok[0] = True
    accepted = taus[ok]
    gaps = np.diff(np.append(accepted, taus[-1]))
    return accepted, float(gaps.max()) if gaps.size else step


def find_translation_numbers(
    w: FaceWave,
    eps: float,
    T: float = 50.0,
    tau_step: float | None = None,
    max_doublings: int = 6,
) -> TranslationCertificate:
    """Scan [0, T] for translation numbers and measure the largest gap ell between them.

    The gap is recomputed on [0, 2T]; growth beyond 5% doubles T, up to
    ``max_doublings`` times, after which the certificate is marked unstable.
    """
    eps = float(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if eps >= 2 * w.amplitude:
        raise ValueError(f"epsilon must be below 2 * sum|c_i| = {2 * w.amplitude}")
    step = default_tau_step(w) if tau_step is None else float(tau_step)
    accepted, gap = _scan(w, eps, T, step)
    history = [[T, gap]]
    stable = False
    for _ in range(max_doublings + 1):
        accepted2, gap2 = _scan(w, eps, 2 * T, step)
        history.append([2 * T, gap2])
        if gap2 <= 1.05 * gap:
            stable = True
            accepted, gap, T = accepted2, max(gap, gap2), 2 * T
            break
        accepted, gap, T = accepted2, gap2, 2 * T
    if len(accepted) < 2 and gap >= T:
        raise NoTranslationNumbers(
            f"no nonzero translation number found in [0, {T}]; "
            "decrease tau_step or increase epsilon"
        )
    return TranslationCertificate(
        epsilon=eps, ell=gap, tau_step=step, t_range=T, stable=stable,
        gap_history=history, accepted=accepted, wave=w,
    )
