"""Quantitative non-spectrality certificate for a polytope with unbalanced faces.

Pipeline: constants (K, eps, ell, N, D) -> tube region M -> separation chain
-> capacities (P, Q) -> tube counts of a candidate spectrum. The sampled
constants make this a desk-scale numerical certificate, not a proof.

The transform's leading term along xi is -f(t) / (2 pi i t), so the
constant entering the chain in its unit-free form is

    K = max(1, 2 pi K_grad / |s|, 2 pi K_slice / |s|, K_f)

with s the face imbalance (f is normalized to f(0) = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .facewave import FaceWave, TranslationCertificate, face_wave, find_translation_numbers
from .fourier import (
    SampledConstant,
    estimate_grad_constant,
    estimate_slice_constant,
    ft_exact,
)
from .geometry import Polytope, direction_report
from .tolerances import DEFAULT, Tolerances

CERTIFIED = "certified-at-desk-scale"
INCONCLUSIVE = "inconclusive"
TWO_PI = 2.0 * math.pi


class CriterionInapplicable(ValueError):
    """The faces normal to the direction balance; the criterion says nothing."""


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class Check:
    name: str
    lhs: float
    relation: str
    rhs: float
    margin: float
    holds: bool
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "name": self.name, "lhs": self.lhs, "relation": self.relation, "rhs": self.rhs,
            "margin": self.margin, "holds": self.holds, "note": self.note,
        }


def check(name: str, lhs, relation: str, rhs, note: str = "") -> Check:
    """Log ``lhs <relation> rhs``; margin is the slack on the correct side."""
    if relation in ("<", "<="):
        margin = rhs - lhs
    elif relation in (">", ">="):
        margin = lhs - rhs
    else:
        raise ValueError(relation)
    holds = margin > 0 if relation in ("<", ">") else margin >= 0
    return Check(name, float(lhs), relation, float(rhs), float(margin), bool(holds), note)


def direction_frame(xi: np.ndarray) -> np.ndarray:
    """Orthonormal rows with ``xi`` last; coordinate axes stay exact."""
    d = xi.size
    k = int(np.argmax(np.abs(xi)))
    if np.count_nonzero(xi) == 1:
        rows = [np.eye(d)[i] for i in range(d) if i != k]
        return np.vstack(rows + [xi]) if rows else xi[None, :].copy()
    q, _ = np.linalg.qr(np.column_stack([xi, np.eye(d)]))
    basis = q[:, 1:d].T
    return np.vstack([basis, xi])


@dataclass(eq=False)
class TubeRegion:
    """M: cubes of side ell/N strung along xi over the interval set L."""

    direction: np.ndarray
    frame: np.ndarray
    ell: float
    N: int
    k_min: int
    starts: np.ndarray  # start of L's subinterval in l-interval k_min + i
    taus: np.ndarray

    @property
    def side(self) -> float:
        return self.ell / self.N

    @property
    def k_max(self) -> int:
        return self.k_min + len(self.starts) - 1

    def interval(self, k: int) -> tuple[float, float]:
        s = float(self.starts[k - self.k_min])
        return s, s + self.side

    def coords(self, x) -> tuple[np.ndarray, np.ndarray]:
        y = np.atleast_2d(x) @ self.frame.T
        return y[:, :-1], y[:, -1]

    def _interval_index(self, along: np.ndarray) -> np.ndarray:
        """Index k of the L-interval containing each coordinate, or -inf-ish sentinel."""
        tol = 1e-12 * max(1.0, self.ell)
        out = np.full(along.shape, np.iinfo(np.int64).min, dtype=np.int64)
        base = np.floor(along / self.ell).astype(np.int64)
        for k in (base, base - 1):
            ok = (k >= self.k_min) & (k <= self.k_max)
            idx = np.clip(k - self.k_min, 0, len(self.starts) - 1)
            lo = self.starts[idx]
            inside = ok & (along >= lo - tol) & (along <= lo + self.side + tol)
            out = np.where(inside & (out == np.iinfo(np.int64).min), k, out)
        return out

    def contains(self, points, shift=None) -> np.ndarray:
        pts = np.atleast_2d(points)
        if shift is not None:
            pts = pts - np.asarray(shift, dtype=float)
        trans, along = self.coords(pts)
        tol = 1e-12 * max(1.0, self.side)
        in_cross = np.all((trans >= -tol) & (trans <= self.side + tol), axis=1)
        return in_cross & (self._interval_index(along) != np.iinfo(np.int64).min)

    def tau_for(self, t: float) -> float:
        k = int(self._interval_index(np.array([t]))[0])
        if k == np.iinfo(np.int64).min:
            raise PreconditionError(f"{t} is not in L")
        return float(self.taus[k - self.k_min])

    def find_shift(self, lam1, lam2):
        """A translation s with both points in M + s, or None."""
        y1t, a1 = self.coords(lam1)
        y2t, a2 = self.coords(lam2)
        y1t, y2t, a1, a2 = y1t[0], y2t[0], float(a1[0]), float(a2[0])
        h = self.side
        if np.any(np.abs(y1t - y2t) > h):
            return None
        s_trans = np.minimum(y1t, y2t)
        delta = a1 - a2
        lo_j = self.starts
        kk = np.floor((lo_j - delta) / self.ell).astype(np.int64)
        for off in (-1, 0, 1):
            k = kk + off
            ok = (k >= self.k_min) & (k <= self.k_max)
            lo_k = self.starts[np.clip(k - self.k_min, 0, len(self.starts) - 1)]
            # c must satisfy a1 - c in [lo_j, lo_j + h] and a2 - c in [lo_k, lo_k + h]
            c_lo = np.maximum(a1 - lo_j - h, a2 - lo_k - h)
            c_hi = np.minimum(a1 - lo_j, a2 - lo_k)
            good = np.flatnonzero(ok & (c_lo <= c_hi))
            if good.size:
                i = good[np.argmin(np.abs(0.5 * (c_lo[good] + c_hi[good])))]
                c = 0.5 * (c_lo[i] + c_hi[i])
                y = np.append(s_trans, c)
                return y @ self.frame
        return None

    def as_dict(self, max_listed: int = 200) -> dict:
        ks = range(self.k_min, self.k_max + 1)
        listed = [k for k in ks if 0 <= k < max_listed]
        return {
            "direction": self.direction.tolist(),
            "frame": self.frame.tolist(),
            "ell": self.ell,
            "N": self.N,
            "cube_side": self.side,
            "k_range": [self.k_min, self.k_max],
            "intervals": [
                {"k": k, "interval": list(self.interval(k)), "tau": float(self.taus[k - self.k_min])}
                for k in listed
            ],
        }


def build_tube(xi: np.ndarray, trans: TranslationCertificate, N: int, reach: float) -> TubeRegion:
    """L-intervals for every l-interval meeting [-reach, reach]."""
    ell = trans.ell
    h = ell / N
    k_hi = min(int(math.ceil(reach / ell)), trans.n_intervals - 1)
    ks = np.arange(-k_hi - 1, k_hi + 1)
    pos = ks[ks >= 1]
    acc = trans.accepted
    idx = np.searchsorted(acc, pos * ell - 1e-12)
    if np.any(idx >= len(acc)) or np.any(acc[np.minimum(idx, len(acc) - 1)] > (pos + 1) * ell + 1e-12):
        raise PreconditionError("translation scan does not cover the tube's reach")
    tau_pos = dict(zip(pos.tolist(), acc[idx].tolist()))
    tau_pos[0] = 0.0
    taus = np.array([tau_pos[k] if k >= 0 else -tau_pos[-k - 1] for k in ks.tolist()])
    j = np.floor((taus - ks * ell) / h).astype(np.int64)
    j = np.clip(j, 0, N - 1)
    starts = ks * ell + j * h
    return TubeRegion(xi, direction_frame(xi), ell, N, int(ks[0]), starts, taus)


@dataclass(eq=False)
class CertificateReport:
    polytope: Polytope = field(repr=False)
    direction: np.ndarray
    epsilon: Fraction | float
    imbalance: float
    wave: FaceWave = field(repr=False)
    constants: dict
    k_cert: float
    ell: float
    N: int
    D: float
    margin: float
    tube: TubeRegion = field(repr=False)
    translation: TranslationCertificate = field(repr=False)
    log: list = field(default_factory=list)
    r0: float | None = None
    P: int | None = None
    Q: int | None = None
    packing: dict | None = None
    density: dict | None = None
    notes: list = field(default_factory=list)
    tolerances: Tolerances = DEFAULT

    @property
    def d(self) -> int:
        return self.polytope.d

    @property
    def side(self) -> float:
        return self.ell / self.N

    @property
    def verdict(self) -> str:
        ok = all(c.holds for c in self.log) and self.translation.stable
        if self.density is not None:
            ok = ok and self.density["verdict"] == CERTIFIED
        return CERTIFIED if ok else INCONCLUSIVE

    def as_dict(self) -> dict:
        eps = self.epsilon
        return {
            "polytope": self.polytope.name,
            "dimension": self.d,
            "direction": self.direction.tolist(),
            "epsilon": str(eps) if isinstance(eps, Fraction) else eps,
            "imbalance": self.imbalance,
            "wave": self.wave.as_dict(),
            "constants": self.constants,
            "K_cert": self.k_cert,
            "ell": self.ell,
            "N": self.N,
            "D": self.D,
            "margin": self.margin,
            "zero_gap_r0": self.r0,
            "P": self.P,
            "Q": self.Q,
            "packing": self.packing,
            "tube": self.tube.as_dict(),
            "translation_numbers": self.translation.as_dict(max_listed=50),
            "density": self.density,
            "inequalities": [c.as_dict() for c in self.log],
            "verdict": self.verdict,
            "notes": self.notes,
            "tolerances": self.tolerances.as_dict(),
        }


def derive_constants(
    p: Polytope,
    xi,
    epsilon=Fraction(1, 6),
    *,
    grad_constant: SampledConstant | None = None,
    slice_constant: SampledConstant | None = None,
    translation: TranslationCertificate | None = None,
    margin: float = 0.05,
    working_range: float = 50.0,
    seed: int = 0,
    tol: Tolerances = DEFAULT,
) -> CertificateReport:
    """Fix eps, K, ell, N and D and build the tube region M."""
    eps = float(epsilon)
    if not eps > 0:
        raise ValueError("epsilon must be positive")
    rep = direction_report(p, xi, tol)
    s = rep.imbalance
    if abs(s) <= tol.imbalance:
        raise CriterionInapplicable(
            f"faces normal to {rep.direction.tolist()} balance (imbalance {s:.3g})"
        )
    d = p.d
    wave = face_wave(rep, normalize=True)
    k_grad = grad_constant or estimate_grad_constant(p, seed=seed)
    k_slice = slice_constant or estimate_slice_constant(p, rep.direction, tol=tol)
    k_f = wave.derivative_bound()
    parts = {
        "K_grad_scaled": TWO_PI * k_grad.value / abs(s),
        "K_slice_scaled": TWO_PI * k_slice.value / abs(s),
        "K_f": k_f,
    }
    k_cert = max(1.0, *parts.values())
    constants = {
        "K_grad": {**k_grad.as_dict(), "provenance": "sampled sup |eta| |grad chi_hat(eta)|"},
        "K_slice": {**k_slice.as_dict(), "provenance": "sampled sup t^2 |slice residual|"},
        "K_f": {"value": k_f, "rigorous": True, "provenance": "2 pi sum |c_i| |lambda_i|"},
        "K_cert_parts": parts,
        "K_cert_rule": "max(1, 2 pi K_grad/|s|, 2 pi K_slice/|s|, K_f)",
    }

    D = 2.0 * k_cert / eps * (1.0 + margin)
    reach = working_range + D + 1.0
    if translation is None:
        translation = find_translation_numbers(wave, eps, T=reach + 1.0)
    ell = translation.ell

    root = math.sqrt(d - 1)
    n_bound = 6.0 * k_cert * ell * root / eps
    n_step = k_cert * ell / eps
    N = int(math.floor(max(n_bound, n_step) * (1.0 + margin))) + 1
    h = ell / N

    tube = build_tube(rep.direction, translation, N, reach)
    report = CertificateReport(
        polytope=p, direction=rep.direction, epsilon=epsilon, imbalance=s, wave=wave,
        constants=constants, k_cert=k_cert, ell=ell, N=N, D=D, margin=margin, tube=tube,
        translation=translation, tolerances=tol,
    )
    log = report.log
    log.append(check("imbalance_nonzero", abs(s), ">", tol.imbalance))
    log.append(check("K_at_least_one", k_cert, ">=", 1.0))
    log.append(check("N_bound", n_bound, "<", N, "N > 6 K ell sqrt(d-1) / eps"))
    log.append(check("K_ell_over_N", k_cert * h, "<", eps, "needed for the two Lipschitz steps"))
    log.append(check("transverse_radius", h * root, "<", eps / (6 * k_cert)))
    log.append(check("D_bound", 2 * k_cert / eps, "<", D, "D > 2 K / eps"))
    log.append(check("translation_gap_stable", translation.gap_history[-1][1], "<=",
                     1.05 * translation.gap_history[-2][1], "ell recomputed on a doubled range"))
    rep_taus = np.array([tube.taus[k - tube.k_min] for k in range(max(tube.k_min, 0), tube.k_max + 1)])
    log.append(check("translation_bounds", float(wave.translation_bound(rep_taus).max()), "<=", eps))
    if d == 1:
        report.notes.append("d = 1: sqrt(d-1) = 0, transverse terms vanish; N set by K ell / N < eps")
    report.notes.append("K_grad and K_slice are sampled constants; the certificate is numerical")
    log.extend(boundary_chain(report))
    return report


def _eps_condition(epsilon) -> Check:
    e = epsilon if isinstance(epsilon, Fraction) else float(epsilon)
    lhs, rhs = 2 * e, 1 - 4 * e
    margin = rhs - lhs
    return Check("eps_contradiction", float(lhs), "<=", float(rhs), float(margin), margin >= 0,
                 "the chain gives 1 - 4 eps <= |f| < 2 eps, impossible once 6 eps <= 1")


def boundary_chain(report: CertificateReport) -> list[Check]:
    """The separation chain on synthetic worst-case inputs (|t1 - t2| near D, corner offsets)."""
    lam1, lam2 = synthetic_pair(report)
    return separation_check(report, lam1, lam2, assume_orthogonal=True, prefix="boundary.")


def synthetic_pair(report: CertificateReport) -> tuple[np.ndarray, np.ndarray]:
    """Two points of M at distance >= D: one at the origin, one at the far corner of a cube."""
    tube, d, h = report.tube, report.d, report.side
    target = math.sqrt(max(report.D ** 2 - (d - 1) * h ** 2, 0.0))
    k = int(math.floor(target / tube.ell))
    for kk in range(k, tube.k_max + 1):
        lo, hi = tube.interval(kk)
        if hi >= target:
            t1 = max(lo, target)
            break
    else:
        raise PreconditionError("tube region does not reach distance D")
    y1 = np.append(np.full(d - 1, h), t1)
    lam1 = y1 @ tube.frame
    lam2 = np.zeros(d)
    return lam1, lam2


def separation_check(
    report: CertificateReport,
    lam1,
    lam2,
    shift=None,
    *,
    assume_orthogonal: bool = False,
    prefix: str = "",
) -> list[Check]:
    """Replay the separation argument on two concrete points.

    With ``assume_orthogonal`` the orthogonality of the pair is taken as a
    hypothesis (synthetic inputs) and the upper chain is evaluated through
    its bounds; otherwise |chi_hat(lam1 - lam2)| <= tol.zero is required.
    """
    p, tube, tol = report.polytope, report.tube, report.tolerances
    K, eps, h, d, s = report.k_cert, float(report.epsilon), report.side, report.d, report.imbalance
    lam1 = np.asarray(lam1, dtype=float)
    lam2 = np.asarray(lam2, dtype=float)
    dist = float(np.linalg.norm(lam1 - lam2))
    if dist < report.D:
        raise PreconditionError(f"|lam1 - lam2| = {dist:.6g} is below D = {report.D:.6g}")
    if shift is None:
        shift = tube.find_shift(lam1, lam2)
        if shift is None:
            raise PreconditionError("points do not lie in a common translate of M")
    elif not tube.contains(np.vstack([lam1, lam2]), shift).all():
        raise PreconditionError("points are not both in M + shift")
    value = abs(complex(ft_exact(p, lam1 - lam2)))
    if not assume_orthogonal and value > tol.zero:
        raise PreconditionError(
            f"|chi_hat(lam1 - lam2)| = {value:.3g} exceeds {tol.zero}; the pair is not orthogonal"
        )

    xi = tube.direction
    c1, c2 = tube.coords(lam1 - shift), tube.coords(lam2 - shift)
    tr1, t1 = c1[0][0], float(c1[1][0])
    tr2, t2 = c2[0][0], float(c2[1][0])
    eta1 = tr1 @ tube.frame[:-1] if d > 1 else np.zeros(d)
    eta2 = tr2 @ tube.frame[:-1] if d > 1 else np.zeros(d)
    u = float(t1 - t2)
    delta = float(np.linalg.norm(eta1 - eta2))
    radius = h * math.sqrt(d - 1)
    f = report.wave
    out = []

    def log(*args, **kw):
        c = check(*args, **kw)
        out.append(Check(prefix + c.name, c.lhs, c.relation, c.rhs, c.margin, c.holds, c.note))

    log("eta1_in_cube", float(np.linalg.norm(eta1)), "<=", radius)
    log("eta2_in_cube", float(np.linalg.norm(eta2)), "<=", radius)
    log("radius_vs_eps", radius, "<", eps / (6 * K))
    log("mean_value_segment", delta, "<=", 2.0 * abs(u) / 3.0,
        "segment from u xi to lam1 - lam2 keeps |eta| >= |u|/3")
    log("segment_outside_unit_ball", abs(u) - delta, ">=", 1.0)
    upper = 3 * K * delta + K / abs(u)
    log("f_upper_bound", upper, "<", 2 * eps, "|f(u)| <= 3K|delta| + K/|u| < 2 eps")
    worst = 3 * K * 2 * radius + K / report.D
    log("f_upper_worst_case", worst, "<", 2 * eps, "|delta| at 2 (ell/N) sqrt(d-1), |u| at D")
    if not assume_orthogonal:
        slice_val = abs(complex(ft_exact(p, u * xi)))
        log("mean_value_actual", slice_val, "<=", 3 * K * delta / abs(u))
        log("f_actual_vs_bound", float(abs(f(u))), "<=", upper)

    tau1, tau2 = tube.tau_for(float(t1)), tube.tau_for(float(t2))
    log("tau1_near_t1", abs(tau1 - t1), "<=", h)
    log("tau2_near_t2", abs(tau2 - t2), "<=", h)
    log("K_ell_over_N", K * h, "<", eps)
    f0 = complex(f(0.0))
    steps = [
        abs(f0 - f(-tau2)),
        abs(f(-tau2) - f(tau1 - tau2)),
        abs(f(tau1 - tau2) - f(tau1 - t2)),
        abs(f(tau1 - t2) - f(u)),
    ]
    log("step_translation_tau2", float(steps[0]), "<=", eps)
    log("step_translation_tau1", float(steps[1]), "<=", eps)
    log("step_lipschitz_t2", float(steps[2]), "<=", K * h)
    log("step_lipschitz_t1", float(steps[3]), "<=", K * h)
    lower = abs(f0) - float(sum(steps))
    log("f_lower_actual", float(abs(f(u))), ">=", lower)
    log("f_lower_bound", lower, ">=", 1 - 4 * eps)
    log("contradiction", upper, "<", lower, "the hypotheses force |f(u)| below its lower bound")
    out.append(_eps_condition(report.epsilon))
    return out


# --- capacities and density ------------------------------------------------


def _unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def tube_capacity(report: CertificateReport, r0: float) -> tuple[int, int]:
    """Bound P (points per translate of M) by packing; Q = 2 N P.

    Points of a spectrum in one translate of M are pairwise closer than D
    and at least r = min(r0, D) apart. Three counts bound them:
      ball:  (2D/r + 1)^d            disjoint r/2-balls inside B(D + r/2)
      cubes: n_cubes * m^d           cubes meeting a length-(D + h) stretch,
                                     each split into m^d cells of diameter < r
      axis:  ceil(D / sqrt(r^2 - w^2)) when the cross-section diameter
             w = h sqrt(d-1) is below r (projections onto xi are then
             sqrt(r^2 - w^2) apart and spread less than D)
    and P = 1 once r0 >= D.
    """
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    d, D, h, ell = report.d, report.D, report.side, report.ell
    r = min(r0, D)
    ball = (2 * D / r + 1) ** d
    n_cubes = math.ceil((D + h) / ell) + 1
    m = math.floor(h * math.sqrt(d) / r) + 1
    cubes = n_cubes * m ** d
    w = h * math.sqrt(d - 1)
    axis = math.ceil(D / math.sqrt(r * r - w * w)) if w < r else math.inf
    if r0 >= D:
        P = 1  # two points of one translate are closer than D
    else:
        P = int(max(1, math.floor(min(ball, cubes, axis))))
    Q = 2 * report.N * P
    report.r0, report.P, report.Q = float(r0), P, Q
    report.packing = {
        "separation_used": r,
        "ball_bound": ball,
        "cube_bound": cubes,
        "axis_bound": None if axis == math.inf else axis,
        "P": P,
        "Q": Q,
        "Q_rule": "Q = 2 N P",
    }
    report.log.append(check("Q_equals_2NP", Q, ">=", 2 * report.N * P))
    return P, Q


def _max_tube_count(trans: np.ndarray, h: float) -> int:
    """Max number of points whose transverse coordinates fit one translate of [0, h]^(d-1)."""
    n, k = trans.shape
    if n == 0:
        return 0
    if k == 0:
        return n
    if k == 1:
        y = np.sort(trans[:, 0])
        hi = np.searchsorted(y, y + h * (1 + 1e-12), side="right")
        return int((hi - np.arange(n)).max())
    # any translate is covered by 2^k adjacent grid cells
    cells = np.floor(trans / h).astype(np.int64)
    uniq, counts = np.unique(cells, axis=0, return_counts=True)
    table = {tuple(c): int(v) for c, v in zip(uniq, counts)}
    offsets = np.array(np.meshgrid(*[[0, 1]] * k, indexing="ij")).reshape(k, -1).T
    best = 0
    for c in uniq:
        best = max(best, sum(table.get(tuple(c + o), 0) for o in offsets))
    return best


def density_contradiction(report: CertificateReport, points, window=None) -> dict:
    """Check every tube translate R xi + [0, ell/N]^d holds at most Q points of ``points``."""
    if report.Q is None:
        raise PreconditionError("run tube_capacity before density_contradiction")
    pts = np.asarray(points, dtype=float).reshape(-1, report.d)
    d, h, Q = report.d, report.side, report.Q
    if window is None:
        lo = pts.min(axis=0) if len(pts) else np.zeros(d)
        hi = pts.max(axis=0) if len(pts) else np.zeros(d)
    else:
        lo, hi = (np.asarray(w, dtype=float) for w in window)
    side = float((hi - lo).min()) if len(pts) or window is not None else 0.0
    trans, _ = report.tube.coords(pts) if len(pts) else (np.zeros((0, d - 1)), None)
    max_count = _max_tube_count(trans, h)
    volume = float(np.prod(hi - lo)) if side > 0 else 0.0

    def bound(R):
        return Q * (2 * R / h + 2) ** (d - 1) / (_unit_ball_volume(d) * R ** d)

    R_half = max(side / 2, 1e-300)
    R_star = 1.0
    while bound(R_star) >= 1.0 and R_star < 1e300:
        R_star *= 2
    lo_R = R_star / 2
    for _ in range(60):
        mid = 0.5 * (lo_R + R_star)
        if bound(mid) < 1.0:
            R_star = mid
        else:
            lo_R = mid
    result = {
        "n_points": int(len(pts)),
        "window": [lo.tolist(), hi.tolist()],
        "max_tube_count": max_count,
        "Q": Q,
        "all_tubes_within_Q": bool(max_count <= Q),
        "empirical_density": len(pts) / volume if volume > 0 else 0.0,
        "implied_density_bound_at_half_window": bound(R_half) if side > 0 else None,
        "radius_where_bound_drops_below_1": R_star,
        "required_density": 1.0 / report.polytope.volume,
    }
    if side < report.ell:
        result["verdict"] = INCONCLUSIVE
        result["reason"] = f"window side {side:.4g} is smaller than ell = {report.ell:.4g}"
    else:
        result["verdict"] = CERTIFIED if max_count <= Q else INCONCLUSIVE
    report.density = result
    return result
