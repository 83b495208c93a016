"""Command-line front end: ``polyspec <subcommand> ...``.

Every subcommand writes a JSON report (plus CSV tables and PNG figures where
they make sense) into the output directory and prints a short summary.

Exit codes: 0 success, 2 usage, 3 parse error, 4 validation error,
5 numerically inconclusive.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import corpus
from .certificate import (
    CERTIFIED,
    CriterionInapplicable,
    PreconditionError,
    density_contradiction,
    derive_constants,
    tube_capacity,
)
from .facewave import NoTranslationNumbers, NormalizationError, face_wave, find_translation_numbers
from .fourier import METHODS, evaluate, slice_profile
from .geometry import (
    NonUnitDirection,
    ParseError,
    Polytope,
    ValidationError,
    direction_report,
    load_polytope_file,
    parse_vector,
)
from .io import OUTPUT_ENV, default_output_dir, write_csv, write_report
from .orthopack import (
    PointSet,
    TailTooLarge,
    best_of_seeds,
    default_centers,
    estimate_density,
    greedy_orthogonal_pack,
    interior_grid,
    lattice_points,
    probe_zeros,
    spectral_pair_probe,
)
from .tiling import PaddingError, remark1_check, tiling_check
from .tolerances import DEFAULT, Tolerances

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_VALIDATION, EXIT_INCONCLUSIVE = 0, 2, 3, 4, 5
DEFAULT_SEED = 0

log = logging.getLogger("polyspec")


class Inconclusive(RuntimeError):
    """Raised after the report is written when the numerical verdict is not positive."""


# --- argument parsing helpers -------------------------------------------------


def parse_fraction(text: str) -> Fraction:
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"cannot parse {text!r} as a rational number") from exc
    return value


def parse_vec(text: str) -> np.ndarray:
    try:
        v = parse_vector(text)
    except ValueError as exc:
        raise ParseError(f"cannot parse vector {text!r}") from exc
    if v.size == 0:
        raise ParseError("empty vector")
    return v


def parse_box(text: str, d: int) -> tuple[np.ndarray, np.ndarray]:
    """``"s"`` means [0, s]^d; ``"a1,..,ad,b1,..,bd"`` is an explicit box."""
    v = parse_vec(text)
    if v.size == 1:
        lo, hi = np.zeros(d), np.full(d, float(v[0]))
    elif v.size == 2 * d:
        lo, hi = v[:d], v[d:]
    else:
        raise ParseError(f"box {text!r} needs 1 or {2 * d} numbers")
    if np.any(hi < lo):
        raise ParseError(f"box {text!r} has hi < lo")
    return lo, hi


def parse_tol(items) -> Tolerances:
    overrides = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise ParseError(f"--tol expects name=value, got {item!r}")
        try:
            overrides[name.strip()] = float(value)
        except ValueError as exc:
            raise ParseError(f"bad tolerance value {value!r}") from exc
    try:
        return DEFAULT.with_overrides(**overrides)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def load_polytope_arg(text: str, tol: Tolerances) -> Polytope:
    path = Path(text)
    if path.exists():
        return load_polytope_file(path, tol)
    try:
        return corpus.load_entry(text, tol)
    except KeyError:
        raise ParseError(f"{text!r} is neither a file nor a corpus entry") from None


def load_points(text: str) -> PointSet:
    try:
        doc = json.loads(Path(text).read_text())
        return PointSet.from_dict(doc)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError(f"cannot read point set {text!r}: {exc}") from exc


# --- subcommands ---------------------------------------------------------------


class Run:
    def __init__(self, args):
        self.args = args
        self.tol = parse_tol(args.tol)
        self.out = Path(args.out) if args.out else default_output_dir()
        self.plot = not args.no_plot
        self.written: list[Path] = []

    def stem(self, *parts) -> str:
        return "-".join([self.args.command, *[str(p) for p in parts if p]])

    def report(self, name: str, kind: str, payload: dict) -> Path:
        config = {k: v for k, v in sorted(vars(self.args).items()) if k not in ("func", "out")}
        path = write_report(self.out / f"{name}.json", kind, {"config": config, **payload}, self.tol.as_dict())
        self.written.append(path)
        return path

    def csv(self, name: str, header, rows) -> Path:
        path = write_csv(self.out / f"{name}.csv", header, rows)
        self.written.append(path)
        return path

    def figure(self, fn, name: str, *a, **kw):
        if self.plot:
            self.written.append(fn(*a, path=self.out / f"{name}.png", **kw))


def cmd_validate(run: Run):
    p = load_polytope_arg(run.args.polytope, run.tol)
    closure = p.closure_vector()
    payload = {
        "polytope": p.name,
        "dimension": p.d,
        "n_vertices": int(len(p.vertices)),
        "n_faces": len(p.faces),
        "n_simplices": len(p.simplices),
        "explicit_decomposition": p.explicit_simplices,
        "volume": p.volume,
        "surface_measure": p.surface_measure,
        "closure_vector": closure,
        "valid": True,
    }
    run.report(run.stem(p.name), "validation", payload)
    print(f"{p.name}: valid, d={p.d}, volume={p.volume:.12g}, |closure|_inf={np.abs(closure).max():.3g}")


def cmd_imbalance(run: Run):
    p = load_polytope_arg(run.args.polytope, run.tol)
    rep = direction_report(p, parse_vec(run.args.xi), run.tol)
    applicable = abs(rep.imbalance) > run.tol.imbalance
    run.report(run.stem(p.name), "imbalance", {"polytope": p.name, **rep.as_dict(), "applicable": applicable})
    print(f"imbalance {rep.imbalance:.12g}")
    print(f"applicable {str(applicable).lower()}")
    if rep.flagged:
        print(f"warning: faces {list(rep.near_parallel)} are nearly but not exactly normal to xi")


def cmd_ft_eval(run: Run):
    p = load_polytope_arg(run.args.polytope, run.tol)
    etas = [parse_vec(e) for e in run.args.eta]
    methods = METHODS if run.args.method == "both" else (run.args.method,)
    values = [evaluate(p, eta, m) for eta in etas for m in methods]
    run.report(run.stem(p.name), "ft-eval", {"polytope": p.name, "values": [v.as_dict() for v in values]})
    run.csv(run.stem(p.name), ["method", *[f"eta{k}" for k in range(p.d)], "re", "im", "abs"],
            [[v.method, *v.frequency, v.value.real, v.value.imag, abs(v.value)] for v in values])
    for v in values:
        print(f"{v.method:17s} eta={list(v.frequency)}  {v.value.real:+.15e} {v.value.imag:+.15e}i")


def cmd_ft_slice(run: Run):
    a = run.args
    p = load_polytope_arg(a.polytope, run.tol)
    prof = slice_profile(p, parse_vec(a.xi), a.t_min, a.t_max, a.step, run.tol)
    payload = {
        "polytope": p.name,
        "direction": prof.direction,
        "t_range": [a.t_min, a.t_max],
        "step": a.step,
        "sup_t2_residual": prof.constant,
        "leading_term": "-f(t) / (2 pi i t)",
    }
    run.report(run.stem(p.name), "ft-slice", payload)
    run.csv(run.stem(p.name), ["t", "re", "im", "abs", "leading_re", "leading_im", "abs_residual"], prof.rows())
    from .plotting import plot_slice

    run.figure(plot_slice, run.stem(p.name), prof)
    print(f"sup t^2 |residual| on [{a.t_min}, {a.t_max}] = {prof.constant:.6g}")


def cmd_zeros(run: Run):
    a = run.args
    p = load_polytope_arg(a.polytope, run.tol)
    if (a.ray is None) == (a.window is None):
        raise ParseError("give exactly one of --ray or --window")
    if a.ray is not None:
        probe = probe_zeros(p, ray=parse_vec(a.ray), t_max=a.t_max, step=a.step, tol=run.tol)
    else:
        probe = probe_zeros(p, window=parse_box(a.window, p.d), step=a.step, tol=run.tol)
    run.report(run.stem(p.name), "zeros", {"polytope": p.name, **probe.as_dict()})
    run.csv(run.stem(p.name), [*[f"eta{k}" for k in range(p.d)], "modulus", "abs_value"],
            [[*z, float(np.linalg.norm(z)), r] for z, r in zip(probe.zeros, probe.residuals)])
    from .plotting import plot_zeros

    run.figure(plot_zeros, run.stem(p.name), probe)
    print(f"{len(probe.zeros)} verified zeros; r0 = {probe.r0}")
    if not len(probe.zeros):
        raise Inconclusive("no zeros found in the probe range")


def cmd_translation_numbers(run: Run):
    a = run.args
    p = load_polytope_arg(a.polytope, run.tol)
    rep = direction_report(p, parse_vec(a.xi), run.tol)
    try:
        wave = face_wave(rep, normalize=not a.raw)
    except NormalizationError as exc:
        raise ValidationError(str(exc)) from exc
    cert = find_translation_numbers(wave, float(parse_fraction(a.epsilon)), T=a.t_max, tau_step=a.tau_step)
    run.report(run.stem(p.name), "translation-numbers",
               {"polytope": p.name, "direction": rep.direction, "wave": wave.as_dict(),
                "certificate": cert.as_dict(max_listed=a.max_listed)})
    t = np.linspace(0.0, min(cert.t_range, 20 * cert.ell), 2001)
    vals = wave(t)
    run.csv(run.stem(p.name, "wave"), ["t", "re_f", "im_f"], zip(t, vals.real, vals.imag))
    from .plotting import plot_wave

    run.figure(plot_wave, run.stem(p.name), cert)
    print(f"ell = {cert.ell:.6g} (stable: {str(cert.stable).lower()}), {len(cert.accepted)} accepted tau")
    if not cert.stable:
        raise Inconclusive("translation-number gap did not stabilise")


def _pack_or_load(run: Run, p: Polytope, window) -> PointSet:
    if getattr(run.args, "points", None):
        return load_points(run.args.points)
    return greedy_orthogonal_pack(p, window, run.args.seed, run.args.pack_step, run.tol)


def cmd_certificate(run: Run):
    a = run.args
    p = load_polytope_arg(a.polytope, run.tol)
    eps = parse_fraction(a.epsilon)
    rep = derive_constants(p, parse_vec(a.xi), eps, margin=a.margin, seed=a.seed, tol=run.tol)
    zl = parse_box(a.zero_window, p.d) if a.zero_window else (np.full(p.d, -5.0), np.full(p.d, 5.0))
    probe = probe_zeros(p, window=zl, step=a.zero_step, tol=run.tol)
    if probe.r0 is None:
        raise Inconclusive("no zero of the transform found; r0 undefined")
    tube_capacity(rep, probe.r0)
    window = parse_box(a.window, p.d)
    points = _pack_or_load(run, p, window)
    density_contradiction(rep, points.points, window)
    name = run.stem(p.name)
    run.report(name, "certificate", {"report": rep.as_dict(), "zero_probe": probe.as_dict(),
                                     "points": {"n": len(points), "provenance": points.provenance}})
    run.csv(name + "-inequalities", ["name", "lhs", "relation", "rhs", "margin", "holds"],
            [[c.name, c.lhs, c.relation, c.rhs, c.margin, c.holds] for c in rep.log])
    from .plotting import plot_tubes

    run.figure(plot_tubes, name, rep, points)
    print(f"K={rep.k_cert:.6g} eps={eps} ell={rep.ell:.6g} N={rep.N} D={rep.D:.6g} "
          f"r0={rep.r0:.6g} P={rep.P} Q={rep.Q}")
    worst = min(rep.log, key=lambda c: c.margin)
    print(f"{len(rep.log)} inequalities, smallest margin {worst.margin:.3g} ({worst.name})")
    print(f"max tube count {rep.density['max_tube_count']} <= Q: {rep.density['all_tubes_within_Q']}")
    print(f"verdict {rep.verdict}")
    if rep.verdict != CERTIFIED:
        raise Inconclusive("certificate inconclusive")


def cmd_pack(run: Run):
    a = run.args
    p = load_polytope_arg(a.polytope, run.tol)
    window = parse_box(a.window, p.d)
    seeds = range(a.seed, a.seed + a.seeds)
    results = best_of_seeds(p, window, seeds, a.pack_step, run.tol)
    best = max(results, key=lambda r: (r["normalized_density"], -r["seed"]))
    rows = [{"seed": r["seed"], "n_points": len(r["pack"]), "density": r["density"]["estimate"],
             "spread": r["density"]["spread"], "normalized_density": r["normalized_density"]} for r in results]
    run.report(run.stem(p.name), "pack", {"polytope": p.name, "window": window, "step": a.pack_step,
                                           "runs": rows, "best_seed": best["seed"]})
    pts_path = run.out / f"{run.stem(p.name, 'points')}.json"
    from .io import atomic_write_text, dumps

    run.written.append(atomic_write_text(pts_path, dumps(best["pack"].as_dict())))
    run.csv(run.stem(p.name), list(rows[0]), [list(r.values()) for r in rows])
    from .plotting import plot_points

    run.figure(plot_points, run.stem(p.name), best["pack"], title=f"seed {best['seed']}")
    for r in rows:
        print(f"seed {r['seed']}: {r['n_points']} points, density x volume = {r['normalized_density']:.4f}")


def cmd_density(run: Run):
    a = run.args
    if a.points:
        points = load_points(a.points)
        window = (points.points.min(axis=0), points.points.max(axis=0))
    else:
        if not a.lattice:
            raise ParseError("give --points or --lattice")
        spacing = parse_vec(a.spacing) if a.spacing else 1.0
        d = len(parse_vec(a.lattice)) // 2
        window = parse_box(a.lattice, d)
        points = lattice_points(*window, spacing)
    radii = parse_vec(a.radii)
    centers = (np.array(parse_vec(a.centers)).reshape(-1, points.dimension) if a.centers
               else default_centers(window, float(radii.max())))
    dens = estimate_density(points, centers, radii, window)
    run.report(run.stem(), "density", {"n_points": len(points), **dens})
    run.csv(run.stem(), ["radius", *[f"c{k}" for k in range(points.dimension)], "count", "density", "clipped"],
            [[r["radius"], *r["center"], r["count"], r["density"], r["clipped"]] for r in dens["table"]])
    from .plotting import plot_density

    run.figure(plot_density, run.stem(), dens["table"])
    print(f"density estimate {dens['estimate']:.6g}, spread {dens['spread']:.3g}, clipped {dens['clipped']}")


def _lambda_for(run: Run, tile: Polytope, lo, hi) -> PointSet:
    a = run.args
    if a.lambda_file:
        return load_points(a.lambda_file)
    spacing = parse_vec(a.lattice) if a.lattice else np.ones(tile.d)
    pad = tile.diameter + float(np.max(spacing))
    return lattice_points(lo - np.abs(tile.vertices).max() - pad, hi + np.abs(tile.vertices).max() + pad, spacing)


def cmd_tiling_check(run: Run):
    a = run.args
    tile = load_polytope_arg(a.tile, run.tol)
    lo, hi = parse_box(a.region, tile.d)
    points = _lambda_for(run, tile, lo, hi)
    level = float(parse_fraction(a.level))
    check = tiling_check(tile, points, (lo, hi), level)
    payload = {"tile": tile.name, "n_points": len(points), "check": check.as_dict()}
    if check.tiles:
        if a.lambda_file:
            big = points
        else:
            spacing = parse_vec(a.lattice) if a.lattice else np.ones(tile.d)
            big = lattice_points(lo - 20 * tile.diameter, hi + 20 * tile.diameter, spacing)
        payload["density_identity"] = remark1_check(tile, big, level, check)
    run.report(run.stem(tile.name), "tiling-check", payload)
    run.csv(run.stem(tile.name, "histogram"), ["multiplicity", "samples"], sorted(
        ([int(k), v] for k, v in check.histogram.items())))
    from .plotting import plot_histogram

    run.figure(plot_histogram, run.stem(tile.name), check.histogram, level=level)
    print(f"verdict {check.verdict} (level {level:g}); multiplicities {check.histogram}; "
          f"exceptional fraction {check.exceptional_fraction:.3g}")
    if "density_identity" in payload:
        r = payload["density_identity"]
        print(f"density {r['density_estimate']:.5g} vs level/volume {r['target']:.5g}: "
              f"{'pass' if r['passed'] else 'fail'}")


def cmd_spectral_probe(run: Run):
    a = run.args
    p = load_polytope_arg(a.polytope, run.tol)
    if a.points:
        points = load_points(a.points)
        window = (points.points.min(axis=0) - 0.5, points.points.max(axis=0) + 0.5)
    else:
        window = parse_box(a.window, p.d)
        spacing = parse_vec(a.lattice) if a.lattice else 1.0
        points = lattice_points(*window, spacing)
        step = np.broadcast_to(np.asarray(spacing, dtype=float), (p.d,))
        window = (window[0] - step / 2, window[1] + step / 2)
    side = float((window[1] - window[0]).min())
    grid = interior_grid(window, margin=(side - a.grid_extent) / 2, n=a.grid_n)
    res = spectral_pair_probe(p, points, grid, window, a.tail_tolerance)
    run.report(run.stem(p.name), "spectral-probe", {"polytope": p.name, **res})
    print(f"max |sum/V^2 - 1| = {res['max_deviation']:.4g}; tail estimate {res['tail_estimate']}")


def cmd_corpus_verify(run: Run):
    results = corpus.corpus_verify(run.tol)
    run.report(run.stem(), "corpus-verify", {"entries": results})
    for r in results:
        print(f"{r['name']:10s} {'pass' if r['passed'] else 'FAIL'}")
    if not all(r["passed"] for r in results):
        raise ValidationError("corpus verification failed")


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or ./polyspec-out)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random seed (default %(default)s)")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE",
                        help=f"tolerance override, repeatable; names: {', '.join(DEFAULT.as_dict())}")
    common.add_argument("--no-plot", action="store_true", help="skip figures")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="polyspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_, description=help_)
        sp.set_defaults(func=func)
        return sp

    poly_help = "polytope JSON file or corpus entry name"
    sp = add("validate", cmd_validate, "load and validate a polytope")
    sp.add_argument("--polytope", required=True, help=poly_help)

    sp = add("imbalance", cmd_imbalance, "signed measure of the faces normal to a direction")
    sp.add_argument("--polytope", required=True, help=poly_help)
    sp.add_argument("--xi", required=True, help='unit direction, e.g. "1,0"')

    sp = add("ft-eval", cmd_ft_eval, "evaluate the Fourier transform at frequencies")
    sp.add_argument("--polytope", required=True, help=poly_help)
    sp.add_argument("--eta", required=True, action="append", help='frequency "x,y[,z]", repeatable')
    sp.add_argument("--method", choices=[*METHODS, "both"], default="exact-simplex")

    sp = add("ft-slice", cmd_ft_slice, "transform along t xi against its leading term")
    sp.add_argument("--polytope", required=True, help=poly_help)
    sp.add_argument("--xi", required=True)
    sp.add_argument("--t-min", type=float, default=1.0)
    sp.add_argument("--t-max", type=float, default=100.0)
    sp.add_argument("--step", type=float, default=0.01)

    sp = add("zeros", cmd_zeros, "locate zeros of the transform on a ray or in a window")
    sp.add_argument("--polytope", required=True, help=poly_help)
    sp.add_argument("--ray", help="ray direction")
    sp.add_argument("--t-max", type=float, default=10.0)
    sp.add_argument("--window", help='box "a1,..,ad,b1,..,bd" or side s for [0,s]^d')
    sp.add_argument("--step", type=float, default=0.05)

    sp = add("translation-numbers", cmd_translation_numbers, "translation numbers of the face wave")
    sp.add_argument("--polytope", required=True, help=poly_help)
    sp.add_argument("--xi", required=True)
    sp.add_argument("--epsilon", default="1/6", help="rational, e.g. 1/6")
    sp.add_argument("--t-max", type=float, default=50.0)
    sp.add_argument("--tau-step", type=float)
    sp.add_argument("--raw", action="store_true", help="do not normalize the wave to f(0) = 1")
    sp.add_argument("--max-listed", type=int, default=200)

    sp = add("certificate", cmd_certificate, "full quantitative certificate for a direction")
    sp.add_argument("--polytope", required=True, help=poly_help)
    sp.add_argument("--xi", required=True)
    sp.add_argument("--epsilon", default="1/6")
    sp.add_argument("--window", default="50", help="window for the candidate set (side or box)")
    sp.add_argument("--points", help="candidate set JSON; default is a greedy orthogonal pack")
    sp.add_argument("--pack-step", type=float, default=0.1)
    sp.add_argument("--margin", type=float, default=0.05)
    sp.add_argument("--zero-window", help="box scanned for the nearest zero (default [-5,5]^d)")
    sp.add_argument("--zero-step", type=float, default=0.05)

    sp = add("pack", cmd_pack, "greedy orthogonal packing across seeds")
    sp.add_argument("--polytope", required=True, help=poly_help)
    sp.add_argument("--window", default="50")
    sp.add_argument("--pack-step", type=float, default=0.1)
    sp.add_argument("--seeds", type=int, default=5, help="number of consecutive seeds from --seed")

    sp = add("density", cmd_density, "ball-count density of a point set")
    sp.add_argument("--points", help="PointSet JSON")
    sp.add_argument("--lattice", help="box for a generated lattice instead of --points")
    sp.add_argument("--spacing", help="lattice spacing per axis")
    sp.add_argument("--radii", default="10,20,40")
    sp.add_argument("--centers", help="flattened centre coordinates")

    sp = add("tiling-check", cmd_tiling_check, "multiplicity count of a translational tiling")
    sp.add_argument("--tile", required=True, help=poly_help)
    sp.add_argument("--lambda", dest="lambda_file", help="PointSet JSON; default a padded lattice")
    sp.add_argument("--lattice", help="lattice spacing per axis when --lambda is absent")
    sp.add_argument("--region", required=True)
    sp.add_argument("--level", default="1")

    sp = add("spectral-probe", cmd_spectral_probe, "check sum |chi_hat(x - lam)|^2 = volume^2")
    sp.add_argument("--polytope", required=True, help=poly_help)
    sp.add_argument("--points", help="PointSet JSON; default a lattice on --window")
    sp.add_argument("--window", default="-20,-20,20,20")
    sp.add_argument("--lattice", help="lattice spacing")
    sp.add_argument("--grid-n", type=int, default=11)
    sp.add_argument("--grid-extent", type=float, default=2.0, help="side of the central probe grid")
    sp.add_argument("--tail-tolerance", type=float)

    add("corpus-verify", cmd_corpus_verify, "load every shipped example and check its expected flags")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        run = Run(args)
        args.func(run)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, NonUnitDirection, CriterionInapplicable, PaddingError, PreconditionError,
            NormalizationError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (Inconclusive, NoTranslationNumbers, TailTooLarge) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    for path in run.written:
        log.info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
