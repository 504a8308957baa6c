"""Command line entry point: ``geokit <command> ...``.

Exit status is 0 on success, 2 on usage errors and 3 when a solver fails
to converge.  Output goes to ``--out`` or standard output and depends only
on the arguments (including ``--seed``).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from contextlib import contextmanager

import numpy as np

from geokit import ccmetric, curves, embeddings, gridmap, grushin, heisenberg, lab
from geokit.io import curve_header, format_float, read_curve, write_curve, write_rows

EXIT_USAGE = 2
EXIT_UNCONVERGED = 3


class UsageError(Exception):
    pass


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_float(text):
    v = _float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _float(text):
    """Accept plain floats and powers of two written as ``2^-10``."""
    text = text.strip()
    try:
        if text.startswith("2^"):
            v = 2.0 ** float(text[2:])
        else:
            v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text}") from None
    if not np.isfinite(v):
        raise argparse.ArgumentTypeError(f"not a finite number: {text}")
    return v


def _nonneg_float(text):
    v = _float(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative number, got {text}")
    return v


def _vector(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated vector: {text}") from None
    if not all(np.isfinite(vals)):
        raise argparse.ArgumentTypeError(f"non-finite coordinate in {text}")
    return np.array(vals)


def _seed(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit_record(args, payload):
    """Key/value report: JSON by default, two-column CSV on request."""
    with _output(args.out) as fh:
        if args.format == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["key", "value"])
            for k in sorted(payload):
                v = payload[k]
                w.writerow([k, json.dumps(v) if isinstance(v, (list, dict)) else v])
        else:
            fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _emit_table(args, header, rows):
    with _output(args.out) as fh:
        if args.format == "json":
            data = [dict(zip(header, map(float, r))) for r in rows]
            fh.write(json.dumps(data, indent=1) + "\n")
        else:
            write_rows(fh, header, rows)


def _emit_scalar(args, name, value):
    with _output(args.out) as fh:
        if args.format == "json":
            fh.write(json.dumps({name: float(value)}) + "\n")
        else:
            fh.write(format_float(value) + "\n")


def _check_point(vec, n, name):
    if vec.size != 2 * n + 1:
        raise UsageError(f"--{name} needs {2 * n + 1} coordinates for H^{n}, got {vec.size}")
    return vec


def _cfg(args):
    return ccmetric.CCSolverConfig(controls_per_path=args.K, restarts=args.restarts,
                                   seed=args.seed)


def _sphere_sampler(kind):
    return {"legendrian": embeddings.legendrian_F, "cayley": embeddings.cayley_sphere}[kind]


def cmd_dist(args):
    if args.metric == "grushin":
        if args.p.size != 2 or args.q.size != 2:
            raise UsageError("grushin points take two coordinates")
        d = grushin.grushin_dist(args.p, args.q, _cfg(args))
    else:
        p, q = _check_point(args.p, args.n, "p"), _check_point(args.q, args.n, "q")
        if args.metric == "koranyi":
            d = float(heisenberg.koranyi_dist(p, q))
        else:
            d = ccmetric.cc_dist(p, q, _cfg(args))
    _emit_scalar(args, "distance", d)


def cmd_scan(args):
    if args.kind == "comparability":
        rep = ccmetric.comparability_scan((args.lo, args.hi), args.samples, args.n, args.seed)
        payload = {"c_low": rep.c_low, "c_high": rep.c_high, "c_root": rep.c_root,
                   "koranyi_low": rep.koranyi_low, "koranyi_high": rep.koranyi_high,
                   "pairs": rep.pairs}
    else:
        rep = embeddings.bilip_estimate(_sphere_sampler(args.embedding), args.n, args.metric,
                                        args.samples, args.seed)
        payload = {"lower": rep.lower, "upper": rep.upper, "samples": rep.samples,
                   "argmin_pair": [v.tolist() for v in rep.argmin_pair],
                   "argmax_pair": [v.tolist() for v in rep.argmax_pair]}
    payload.update(kind=args.kind, seed=args.seed, n=args.n)
    _emit_record(args, payload)


def cmd_lift(args):
    if args.input is not None:
        planar = read_curve(args.input)
    else:
        s = np.linspace(0.0, 2.0 * np.pi, args.samples)
        planar = curves.SampledCurve(s, np.column_stack([np.cos(s), np.sin(s)]))
    lifted = curves.horizontal_lift(planar, args.t0)
    if args.format == "json":
        _emit_table(args, curve_header(lifted.dim),
                    np.column_stack([lifted.params, lifted.points]))
    else:
        with _output(args.out) as fh:
            write_curve(lifted, fh)


def _embed_samples(n, samples, seed):
    """Pole-first deterministic sphere samples in ``(x0, x')`` order."""
    if n == 1:
        theta = 2.0 * np.pi * np.arange(samples) / samples
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if n == 2 and samples >= 2:
        k = np.arange(samples)
        z = 1.0 - 2.0 * k / (samples - 1)
        r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        ang = np.pi * (1.0 + np.sqrt(5.0)) * k
        return np.column_stack([z, r * np.cos(ang), r * np.sin(ang)])
    pts = embeddings.uniform_sphere(n, samples, seed)
    pts[0] = 0.0
    pts[0, 0] = 1.0
    return pts


def cmd_embed(args):
    pts = _embed_samples(args.n, args.samples, args.seed)
    if args.kind == "legendrian":
        image = embeddings.legendrian_F(pts)
        dom, names = pts, [f"x{j}" for j in range(args.n + 1)]
    else:
        # the chart pole sits on the last axis; roll so row 0 maps to infinity
        xi = np.roll(pts, -1, axis=1)
        image = embeddings.cayley_sphere(xi)
        with np.errstate(divide="ignore", invalid="ignore"):
            dom = embeddings.stereographic(xi)
        dom[~np.all(np.isfinite(dom), axis=1)] = np.inf
        names = [f"u{j + 1}" for j in range(args.n)]
    header = names + [c for j in range(args.n) for c in (f"x{j + 1}", f"y{j + 1}")] + ["t"]
    _emit_table(args, header, np.column_stack([dom, image]))


def cmd_check(args):
    if args.what == "contact":
        payload = {"embedding": args.embedding, "mesh": args.mesh,
                   "pullback_defect": embeddings.pullback_defect(
                       _sphere_sampler(args.embedding), args.mesh, args.n)}
        if args.h is not None:
            eps = args.eps if args.eps is not None else 2 * args.h
            f = gridmap.compose_on_grid(_sphere_sampler(args.embedding), args.n + 1, args.h, eps)
            payload["grid_contact_residual"] = gridmap.contact_residual(f)
    elif args.what == "eikonal":
        n = args.n
        p = _check_point(args.p, n, "p")
        q = _check_point(args.q, n, "q") if args.q is not None else np.zeros(2 * n + 1)
        payload = {"gradient_norm": ccmetric.eikonal_check(q, p, args.h or 1e-4)}
    elif args.what == "rank":
        rng = np.random.default_rng(args.seed)
        x = rng.standard_normal((args.samples, args.n + 1))
        x *= rng.uniform(0.5, 1.5, (args.samples, 1)) / np.linalg.norm(x, axis=1, keepdims=True)
        sampler = _sphere_sampler(args.embedding)
        rep = lab.rank_check(lambda u: sampler(gridmap.cavitation(u)), x, args.tol)
        payload = {"max_rank": rep.max_rank,
                   "max_relative_sigma": float(rep.relative(args.n).max())}
    else:
        forms = {"xdy": _xdy_form(), "closed": _closed_form()}
        maps = {"identity": lambda x: x,
                "radial": lambda x: np.linalg.norm(x, axis=-1, keepdims=True) * x}
        b, i = lab.stokes_check(maps[args.map], forms[args.form], args.h)
        payload = {"boundary": b, "interior": i, "gap": abs(b - i)}
    payload["check"] = args.what
    _emit_record(args, payload)


def _xdy_form():
    return lab.OneForm.from_terms(2, {}, {(1, 0): 1.0})


def _closed_form():
    # d(x^2 + y^3)
    return lab.OneForm.from_terms(2, {(1, 0): 2.0}, {(0, 2): 3.0})


def cmd_energy(args):
    if args.eps < 2 * args.h:
        raise UsageError("--eps must be at least 2 * --h")
    f = gridmap.compose_on_grid(_sphere_sampler(args.embedding), args.n + 1, args.h, args.eps)
    if args.annuli:
        # exp2 keeps dyadic radii exact
        radii = np.exp2(np.linspace(np.log2(args.eps), 0.0, args.annuli + 1))
    else:
        radii = np.array([args.eps, 1.0])
    radii[-1] = 1.0 + args.h  # include the boundary sphere
    energies = gridmap.annular_energies(f, args.p, radii, tol=args.tol)
    rows = np.column_stack([radii[:-1], radii[1:], energies, np.cumsum(energies[::-1])[::-1]])
    _emit_table(args, ["r_lo", "r_hi", "energy", "energy_outside_r_lo"], rows)


def cmd_grushin(args):
    if args.what == "geodesic":
        g = grushin.GrushinGeodesic(args.m, args.y1, args.sign)
        c = grushin.sample_geodesic(g, args.samples)
        _emit_table(args, ["t", "x", "y"], np.column_stack([c.params, c.points]))
    elif args.what == "curvature":
        _emit_scalar(args, "curvature", grushin.grushin_curvature(args.x))
    else:
        if args.p.size != 2 or args.q.size != 2:
            raise UsageError("grushin points take two coordinates")
        d = grushin.grushin_dist(args.p, args.q, _cfg(args))
        _emit_scalar(args, "distance", d)


def _solver_flags(p):
    p.add_argument("--K", type=_positive_int, default=64, help="controls per path")
    p.add_argument("--restarts", type=_positive_int, default=8)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=["csv", "json"], default=None,
                        help="tables default to csv, reports to json")

    parser = argparse.ArgumentParser(prog="geokit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", parents=[common], help="distance between two points")
    p.add_argument("--metric", choices=["koranyi", "cc", "grushin"], default="koranyi")
    p.add_argument("--n", type=_positive_int, default=1)
    p.add_argument("--p", type=_vector, required=True)
    p.add_argument("--q", type=_vector, required=True)
    _solver_flags(p)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("scan", parents=[common], help="comparability or distortion scans")
    p.add_argument("--kind", choices=["comparability", "bilip"], default="comparability")
    p.add_argument("--n", type=_positive_int, default=1)
    p.add_argument("--samples", type=_positive_int, default=10_000)
    p.add_argument("--lo", type=_float, default=-1.0)
    p.add_argument("--hi", type=_float, default=1.0)
    p.add_argument("--embedding", choices=["legendrian", "cayley"], default="legendrian")
    p.add_argument("--metric", choices=["koranyi", "cc"], default="koranyi")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("lift", parents=[common], help="horizontal lift of a planar curve")
    p.add_argument("--in", dest="input", default=None, help="CSV with columns s,x1,y1,...")
    p.add_argument("--samples", type=_positive_int, default=10_001,
                   help="unit circle samples when no --in is given")
    p.add_argument("--t0", type=_float, default=0.0)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("embed", parents=[common], help="sample a sphere embedding")
    p.add_argument("--kind", choices=["cayley", "legendrian"], required=True)
    p.add_argument("--n", type=_positive_int, default=1)
    p.add_argument("--samples", type=_positive_int, default=256)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("check", parents=[common], help="numerical property checks")
    p.add_argument("what", choices=["contact", "eikonal", "rank", "stokes"])
    p.add_argument("--n", type=_positive_int, default=1)
    p.add_argument("--embedding", choices=["legendrian", "cayley"], default="legendrian")
    p.add_argument("--mesh", type=_positive_float, default=1e-3)
    p.add_argument("--h", type=_positive_float, default=None)
    p.add_argument("--eps", type=_positive_float, default=None)
    p.add_argument("--p", type=_vector, default=None)
    p.add_argument("--q", type=_vector, default=None)
    p.add_argument("--samples", type=_positive_int, default=1000)
    p.add_argument("--tol", type=_positive_float, default=1e-6)
    p.add_argument("--map", choices=["identity", "radial"], default="identity")
    p.add_argument("--form", choices=["xdy", "closed"], default="xdy")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("energy", parents=[common], help="horizontal energy of F o u0 on annuli")
    p.add_argument("--embedding", choices=["legendrian", "cayley"], default="legendrian")
    p.add_argument("--n", type=_positive_int, default=1)
    p.add_argument("--p", type=_positive_float, default=1.5)
    p.add_argument("--h", type=_positive_float, default=2.0 ** -8)
    p.add_argument("--eps", type=_positive_float, default=2.0 ** -6)
    p.add_argument("--annuli", type=int, default=6)
    p.add_argument("--tol", type=_positive_float, default=0.1,
                   help="bound on the relative contact residual")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("grushin", parents=[common], help="Grushin plane tools")
    p.add_argument("what", choices=["geodesic", "curvature", "dist"])
    p.add_argument("--m", type=_positive_int, default=1)
    p.add_argument("--y1", type=_positive_float, default=1.0)
    p.add_argument("--sign", type=int, choices=[1, -1], default=1)
    p.add_argument("--samples", type=_positive_int, default=101)
    p.add_argument("--x", type=_float, default=1.0)
    p.add_argument("--p", type=_vector, default=None)
    p.add_argument("--q", type=_vector, default=None)
    _solver_flags(p)
    p.set_defaults(func=cmd_grushin)
    return parser


def _validate(args):
    if args.command == "check":
        if args.what == "eikonal" and args.p is None:
            raise UsageError("check eikonal needs --p")
        if args.what == "stokes" and args.h is None:
            args.h = 1e-2
    if args.command == "grushin" and args.what == "dist" and (args.p is None or args.q is None):
        raise UsageError("grushin dist needs --p and --q")
    if args.command == "grushin" and args.what == "curvature" and args.x == 0:
        raise UsageError("curvature is undefined on the axis x = 0")
    if args.command == "grushin" and args.what == "geodesic" and args.samples < 2:
        raise UsageError("need at least 2 samples")
    if args.command == "energy" and args.annuli < 0:
        raise UsageError("--annuli must be nonnegative")
    if args.command == "scan" and args.samples < 2:
        raise UsageError("--samples must be >= 2")
    if args.command == "scan" and not args.lo < args.hi:
        raise UsageError("--lo must be below --hi")
    if args.command == "lift" and args.input is None and args.samples < 2:
        raise UsageError("need at least 2 samples")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        _validate(args)
        args.func(args)
    except UsageError as exc:
        print(f"geokit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ccmetric.UnconvergedError as exc:
        print(f"geokit: unconverged: {exc} (best bound {exc.best_bound})", file=sys.stderr)
        return EXIT_UNCONVERGED
    except ValueError as exc:
        print(f"geokit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


def main():
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # downstream closed the pipe (e.g. `| head`); not an error
        sys.stdout = None
        code = 0
    sys.exit(code)


if __name__ == "__main__":
    main()
