"""Command-line entry points.

Exit codes: 0 when every check passed, 2 on a diagnostic failure (a
residual above tolerance, a solver problem), 3 on invalid input.
"""
from __future__ import annotations

import argparse
import math
import sys

from . import __version__
from .coarea import coarea_integral, level_flux
from .criticality import (
    ClassificationThresholds,
    EigenSolveSpec,
    RegionFamily,
    energy_decay_certificate,
    null_criticality_divergence,
    rayleigh_sweep,
    scaled,
)
from .errors import GraphHardyError, InputError, UnsupportedFamily
from .families import halfline, halfline_dirichlet, lattice, path_graph, regular_tree
from .graph import GraphFunction, load_graph
from .green import green_dirichlet, green_fourier_lattice, lattice_hardy_weight
from .hardy import construct_weight, halfline_supersolutions, halfline_weight
from .io import parse_vertex, read_weight_csv, render_csv, render_json, table_payload
from .linalg import LinearSolveSpec
from .schrodinger import SchrodingerOperator, apply
from .verify import IDENTITIES, asymmetric_graph, run_trials

EXIT_OK, EXIT_DIAGNOSTIC, EXIT_INPUT = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _int_list(s: str) -> list[int]:
    try:
        return [int(float(p)) for p in s.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from exc


def _float_list(s: str) -> list[float]:
    try:
        return [float(p) for p in s.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from exc


GLOBAL_DEFAULTS = {"out": None, "format": "csv", "seed": 0, "tol": 1e-10}


def _global_flags(parser):
    parser.add_argument("--out", default=argparse.SUPPRESS, help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    parser.add_argument("--tol", type=float, default=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="graphhardy", description="Optimal Hardy weights on weighted graphs.")
    p.add_argument("--version", action="version", version=f"graphhardy {__version__}")
    _global_flags(p)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    hw = sub.add_parser("hardy-weight", help="tabulate the constructed weight")
    _global_flags(hw)
    hw.add_argument("--family", choices=("halfline", "lattice", "tree"), default="halfline")
    hw.add_argument("--dim", type=int, default=3)
    hw.add_argument("--range", default="1:10", help="halfline vertices lo:hi, inclusive")
    hw.add_argument("--points", default="axis:10,20,30",
                    help="lattice points: 'axis:k1,k2,...' or 'x,y,z;x,y,z'")
    hw.add_argument("--nodes", type=int, default=128)

    ve = sub.add_parser("verify", help="random-graph identity checks")
    _global_flags(ve)
    ve.add_argument("--trials", type=int, default=100)
    ve.add_argument("--identity", choices=("all",) + IDENTITIES, default="all")
    ve.add_argument("--f", default="one", help="integrand for the coarea identity")
    ve.add_argument("--max-vertices", type=int, default=50)
    ve.add_argument("--inject-asymmetry", action="store_true")

    sw = sub.add_parser("sweep", help="generalized Rayleigh sweeps and trend diagnostics")
    _global_flags(sw)
    sw.add_argument("--family", choices=("halfline",), default="halfline")
    sw.add_argument("--graph", help="custom finite graph (JSON); needs --weight-file")
    sw.add_argument("--weight-file", help="CSV of vertex,w")
    sw.add_argument("--balls", type=_int_list, default=[100, 1000, 10000])
    sw.add_argument("--annulus-inner", type=int)
    sw.add_argument("--annuli", type=_int_list, default=[100, 1000, 10000])
    sw.add_argument("--scale", type=float, default=None,
                    help="multiply the weight (default 1; applies to balls and annuli)")
    sw.add_argument("--null-n", type=_float_list, default=[4, 16, 256])
    sw.add_argument("--divergence-radii", type=_int_list, default=[1000, 10000, 100000])
    sw.add_argument("--no-trends", action="store_true", help="skip energies and partial sums")

    gr = sub.add_parser("green", help="Green function values")
    _global_flags(gr)
    gr.add_argument("--family", choices=("halfline", "lattice", "tree"), default="halfline")
    gr.add_argument("--graph", help="custom finite graph (JSON)")
    gr.add_argument("--dim", type=int, default=3)
    gr.add_argument("--degree", type=int, default=3)
    gr.add_argument("--method", choices=("dirichlet", "fourier"), default=None)
    gr.add_argument("--radius", type=int, default=50)
    gr.add_argument("--pole", default=None)
    gr.add_argument("--dirichlet-at", default=None, help="comma-separated vertices pinned to zero")
    gr.add_argument("--point", action="append", default=None, help="lattice point x,y,z (repeatable)")
    gr.add_argument("--nodes", type=int, default=128)
    gr.add_argument("--normalization", choices=("auto", "laplacian", "random-walk"), default="auto")

    co = sub.add_parser("coarea-check", help="level flux and both sides of the coarea identity")
    _global_flags(co)
    co.add_argument("--family", choices=("halfline",), default="halfline")
    co.add_argument("--graph", help="custom finite graph (JSON); needs --u-file")
    co.add_argument("--u-file", help="CSV of vertex,u")
    co.add_argument("--u", default="identity", help="halfline u: 'identity' or 'green:POLE'")
    co.add_argument("--radius", type=int, default=100)
    co.add_argument("--f", default="one")
    return p


def _emit(args, header, rows, extra=None) -> None:
    config = {k: v for k, v in vars(args).items() if k != "out"}
    if args.format == "json":
        payload = table_payload(header, rows)
        payload.update(extra or {})
        text = render_json(payload, config)
    else:
        text = render_csv(header, rows, config)
    _write(args, text)


def _write(args, text):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- hardy-weight -----------------------------------------------------------

def _parse_range(s):
    try:
        lo, hi = (int(p) for p in s.split(":"))
    except ValueError as exc:
        raise InputError(f"range must be lo:hi, got {s!r}") from exc
    return range(lo, hi + 1)


def _parse_points(s, d):
    if s.startswith("axis:"):
        return [tuple([k] + [0] * (d - 1)) for k in (int(p) for p in s[5:].split(",") if p.strip())]
    pts = []
    for chunk in s.split(";"):
        if chunk.strip():
            x = tuple(int(c) for c in chunk.split(","))
            if len(x) != d:
                raise InputError(f"point {chunk!r} is not in Z^{d}")
            pts.append(x)
    return pts


def cmd_hardy_weight(args) -> int:
    if args.family == "halfline":
        H = SchrodingerOperator(halfline_dirichlet())
        W = construct_weight(H, *halfline_supersolutions(), tol=args.tol)
        rows = []
        for n in _parse_range(args.range):
            if n < 1:
                raise InputError("halfline vertices start at 1 (Dirichlet condition at 0)")
            ev = W.evaluate(n)
            rows.append((n, W(n), ev.w_edge, abs(ev.Hu), abs(ev.Hv), halfline_weight(n)))
        _emit(args, ("vertex", "w", "w_edge_formula", "abs_Hu", "abs_Hv", "closed_form"), rows)
        return EXIT_OK
    if args.family == "lattice":
        if args.dim < 3:
            raise UnsupportedFamily("the Green-function weight needs a transient lattice, d >= 3")
        rows = []
        for x in _parse_points(args.points, args.dim):
            if not any(x):
                raise InputError("the weight is not defined at the pole")
            w = lattice_hardy_weight(args.dim, x, args.nodes)
            n2 = float(sum(c * c for c in x))
            rows.append((x, w, n2, w * n2))
        _emit(args, ("vertex", "w", "norm2", "w_times_norm2"), rows,
              {"limit": (args.dim - 2) ** 2 / 4.0})
        return EXIT_OK
    raise UnsupportedFamily(f"no built-in weight for family {args.family!r}")


# --- verify -------------------------------------------------------------------

def cmd_verify(args) -> int:
    if args.inject_asymmetry:
        asymmetric_graph(args.seed)
    if args.max_vertices < 2:
        raise InputError("max-vertices must be at least 2")
    names = IDENTITIES if args.identity == "all" else (args.identity,)
    results = run_trials(names, args.seed, args.trials, args.max_vertices, args.f)
    rows = [(r.trial, r.identity, r.vertices, r.residual, r.lhs, r.rhs) for r in results]
    worst = max((r.residual for r in results), default=0.0)
    _emit(args, ("trial", "identity", "vertices", "residual", "lhs", "rhs"), rows,
          {"max_residual": worst, "passed": worst <= args.tol})
    return EXIT_OK if worst <= args.tol else EXIT_DIAGNOSTIC


# --- sweep ----------------------------------------------------------------------

def cmd_sweep(args) -> int:
    scale = 1.0 if args.scale is None else args.scale
    trends = not args.no_trends
    if args.graph or args.weight_file:
        if not (args.graph and args.weight_file):
            raise InputError("a custom sweep needs both --graph and --weight-file")
        G = load_graph(args.graph)
        table = read_weight_csv(args.weight_file)
        H = SchrodingerOperator(G)
        w = GraphFunction(lambda x: table.get(x, 0.0), name="w-file")
        psi = u0 = None
        trends = False
    else:
        H = SchrodingerOperator(halfline_dirichlet())
        W = construct_weight(H, *halfline_supersolutions(), tol=args.tol)
        w, psi, u0 = W, W.ground_state(), (lambda n: float(n))
    w = scaled(w, scale) if scale != 1.0 else w
    spec = EigenSolveSpec()
    th = ClassificationThresholds()
    balls = rayleigh_sweep(H, w, RegionFamily("balls", tuple(args.balls)), spec, th)
    payload = {"radii": list(balls.radii), "lambda_star": list(balls.lambda_star),
               "energies": [], "partial_sums": [], "scale": scale}
    verdict = {"classification": balls.classification, "monotone": balls.monotone,
               "hardy_inequality": balls.classification != "supercritical"}
    rows = [("ball", N, lam, m) for N, lam, m in zip(balls.radii, balls.lambda_star, balls.methods)]
    if args.annulus_inner is not None:
        ann = rayleigh_sweep(H, w, RegionFamily("annuli", tuple(args.annuli), args.annulus_inner), spec, th)
        witness = next((N for N, lam in zip(ann.radii, ann.lambda_star) if lam < 1.0), None)
        payload["annuli"] = {"inner": args.annulus_inner, "radii": list(ann.radii),
                             "lambda_star": list(ann.lambda_star)}
        verdict["near_infinity_witness"] = witness
        rows += [("annulus", N, lam, m) for N, lam, m in zip(ann.radii, ann.lambda_star, ann.methods)]
    if trends:
        cert = energy_decay_certificate(H, w, u0, psi, args.null_n)
        div = null_criticality_divergence(H, psi, w, args.divergence_radii)
        payload["energies"] = list(cert.energies)
        payload["null_sequence_n"] = list(cert.n)
        payload["partial_sums"] = list(div.partial_sums)
        payload["divergence_radii"] = list(div.radii)
        verdict["energy_decay"] = cert.passed
        verdict["null_criticality"] = div.verdict
        verdict["log_fit_slope"] = div.log_fit.params[0]
    payload["verdict"] = verdict
    config = {k: v for k, v in vars(args).items() if k != "out"}
    if args.format == "json":
        _write(args, render_json(payload, config))
    else:
        _write(args, render_csv(("region", "radius", "lambda_star", "method"), rows, config))
    return EXIT_OK


# --- green ----------------------------------------------------------------------

def cmd_green(args) -> int:
    if args.graph:
        family = "custom"
    else:
        family = args.family
    method = args.method or ("fourier" if family == "lattice" else "dirichlet")
    norm = args.normalization
    if norm == "auto":
        norm = "random-walk" if family == "lattice" else "laplacian"
    if family == "lattice" and args.dim < 3:
        raise UnsupportedFamily("Z^d has no positive minimal Green function for d < 3")
    if method == "fourier":
        if family != "lattice":
            raise UnsupportedFamily("the Fourier method is only available for lattices")
        points = [tuple(int(c) for c in p.split(",")) for p in (args.point or [",".join(["0"] * args.dim)])]
        rows = []
        for x in points:
            if len(x) != args.dim:
                raise InputError(f"point {x!r} is not in Z^{args.dim}")
            gl = green_fourier_lattice(args.dim, x, args.nodes)
            lg = 2 * args.dim * gl - math.fsum(
                green_fourier_lattice(args.dim, y, args.nodes) for y in _lattice_nbrs(x))
            delta = 1.0 if not any(x) else 0.0
            g = gl * (2 * args.dim if norm == "random-walk" else 1.0)
            rows.append((x, g, abs(lg - delta)))
        _emit(args, ("vertex", "G", "LG_residual"), rows, {"method": "fourier", "normalization": norm})
        return EXIT_OK
    if family == "halfline":
        graph = path_graph(args.radius + 1)
        pole = parse_vertex(args.pole) if args.pole is not None else 1
    elif family == "lattice":
        graph = lattice(args.dim)
        pole = parse_vertex(args.pole) if args.pole is not None else graph.root
    elif family == "tree":
        graph = regular_tree(args.degree)
        pole = graph.root
    else:
        graph = load_graph(args.graph)
        pole = parse_vertex(args.pole) if args.pole is not None else graph.root
    K = [parse_vertex(s) for s in args.dirichlet_at.split(",")] if args.dirichlet_at else []
    G = green_dirichlet(graph, pole, args.radius, LinearSolveSpec(tol=args.tol), K, "laplacian")
    H = SchrodingerOperator(graph)
    factor = graph.weighted_degree(pole) if norm == "random-walk" else 1.0
    rows = []
    Kset = set(K)
    region = list(G.values.support or ())
    table = {x: G(x) for x in region}
    val = lambda z: table.get(z, 0.0)  # noqa: E731
    for x in K:
        rows.append((x, 0.0, 0.0))
    for x in region:
        if x in Kset:
            continue
        res = abs(apply(H, val, x) - (1.0 if x == pole else 0.0))
        rows.append((x, factor * table[x], res))
    rows.sort(key=lambda r: (0, r[0]) if isinstance(r[0], int) else (1, r[0]))
    _emit(args, ("vertex", "G", "LG_residual"), rows,
          {"method": "dirichlet", "normalization": norm, "radius": args.radius,
           "iterations": G.convergence.get("iterations")})
    worst = max((r[2] for r in rows), default=0.0)
    return EXIT_OK if worst <= max(args.tol, 1e-8) else EXIT_DIAGNOSTIC


def _lattice_nbrs(x):
    for i in range(len(x)):
        for e in (-1, 1):
            y = list(x)
            y[i] += e
            yield tuple(y)


# --- coarea-check -----------------------------------------------------------------

def cmd_coarea(args) -> int:
    if args.graph or args.u_file:
        if not (args.graph and args.u_file):
            raise InputError("a custom coarea check needs both --graph and --u-file")
        graph = load_graph(args.graph)
        table = read_weight_csv(args.u_file, nonnegative=False)
        u = GraphFunction(lambda x: table[x], name="u-file")
        region = graph.vertices
    else:
        graph = halfline()
        if args.u == "identity":
            u = GraphFunction(lambda n: float(n), name="n")
        elif args.u.startswith("green:"):
            pole = int(args.u.split(":", 1)[1])
            u = GraphFunction(lambda n: float(min(n, pole)), name=f"min(n,{pole})")
        else:
            raise InputError(f"unknown halfline u {args.u!r}")
        region = tuple(range(1, args.radius + 1))
    flux = level_flux(graph, u, region)
    res = coarea_integral(graph, u, args.f, region)
    rows = list(flux.intervals())
    ok = res.residual <= max(args.tol, 1e-8)
    extra = {"coarea": {"f": args.f, "lhs": res.lhs, "rhs": res.rhs, "residual": res.residual},
             "g_bounds": list(flux.bounds())}
    _emit(args, ("interval_lo", "interval_hi", "g_value"), rows, extra)
    print(f"coarea f={args.f}: lhs={res.lhs!r} rhs={res.rhs!r} residual={res.residual:.3g}",
          file=sys.stderr)
    return EXIT_OK if ok else EXIT_DIAGNOSTIC


COMMANDS = {"hardy-weight": cmd_hardy_weight, "verify": cmd_verify, "sweep": cmd_sweep,
            "green": cmd_green, "coarea-check": cmd_coarea}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for k, v in GLOBAL_DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"graphhardy: input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"graphhardy: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GraphHardyError as exc:
        print(f"graphhardy: diagnostic failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTIC


if __name__ == "__main__":
    sys.exit(main())
