"""Batch front-end: ingest measures and configs, dispatch operations, emit
canonical JSON reports and CSV profiles (with optional figures).

Exit codes: 0 success, 2 regime/validation error (including malformed
JSON, with a pointer to the offending field), 3 divergence sentinel or
non-convergence.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import capacity as cap
from . import oracles, plots, report, verifiers
from .dyadic import DyadicCube
from .measures import measure_from_json
from .params import RegimeError, hessian_params, make_params
from .potentials import (GenerationWindow, dyadic_riesz, dyadic_wolff,
                         dyadic_wolff_shifted, riesz_truncated,
                         wolff_truncated_info)
from .solver import GridFunction, picard_solve
from .verifiers import CellGrid


class CliError(Exception):
    pass


def parse_params(text):
    fields = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise CliError(f"--params: expected key=value, got {part!r}")
        key, val = part.split("=", 1)
        fields[key.strip()] = float(val)
    try:
        if "k" in fields:
            return hessian_params(fields["n"], fields["k"], fields["q"])
        return make_params(fields["n"], fields.get("alpha", 1.0),
                           fields["p"], fields["q"])
    except KeyError as e:
        raise CliError(f"--params: missing field {e.args[0]!r}")


def parse_point(text):
    return tuple(float(v) for v in text.split(","))


def parse_points(text):
    return [parse_point(chunk) for chunk in text.split(";") if chunk.strip()]


def parse_window(text):
    lo, hi = text.split(":")
    return GenerationWindow(int(lo), int(hi))


def parse_cube(text):
    gen, idx = text.split(":")
    return DyadicCube(int(gen), tuple(int(v) for v in idx.split(",")))


def parse_balls(text):
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        center, radius = chunk.rsplit(":", 1)
        out.append((parse_point(center), float(radius)))
    return out


def parse_r(text):
    return math.inf if text.strip().lower() in ("inf", "infinity") else float(text)


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise CliError(f"file not found: {path}")
    except json.JSONDecodeError as e:
        raise CliError(f"malformed JSON in {path}: line {e.lineno} col {e.colno}")


def load_measure(path):
    try:
        return measure_from_json(load_json(path))
    except ValueError as e:
        raise CliError(f"{path}: {e}")


def load_grid_function(path):
    obj = load_json(path)
    try:
        box = DyadicCube(int(obj["box"]["generation"]),
                         tuple(int(i) for i in obj["box"]["index"]))
        return GridFunction(box, int(obj["generation"]), obj["values"])
    except (KeyError, TypeError) as e:
        raise CliError(f"{path}: malformed grid function ({e})")


def _resolved(args, params, extra):
    cfg = {"params": {"n": params.n, "alpha": params.alpha, "p": params.p,
                      "q": params.q, "kind": params.kind,
                      "local_only": params.local_only}}
    cfg.update(extra)
    return cfg


def cmd_potential(args):
    params = parse_params(args.params)
    mu = load_measure(args.measure)
    center = np.asarray(parse_point(args.center), dtype=float)
    direction = np.zeros(mu.n)
    direction[0] = 1.0
    radii = np.geomspace(args.t_min, args.t_max, args.count)
    r = parse_r(args.r)
    rows = []
    diverged = False
    for t in radii:
        x = center + t * direction
        if args.kind == "wolff":
            val, _ = wolff_truncated_info(mu, x, params, r)
        elif args.kind == "riesz":
            order = args.order if args.order else params.alpha * params.p
            val = riesz_truncated(mu, x, order, r)
        elif args.kind == "dyadic-wolff":
            val = dyadic_wolff(mu, x, params, parse_window(args.window))
        elif args.kind == "dyadic-riesz":
            order = args.order if args.order else params.alpha * params.p
            val = dyadic_riesz(mu, x, order, parse_window(args.window))
        else:  # dyadic-wolff-shifted
            val = dyadic_wolff_shifted(mu, x, params, parse_window(args.window),
                                       parse_point(args.shift))
        diverged = diverged or math.isinf(val)
        rows.append((float(t), float(val)))
    out = Path(args.out)
    report.write_csv(out, rows)
    if args.plot:
        plots.plot_profile(out.with_suffix(".png"),
                           [r0 for r0, _ in rows], [v for _, v in rows],
                           f"{args.kind} potential profile")
    return 3 if diverged else 0


def cmd_solve(args):
    params = parse_params(args.params)
    f = load_grid_function(args.f)
    window = parse_window(args.window)
    u, cert = picard_solve(f, params, window, C=args.C, tol=args.tol,
                           max_iter=args.max_iter, eps_override=args.eps)
    payload = {"u": u.to_json(), "certificate": cert.to_json(),
               "config": _resolved(args, params,
                                   {"window": [window.g_min, window.g_max],
                                    "tol": args.tol,
                                    "max_iter": args.max_iter})}
    out = Path(args.out)
    report.write_json(out, payload)
    if args.plot:
        plots.plot_grid_function(out.with_suffix(".png"), u,
                                 f"solution ({cert.status})")
    return 0 if cert.converged else 3


def _emit_report(args, params, rep, extra, plot_title):
    payload = rep.to_json()
    payload["config"].update(_resolved(args, params, extra))
    out = Path(args.out)
    report.write_json(out, payload)
    if args.plot:
        plots.plot_report_values(out.with_suffix(".png"), rep.values,
                                 rep.best_constant, plot_title)
    return 3 if math.isinf(rep.best_constant) else 0


def cmd_verify(args):
    params = parse_params(args.params)
    if args.check == "pointwise":
        mu = load_measure(args.measure)
        grid = CellGrid(parse_cube(args.nu_box), args.nu_generation)
        rep = verifiers.pointwise_condition(
            mu, parse_points(args.xs), params, parse_r(args.r), nu_grid=grid,
            threshold=args.threshold)
        return _emit_report(args, params, rep, {"check": "pointwise"},
                            "iterated pointwise condition")
    if args.check == "testing-dyadic":
        mu = load_measure(args.measure)
        cubes = [parse_cube(c) for c in args.cubes.split(";") if c.strip()]
        riesz_rep, wolff_rep = verifiers.testing_inequality_dyadic(
            mu, cubes, params, window_depth=args.depth)
        payload = {"riesz_form": riesz_rep.to_json(),
                   "wolff_form": wolff_rep.to_json(),
                   "config": _resolved(args, params,
                                       {"check": "testing-dyadic"})}
        out = Path(args.out)
        report.write_json(out, payload)
        if args.plot:
            plots.plot_report_values(out.with_suffix(".png"), riesz_rep.values,
                                     riesz_rep.best_constant,
                                     "dyadic testing inequality")
        bad = math.isinf(riesz_rep.best_constant) \
            or math.isinf(wolff_rep.best_constant)
        return 3 if bad else 0
    if args.check == "testing-balls":
        mu = load_measure(args.measure)
        rep = verifiers.testing_inequality_balls(
            mu, parse_balls(args.balls), params, parse_r(args.r),
            threshold=args.threshold)
        return _emit_report(args, params, rep, {"check": "testing-balls"},
                            "ball testing inequality")
    if args.check == "frostman":
        mu = load_measure(args.measure)
        rep = verifiers.frostman_ratio(
            mu, parse_points(args.xs), (args.t_min, args.t_max), params,
            threshold=args.threshold)
        return _emit_report(args, params, rep, {"check": "frostman"},
                            "mass growth ratio")
    if args.check == "fefferman-phong":
        mu = load_measure(args.measure)
        rep = verifiers.fefferman_phong(mu, args.delta,
                                        parse_balls(args.balls), params,
                                        threshold=args.threshold)
        return _emit_report(args, params, rep, {"check": "fefferman-phong"},
                            "density growth ratio")
    if args.check == "local-integral":
        u = load_grid_function(args.u)
        rep = verifiers.local_integral_estimate(
            u, parse_balls(args.balls), params,
            log_outer_R=args.log_outer_R, threshold=args.threshold)
        return _emit_report(args, params, rep, {"check": "local-integral"},
                            "local integral ratio")
    if args.check == "carleson":
        mu = load_measure(args.measure)
        cube = parse_cube(args.cube)
        f_choices = [GridFunction(cube, cube.generation - 1,
                                  np.eye(2 ** cube.n)[j].reshape((2,) * cube.n))
                     for j in range(2 ** cube.n)]
        rep = verifiers.carleson_embedding_check(
            mu, cube, f_choices, params, window_depth=args.depth,
            threshold=args.threshold)
        return _emit_report(args, params, rep, {"check": "carleson"},
                            "Carleson embedding")
    raise CliError(f"unknown verify check {args.check!r}")


def cmd_oracle(args):
    if args.what == "plap":
        params = make_params(args.n, 1.0, args.p, args.q)
        c, expo = oracles.radial_plap_solution(params)
        payload = {"c": c, "exponent": expo,
                   "config": {"n": args.n, "p": args.p, "q": args.q}}
    elif args.what == "hessian":
        c, expo = oracles.radial_hessian_solution(args.n, int(args.k), args.q)
        payload = {"c_prime": c, "exponent": expo,
                   "config": {"n": args.n, "k": int(args.k), "q": args.q}}
    elif args.what == "dirac":
        params = parse_params(args.params)
        val = oracles.wolff_dirac_closed_form(params, args.distance,
                                              parse_r(args.r))
        payload = {"value": val,
                   "config": {"distance": args.distance, "r": args.r}}
    elif args.what in ("residual-plap", "residual-hessian"):
        mesh = oracles.log_mesh(args.r_lo, args.r_hi, args.count)
        if args.what == "residual-plap":
            params = make_params(args.n, 1.0, args.p, args.q)
            c, expo = oracles.radial_plap_solution(params)
            res = oracles.plap_radial_residual(c * mesh ** expo, params, mesh)
        else:
            c, expo = oracles.radial_hessian_solution(args.n, int(args.k),
                                                      args.q)
            res = oracles.hessian_radial_residual(c * mesh ** expo, args.n,
                                                  int(args.k), args.q, mesh)
        payload = {"c": c, "exponent": expo, "sup_residual": res,
                   "config": {"mesh": [args.r_lo, args.r_hi, args.count]}}
    else:
        raise CliError(f"unknown oracle {args.what!r}")
    out = Path(args.out)
    report.write_json(out, payload)
    if args.plot and args.what in ("plap", "hessian"):
        key = "c" if "c" in payload else "c_prime"
        radii = np.geomspace(0.25, 4.0, 128)
        plots.plot_profile(out.with_suffix(".png"), radii,
                           payload[key] * radii ** payload["exponent"],
                           "radial singular solution", ylabel="u")
    return 0


def cmd_capacity(args):
    params = parse_params(args.params)
    if args.what == "lower":
        trial = load_measure(args.trial)
        cube = parse_cube(args.E)
        bound, info = cap.riesz_capacity_lower(cube, trial, params, args.R)
        payload = {"lower_bound": bound, "info": info,
                   "config": _resolved(args, params, {"R": args.R})}
        report.write_json(Path(args.out), payload)
        return 0
    if args.what == "scaling":
        lambdas = [float(v) for v in args.lambdas.split(",")]
        rep = cap.capacity_scaling_check(params, lambdas, depth=args.depth,
                                         threshold=args.threshold)
        payload = rep.to_json()
        payload["config"].update(_resolved(args, params, {}))
        out = Path(args.out)
        report.write_json(out, payload)
        if args.plot:
            plots.plot_scaling_fit(out.with_suffix(".png"),
                                   rep.witness["lambdas"],
                                   rep.witness["bounds"],
                                   rep.best_constant, "capacity scaling")
        return 0
    if args.what == "bessel-energy":
        mu = load_measure(args.measure)
        grid = CellGrid(parse_cube(args.grid_box), args.grid_generation)
        val = cap.bessel_energy(mu, params, args.R, grid)
        payload = {"energy": val,
                   "config": _resolved(args, params, {"R": args.R})}
        report.write_json(Path(args.out), payload)
        return 3 if math.isinf(val) else 0
    raise CliError(f"unknown capacity op {args.what!r}")


def build_parser():
    ap = argparse.ArgumentParser(prog="wolffkit",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("potential", help="evaluate a potential on a radial grid")
    p.add_argument("--measure", required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--kind", default="wolff",
                   choices=["wolff", "riesz", "dyadic-wolff", "dyadic-riesz",
                            "dyadic-wolff-shifted"])
    p.add_argument("--r", default="inf")
    p.add_argument("--order", type=float, default=None)
    p.add_argument("--window", default="-8:4")
    p.add_argument("--shift", default="0,0,0")
    p.add_argument("--center", default="0,0,0")
    p.add_argument("--t-min", type=float, default=0.0625, dest="t_min")
    p.add_argument("--t-max", type=float, default=4.0, dest="t_max")
    p.add_argument("--count", type=int, default=64)
    p.add_argument("--out", default="profile.csv")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(fn=cmd_potential)

    p = sub.add_parser("solve", help="Picard-solve u = N u + eps f")
    p.add_argument("--f", required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--window", required=True)
    p.add_argument("--C", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=2000, dest="max_iter")
    p.add_argument("--out", default="solution.json")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("verify", help="run an inequality verifier")
    p.add_argument("check", choices=["pointwise", "testing-dyadic",
                                     "testing-balls", "frostman",
                                     "fefferman-phong", "local-integral",
                                     "carleson"])
    p.add_argument("--measure")
    p.add_argument("--u")
    p.add_argument("--params", required=True)
    p.add_argument("--r", default="inf")
    p.add_argument("--xs", default="")
    p.add_argument("--balls", default="")
    p.add_argument("--cubes", default="")
    p.add_argument("--cube", default="")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--t-min", type=float, default=0.001, dest="t_min")
    p.add_argument("--t-max", type=float, default=1.0, dest="t_max")
    p.add_argument("--nu-box", default="3:0,0,0", dest="nu_box")
    p.add_argument("--nu-generation", type=int, default=-2,
                   dest="nu_generation")
    p.add_argument("--log-outer-R", type=float, default=None,
                   dest="log_outer_R")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--out", default="report.json")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("oracle", help="closed-form solutions and residuals")
    p.add_argument("what", choices=["plap", "hessian", "dirac",
                                    "residual-plap", "residual-hessian"])
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q", type=float, default=5.0)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--params", default="n=3,p=2,q=5")
    p.add_argument("--distance", type=float, default=0.5)
    p.add_argument("--r", default="inf")
    p.add_argument("--r-lo", type=float, default=0.5, dest="r_lo")
    p.add_argument("--r-hi", type=float, default=2.0, dest="r_hi")
    p.add_argument("--count", type=int, default=400)
    p.add_argument("--out", default="oracle.json")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("capacity", help="capacity estimators")
    p.add_argument("what", choices=["lower", "scaling", "bessel-energy"])
    p.add_argument("--params", required=True)
    p.add_argument("--trial")
    p.add_argument("--measure")
    p.add_argument("--E", default="0:0,0,0")
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--lambdas", default="1,2,4")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--grid-box", default="1:0,0,0", dest="grid_box")
    p.add_argument("--grid-generation", type=int, default=-3,
                   dest="grid_generation")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--out", default="capacity.json")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(fn=cmd_capacity)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, RegimeError, ValueError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
