'''
Main Execution Module for the Support & Measure CLI

Entry point of Support & Measure, a desk-scale convex-geometry toolkit: surface area
measures, the Minkowski problem, measure majorization and the Urysohn family of
isoperimetric problems in dimensions 2 and 3. Every subcommand reads JSON files, writes
JSON results and optional figures, and can record a manifest of the run.

Subcommands:
------------
- solve-minkowski     --measure M            body with surface measure M
- blaschke-sum        --x A --y B [--a --b]  body with measure a*mu(A) + b*mu(B)
- urysohn             --spec P               Urysohn problem (free / internal / external)
- flatten             --spec P               flattening problem, optionally rotational
- pareto              --spec P               vector isoperimetric or Leidenfrost sweep
- check-majorization  --mu M --nu N          linear (measures) or affine (point masses) order
- verify              --spec V               optimality conditions, witnesses fitted if absent
- render              --body B               SVG (dim 2) / OBJ (dim 3)
- roundtrip           --body B | --measure M body -> measure -> body, or measure -> body -> measure

Shared flags: --grid, --tol, --max-iters, --seed, --out, --svg, --obj, --manifest.

Exit Codes:
-----------
- 0 success
- 2 invalid input (bad JSON, invalid measure, infeasible problem, unknown command or flag)
- 3 solver nonconvergence
- 4 a verification or majorization check came out false

Failures are appended to the error log (config.ERROR_LOG). A mistyped subcommand gets the
closest known name as a suggestion.

Dependencies:
-------------
- argparse
- fuzzywuzzy: command suggestions
- rich: console tables and messages
- cli_io, convex_core, measures, majorization, minkowski_solver, iso_problems, witness_fitting

Note:
-----
Run directly: python main.py <subcommand> [flags]. Tolerances and default grids can also be
set through a .env file (see config.py).
'''

import argparse
import sys
import numpy as np
from fuzzywuzzy import process
from rich.console import Console
from rich.table import Table
from config import TOL, DEFAULT_MAX_ITERS
from errors import InvalidArgumentError, InvalidStateError, NonconvergenceError
from convex_core import SupportVector, reconstruct, steiner_normalize, body_volume
from measures import surface_area_measure, blaschke_sum, measure_distance, integral_breadth
from majorization import (PointMeasure, linear_majorizes, affine_majorizes, reshetnyak_gap, choquet_gap,
                          sample_sublinear, sample_convex)
from minkowski_solver import SolveOptions, solve_minkowski
from iso_problems import (solve_scalarized, solve_flattening, solve_rotational_flattening, pareto_front_vector_iso,
                          pareto_audit, leidenfrost, stadium_fit, verify_external_urysohn, verify_flattening,
                          verify_current_hyperplane, verify_optimal_hulls)
from witness_fitting import fit_external_urysohn, fit_flattening, fit_current_hyperplane, fit_optimal_hulls
from cli_io import (load_json, save_json, is_measure, measure_from_dict, body_from_dict, body_to_dict,
                    read_problem, write_body, write_report, render_svg, render_obj, file_digest, log_error,
                    default_grid, RunManifest, console as err)

COMMANDS = ("solve-minkowski", "blaschke-sum", "urysohn", "flatten", "pareto", "check-majorization",
            "verify", "render", "roundtrip")
VIOLATION = 1e-9
HOLDS_MARK = {True: "[green]yes", False: "[red]no", None: "[yellow]?"}

console = Console()

class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InvalidArgumentError(message)

class Run:
    def __init__(self, args):
        self.args = args
        self.inputs = []
        self.manifest = RunManifest(args.command, "", {k: str(v) for k, v in sorted(vars(args).items())
                                                       if v is not None and k not in ("command", "manifest")})

    def read(self, path):
        self.inputs.append(path)
        return load_json(path)

    def output(self, path):
        self.manifest.outputs.append(path)
        return path

    def residual(self, name, value):
        self.manifest.residuals[name] = float(value)

# Shared helpers

def _opts(args):
    return SolveOptions(max_iters=args.max_iters or DEFAULT_MAX_ITERS,
                        tol_residual=args.tol or TOL.solver_residual)

def _grid_of(data, grid):
    # vertex bodies are sampled on the --grid resolution of their dimension
    if grid is None and "vertices" not in data:
        return None
    return default_grid(int(data["dim"]), grid)

def _body(run, path, grid=None):
    data = run.read(path)
    return body_from_dict(data, grid if grid is not None else _grid_of(data, run.args.grid))

def _emit_body(run, x: SupportVector):
    args = run.args
    if args.out:
        write_body(x, run.output(args.out))
    if args.svg:
        render_svg(x, run.output(args.svg))
    if args.obj:
        render_obj(x, run.output(args.obj))

def _summary(title, rows):
    table = Table(title=title)
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    for name, value in rows:
        table.add_row(name, f"{value:.6g}" if isinstance(value, float) else str(value))
    console.print(table)

# Subcommands

def cmd_solve_minkowski(run):
    args = run.args
    m = measure_from_dict(run.read(args.measure))
    outcome = solve_minkowski(m, grid=default_grid(2, args.grid) if m.dim == 2 else None, opts=_opts(args))
    run.residual("residual", outcome.residual)
    if not outcome.converged:
        raise NonconvergenceError(f"Minkowski solver stopped at residual {outcome.residual:.3g}.",
                                  residual=outcome.residual, best=outcome.body)
    _emit_body(run, outcome.body)
    _summary("Minkowski problem", [("atoms", len(m)), ("residual", outcome.residual),
                                   ("iterations", outcome.iterations)])
    return 0

def _body_or_measure(run, path):
    data = run.read(path)
    if is_measure(data):
        return measure_from_dict(data)
    return body_from_dict(data, _grid_of(data, run.args.grid))

def cmd_blaschke_sum(run):
    args = run.args
    x, y = _body_or_measure(run, args.x), _body_or_measure(run, args.y)
    body = blaschke_sum(x, y, args.a, args.b, opts=_opts(args))
    _emit_body(run, body)
    _summary("Blaschke sum", [("volume", body_volume(body)), ("breadth", integral_breadth(body))])
    return 0

def cmd_urysohn(run):
    args = run.args
    run.inputs.append(args.spec)
    name, spec = read_problem(args.spec, args.grid)
    if name != "urysohn":
        raise InvalidArgumentError(f"Expected an urysohn problem, got '{name}'.")
    outcome = solve_scalarized(spec, max_iters=args.max_iters)
    run.residual("kkt_residual", outcome.kkt_residual)
    run.residual("volume", outcome.volume)
    run.residual("breadth", outcome.breadth)
    _emit_body(run, outcome.body)
    _summary(f"{spec.kind} Urysohn problem", [("volume", outcome.volume), ("breadth", outcome.breadth),
                                              ("KKT residual", outcome.kkt_residual),
                                              ("converged", outcome.converged)])
    return 0 if outcome.converged else 3

def cmd_flatten(run):
    args = run.args
    run.inputs.append(args.spec)
    name, parsed = read_problem(args.spec, args.grid)
    if name != "flattening":
        raise InvalidArgumentError(f"Expected a flattening problem, got '{name}'.")
    spec = parsed["spec"]
    lifted = None
    if parsed["rotational"]:
        point, lifted = solve_rotational_flattening(spec, max_iters=args.max_iters)
    else:
        point = solve_flattening(spec, args.max_iters)
    run.residual("kkt_residual", point.details["kkt_residual"])
    run.residual("volume", -point.objectives[0])
    run.residual("flat_breadth", point.objectives[1])
    if args.out:
        write_body(point.body, run.output(args.out))
    if args.svg:
        render_svg(point.body, run.output(args.svg))
    if args.obj and lifted is not None:
        render_obj(lifted, run.output(args.obj))
    rows = [("volume", float(-point.objectives[0])), ("flat breadth", float(point.objectives[1])),
            ("KKT residual", point.details["kkt_residual"]), ("converged", point.details["converged"])]
    if lifted is not None:
        rows.append(("lifted volume", body_volume(lifted)))
    _summary("Flattening problem", rows)
    return 0 if point.details["converged"] else 3

def cmd_pareto(run):
    args = run.args
    run.inputs.append(args.spec)
    name, parsed = read_problem(args.spec, args.grid)
    if name == "vector_iso":
        points = pareto_front_vector_iso(parsed["ys"], parsed["target_volume"], parsed["weights"])
        entries = [dict(p.to_dict(), body=body_to_dict(p.body)) for p in points]
        payload = {"problem": name, "points": entries, "dominated_pairs": [list(d) for d in pareto_audit(points)]}
        run.residual("max_fit_residual", max(p.details["fit_residual"] for p in points))
        run.residual("max_minkowski_gap", max(abs(p.details["minkowski_gap"]) for p in points))
    elif name == "leidenfrost":
        entries = []
        for weights in parsed["weights"]:
            stadium, spheroid = leidenfrost(parsed["area"], weights, parsed["grid2"])
            fit = stadium_fit(stadium)
            entries.append({"weights": [float(w) for w in weights], "radius": fit.radius,
                            "half_length": fit.half_length, "fit_residual": fit.residual,
                            "spheroid_volume": body_volume(spheroid), "body": body_to_dict(stadium)})
        payload = {"problem": name, "points": entries}
        run.residual("max_fit_residual", max(e["fit_residual"] for e in entries))
    else:
        raise InvalidArgumentError(f"pareto expects vector_iso or leidenfrost, got '{name}'.")
    if args.out:
        save_json(run.output(args.out), payload)
    _summary(f"Pareto sweep ({name})", [("points", len(entries)),
                                         ("max fit residual", run.manifest.residuals["max_fit_residual"])])
    return 0

def _masses(data):
    if isinstance(data, dict) and "points" in data:
        return PointMeasure(data["points"], data["weights"])
    return measure_from_dict(data)

def cmd_check_majorization(run):
    args = run.args
    mu, nu = _masses(run.read(args.mu)), _masses(run.read(args.nu))
    affine = isinstance(mu, PointMeasure)
    if affine != isinstance(nu, PointMeasure):
        raise InvalidArgumentError("Both sides must be spherical measures or both point measures.")
    tol = args.tol or TOL.lp
    ok, witness = (affine_majorizes if affine else linear_majorizes)(mu, nu, tol)
    report = {"order": "affine" if affine else "linear", "majorizes": bool(ok)}
    if ok and witness is not None:
        report["witness"] = witness.to_dict()
        report["witness_checks"] = bool(witness.check(mu, nu, max(tol, 1e-8)))
    if not ok:
        report["lp_infeasible"] = True
        dim = mu.dim
        for t in range(args.samples):
            if affine:
                f = sample_convex(dim, 4, args.seed + t)
                gap = choquet_gap(mu, nu, f)
                found = {"slopes": f.slopes.tolist(), "intercepts": f.intercepts.tolist(), "quadratic": f.quadratic}
            else:
                p = sample_sublinear(dim, 4, args.seed + t)
                gap = reshetnyak_gap(mu, nu, p)
                found = {"generators": p.generators.tolist()}
            if gap < -VIOLATION:
                report["violation"] = dict(found, gap=float(gap), sample=t)
                break
    if args.out:
        save_json(run.output(args.out), report)
    _summary("Majorization", [("order", report["order"]), ("majorizes", report["majorizes"]),
                              ("violating functional", "violation" in report)])
    return 0 if ok else 4

def _verify_report(run, data):
    if not isinstance(data, dict):
        raise InvalidArgumentError("Verification input must be a JSON object.")
    condition = data.get("condition")
    if condition == "optimal_hulls":
        xbars = [body_from_dict(d, _grid_of(d, run.args.grid)) for d in data["xbars"]]
        grid = xbars[0].grid
        ys = [body_from_dict(d, grid) for d in data["ys"]]
        if "alphas" in data:
            alphas = data["alphas"]
            mus = [measure_from_dict(m) for m in data["mus"]]
            nus = [measure_from_dict(m) for m in data["nus"]]
        else:
            alphas, mus, nus = fit_optimal_hulls(xbars, ys)
        return verify_optimal_hulls(xbars, ys, alphas, mus, nus, run.args.tol)
    if "xbar" not in data or "x0" not in data:
        raise InvalidArgumentError("Verification input needs 'xbar' and 'x0'.")
    xbar = body_from_dict(data["xbar"], _grid_of(data["xbar"], run.args.grid))
    x0 = body_from_dict(data["x0"], xbar.grid)
    tol = run.args.tol
    if condition == "external_urysohn":
        if "alpha" in data:
            mu, alpha = measure_from_dict(data["mu"]) if data.get("mu") else None, float(data["alpha"])
        else:
            mu, alpha = fit_external_urysohn(xbar, x0)
        return verify_external_urysohn(xbar, x0, mu, alpha, tol)
    if condition == "flattening":
        kind = data.get("kind", "internal")
        if "alpha" in data:
            alpha, beta = float(data["alpha"]), float(data.get("beta", 0.0))
            witness = measure_from_dict(data["x"]) if data.get("x") else None
        else:
            fit = fit_flattening(kind, xbar, x0, data["zbar"])
            alpha, beta, witness = fit.alpha, fit.beta, fit.x_measure
        return verify_flattening(kind, xbar, x0, data["zbar"], alpha, beta, witness, tol,
                                 data.get("coefficient", "pairing"))
    if condition == "current_hyperplane":
        ybar = body_from_dict(data["ybar"], xbar.grid)
        if "alpha" in data:
            alpha, beta = float(data["alpha"]), float(data.get("beta", 0.0))
            xw = measure_from_dict(data["x"]) if data.get("x") else None
            yw = measure_from_dict(data["y"]) if data.get("y") else None
        else:
            fit = fit_current_hyperplane(xbar, ybar, x0, data["z0"])
            alpha, beta, xw, yw = fit.alpha, fit.beta, fit.x_measure, fit.y_measure
        return verify_current_hyperplane(xbar, ybar, x0, data["z0"], xw, yw, alpha, beta, tol)
    raise InvalidArgumentError(f"Unknown condition '{condition}'.")

def cmd_verify(run):
    args = run.args
    report = _verify_report(run, run.read(args.spec))
    for c in report.conditions:
        run.residual(c.name, c.residual)
    if args.out:
        write_report(report, run.output(args.out))
    table = Table(title="Optimality conditions")
    table.add_column("Condition", style="cyan")
    table.add_column("Residual", justify="right")
    table.add_column("Holds")
    for c in report.conditions:
        table.add_row(c.name, f"{c.residual:.3g}", HOLDS_MARK[c.holds])
    console.print(table)
    if report.verdict is None:
        console.print("[yellow]Some conditions could not be decided; see the report for the method used.")
    return 0 if report.verdict is True else 4

def cmd_render(run):
    args = run.args
    if not (args.svg or args.obj or args.out):
        raise InvalidArgumentError("render needs --svg, --obj or --out.")
    _emit_body(run, _body(run, args.body))
    return 0

def cmd_roundtrip(run):
    args = run.args
    tol = args.tol or 1e-6
    if bool(args.body) == bool(args.measure):
        raise InvalidArgumentError("roundtrip takes exactly one of --body and --measure.")
    if args.body:
        x = _body(run, args.body)
        outcome = solve_minkowski(surface_area_measure(x), grid=x.grid, opts=_opts(args))
        y = outcome.body
        if not y.grid.matches(x.grid):
            y = SupportVector.from_polytope(reconstruct(y), x.grid)
        distance = float(np.max(np.abs(steiner_normalize(x).h - steiner_normalize(y).h)))
        error = distance / max(integral_breadth(x), 1e-300)
        _emit_body(run, steiner_normalize(y))
    else:
        m = measure_from_dict(run.read(args.measure))
        outcome = solve_minkowski(m, grid=default_grid(2, args.grid) if m.dim == 2 else None, opts=_opts(args))
        error = measure_distance(m, surface_area_measure(reconstruct(outcome.body)), 1e-7)
        _emit_body(run, outcome.body)
    run.residual("roundtrip_error", error)
    _summary("Round trip", [("relative error", error), ("tolerance", tol)])
    return 0 if error <= tol else 4

HANDLERS = {"solve-minkowski": cmd_solve_minkowski, "blaschke-sum": cmd_blaschke_sum, "urysohn": cmd_urysohn,
            "flatten": cmd_flatten, "pareto": cmd_pareto, "check-majorization": cmd_check_majorization,
            "verify": cmd_verify, "render": cmd_render, "roundtrip": cmd_roundtrip}

# Parser and dispatch

def build_parser() -> Parser:
    shared = Parser(add_help=False)
    shared.add_argument("--grid", type=int, help="dim 2 directions / dim 3 icosphere level")
    shared.add_argument("--tol", type=float, help="tolerance override for this run")
    shared.add_argument("--max-iters", type=int, dest="max_iters")
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--out")
    shared.add_argument("--svg")
    shared.add_argument("--obj")
    shared.add_argument("--manifest")

    parser = Parser(prog="main.py", description="Support & Measure: convex bodies, measures and isoperimetry.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve-minkowski", parents=[shared]).add_argument("--measure", required=True)
    blaschke = sub.add_parser("blaschke-sum", parents=[shared])
    blaschke.add_argument("--x", required=True)
    blaschke.add_argument("--y", required=True)
    blaschke.add_argument("--a", type=float, default=1.0)
    blaschke.add_argument("--b", type=float, default=1.0)
    for name in ("urysohn", "flatten", "pareto", "verify"):
        sub.add_parser(name, parents=[shared]).add_argument("--spec", required=True)
    check = sub.add_parser("check-majorization", parents=[shared])
    check.add_argument("--mu", required=True)
    check.add_argument("--nu", required=True)
    check.add_argument("--samples", type=int, default=1000)
    sub.add_parser("render", parents=[shared]).add_argument("--body", required=True)
    roundtrip = sub.add_parser("roundtrip", parents=[shared])
    roundtrip.add_argument("--body")
    roundtrip.add_argument("--measure")
    return parser

def cli(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if argv and not argv[0].startswith("-") and argv[0] not in COMMANDS:
        guess, _ = process.extractOne(argv[0], COMMANDS)
        err.print(f"[bold red]Unknown command '{argv[0]}'.[/bold red] Did you mean [bold cyan]{guess}[/bold cyan]?")
        parser.print_usage(sys.stderr)
        log_error(argv[0], "unknown command")
        return 2
    try:
        args = parser.parse_args(argv)
    except InvalidArgumentError as e:
        err.print(f"[bold red]{e}")
        log_error(" ".join(argv[:1]) or "cli", e)
        return 2
    except SystemExit as e:
        return int(e.code or 0)

    run = Run(args)
    try:
        code = HANDLERS[args.command](run)
    except NonconvergenceError as e:
        err.print(f"[bold red]Solver did not converge:[/bold red] {e}")
        log_error(args.command, e)
        return 3
    except (ValueError, KeyError, TypeError, InvalidStateError) as e:
        err.print(f"[bold red]Invalid input:[/bold red] {e}")
        log_error(args.command, e)
        return 2
    if args.manifest:
        run.manifest.input_digest = file_digest(run.inputs)
        run.manifest.write(args.manifest)
    return code

def main():
    sys.exit(cli())

if __name__ == "__main__":
    main()
