"""Command-line front end binding the modules into reproducible experiments.

Every output file embeds the code version and the full resolved
configuration; identical invocations produce byte-identical files.  Exit
codes: 0 success, 1 numerical failure (surfaced with context), 2 usage
error.  Sweep subcommands fan out their cells over a thread pool capped by
the HIERARG_THREADS environment variable (default: serial).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import discrete as dr
from . import equilibria as eq
from . import flow as fl
from . import grid as fg
from . import stability as st
from ._expr import compile_expression
from .errors import HierargError


def _fmt(x) -> str:
    return f"{x:.17g}"


def _config_header(args: argparse.Namespace) -> list[str]:
    cfg = {k: v for k, v in sorted(vars(args).items())
           if k != "func" and v is not None}
    return [f"hierarg {__version__}",
            "config: " + json.dumps(cfg, sort_keys=True, default=str)]


def _write_csv(path: str, header: list[str], columns: list[str], rows) -> None:
    with open(path, "w") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def _write_json(path: str, args: argparse.Namespace, payload: dict) -> None:
    cfg = {k: v for k, v in sorted(vars(args).items())
           if k != "func" and v is not None}
    doc = {"version": __version__, "config": cfg}
    doc.update(payload)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _write_plot_data(path: str, pairs) -> None:
    with open(path, "w") as fh:
        for a, b in pairs:
            fh.write(f"{_fmt(float(a))} {_fmt(float(b))}\n")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HIERARG_THREADS", "1")))
    except ValueError:
        return 1


def _map_cells(fn, cells):
    n = _threads()
    if n == 1:
        return [fn(c) for c in cells]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, cells))


def _positive(name):
    def check(text):
        val = float(text)
        if not val > 0.0:
            raise argparse.ArgumentTypeError(f"{name} must be positive")
        return val
    return check


def _power_of_two(text):
    val = int(text)
    if val < 2 or val & (val - 1):
        raise argparse.ArgumentTypeError("grid size must be a power of two")
    return val


# -- subcommands ----------------------------------------------------------------


def _cmd_flow(args) -> int:
    n = args.grid
    x = fg.grid_points(n)
    profile = compile_expression(args.init)
    v0 = fg.transform(profile(x), fg.Parity.ODD)
    traj = fl.evolve(v0, args.alpha, args.t_end, dt=args.dt, stride=args.stride)
    traj.write_csv(args.out, header_lines=_config_header(args))
    summary = traj.summary()
    final = traj.final.v
    resid_psi1 = None
    try:
        orbit = eq.reconstruct_orbit(args.alpha, 1, "+")
        dist = fg.norm(final - orbit.psi.resample(n), fg.NormKind.H1)
        resid_psi1 = dist
        if traj.converged and dist < 1e-4:
            summary["attractor"] = "psi_1_plus"
        elif traj.converged and fg.norm(final) < 1e-6:
            summary["attractor"] = "zero"
    except HierargError:
        if traj.converged and fg.norm(final) < 1e-6:
            summary["attractor"] = "zero"
    summary["h1_distance_to_psi_1_plus"] = resid_psi1
    summary["monitors_ok"] = all(m.slope_ok and m.strip_ok for m in traj.monitors)
    _write_json(args.summary, args, summary)
    if args.plot_data:
        _write_plot_data(args.plot_data, zip(final.x, final.values))
    return 0


def _cmd_equilibrium(args) -> int:
    orbit = eq.reconstruct_orbit(args.alpha, args.j, args.sign, n_grid=args.grid)
    rows = zip(orbit.psi.x, orbit.psi.values, orbit.psi_prime.values)
    _write_csv(args.out, _config_header(args), ["x", "psi", "psi_prime"], rows)
    _write_json(args.report, args, {
        "alpha": orbit.alpha, "j": orbit.j, "sign": orbit.sign,
        "w_hat": orbit.w0, "energy": orbit.energy, "period": orbit.period,
        "h2_residual": orbit.h2_residual,
        "energy_drift": orbit.energy_drift,
        "closure_error": orbit.closure_error,
        "stationary_residual": orbit.stationary_residual,
    })
    if args.plot_data:
        _write_plot_data(args.plot_data, zip(orbit.psi.x, orbit.psi.values))
    return 0


def _cmd_bifurcation(args) -> int:
    alphas = np.linspace(args.alpha_min, args.alpha_max, args.steps)
    threshold = 2.0 / args.j ** 2

    def cell(alpha):
        if alpha >= threshold:
            return None
        E = eq.branch_energy(alpha, args.j)
        qm, _ = eq.turning_points(E)
        what = -math.expm1(qm) / alpha
        gap = math.exp(qm) / alpha
        return (alpha, E, what, gap)

    cells = _map_cells(cell, alphas)
    rows = []
    fig2 = []
    for out in cells:
        if out is None:
            continue
        alpha, E, what, gap = out
        rows.append((float(alpha), args.j, what, 2.0 * math.pi / args.j, E))
        fig2.append((float(alpha), what, 1.0 / alpha, gap))
    _write_csv(args.out, _config_header(args),
               ["alpha", "j", "w_hat", "period", "energy"], rows)
    if args.figure2:
        _write_csv(args.figure2, _config_header(args),
                   ["alpha", "w_hat_1", "inverse_alpha", "difference"], fig2)
    if args.plot_data:
        _write_plot_data(args.plot_data, [(r[0], r[2]) for r in rows])
    return 0


def _parse_branch(text: str) -> tuple[int, str] | None:
    if text == "trivial":
        return None
    sign = "+"
    if text.endswith(("+", "-")):
        sign = text[-1]
        text = text[:-1]
    return int(text), sign


def _cmd_spectrum(args) -> int:
    branch = _parse_branch(args.branch)
    if branch is None:
        orbit = None
        branch_doc = {"j": 0, "sign": "0"}
    else:
        orbit = eq.reconstruct_orbit(args.alpha, branch[0], branch[1])
        branch_doc = {"j": branch[0], "sign": branch[1]}
    matrix = st.assemble_L(orbit, args.alpha, args.grid)
    report = st.smallest_eigenvalues(matrix, args.k)
    _write_json(args.out, args, {
        "alpha": args.alpha, "branch": branch_doc,
        "eigenvalues": list(report.richardson),
        "eigenvalues_coarse": list(report.eigenvalues),
        "negative_count": report.negative_count,
        "grid_sizes": list(report.grid_sizes),
    })
    if args.plot_data:
        _write_plot_data(args.plot_data, enumerate(report.richardson, start=1))
    return 0


def _cmd_criterium(args) -> int:
    branch = _parse_branch(args.branch)
    orbit = None if branch is None else eq.reconstruct_orbit(args.alpha, *branch)
    result = st.criterium_phi(orbit, args.alpha)
    _write_csv(args.out, _config_header(args), ["x", "phi"],
               zip(result.x, result.phi))
    _write_json(args.report, args, {
        "alpha": args.alpha,
        "branch": {"j": 0 if branch is None else branch[0],
                   "sign": "0" if branch is None else branch[1]},
        "verdict": result.verdict,
        "first_zero": result.first_zero,
    })
    if args.plot_data:
        _write_plot_data(args.plot_data, zip(result.x, result.phi))
    return 0


def _cmd_liapunov(args) -> int:
    x = fg.grid_points(args.grid)
    v0 = fg.transform(compile_expression(args.init)(x), fg.Parity.ODD)
    traj = fl.evolve(v0, args.alpha, args.t_end, dt=args.dt, stride=args.stride)
    rows = []
    values = []
    for state in traj.states:
        V = st.liapunov_V(state.v, args.alpha)
        Vdot = st.liapunov_V_dot(state)
        values.append(V)
        rows.append((state.t, V, Vdot))
    _write_csv(args.out, _config_header(args), ["t", "V", "V_dot"], rows)
    increases = np.diff(values)
    monotone = bool((increases <= 1e-9).all())
    _write_json(args.report, args, {
        "monotone_nonincreasing": monotone,
        "max_increase": float(increases.max()) if len(increases) else 0.0,
        "V_initial": values[0], "V_final": values[-1],
    })
    if not monotone:
        print("liapunov: V increased along the trajectory", file=sys.stderr)
        return 1
    if args.plot_data:
        _write_plot_data(args.plot_data, [(r[0], r[1]) for r in rows])
    return 0


def _cmd_discrete(args) -> int:
    n_list = [int(s) for s in args.n_list.split(",")]
    table = dr.continuum_compare(args.beta, args.z, args.t, n_list,
                                 kind=args.kind, n_grid=args.grid)
    _write_csv(args.out, _config_header(args),
               ["n", "L", "sup_gap", "order_estimate"], table.rows())
    _write_json(args.report, args, {
        "beta": table.beta, "z": table.z, "t": table.t,
        "n": table.n_values, "sup_gaps": table.sup_gaps,
        "ratios": table.ratios, "order_estimates": table.order_estimates,
        "l1_charge_norms": table.l1_norms,
    })
    if args.plot_data:
        _write_plot_data(args.plot_data, zip(table.n_values, table.sup_gaps))
    return 0


def _cmd_phase_portrait(args) -> int:
    w0_list = [float(s) for s in args.w0_list.split(",")]
    rows = []
    classifications = {}
    for w0 in w0_list:
        query = eq.OrbitQuery(args.alpha, w0)
        kind = eq.classify_orbit(query)
        classifications[_fmt(w0)] = kind.value
        if kind is eq.OrbitClass.POINT:
            rows.append((w0, kind.value, 0.0, 0.0, 0.0))
            continue
        if kind is eq.OrbitClass.CLOSED:
            T = eq.period(query).T
            xs = np.linspace(0.0, T, args.samples)
        else:
            xs = np.linspace(0.0, args.x_max, args.samples)
        from scipy.integrate import solve_ivp
        sol = solve_ivp(
            lambda x, y: [2.0 * y[1] * (y[0] - 1.0 / args.alpha), y[0]],
            (0.0, xs[-1]), (w0, 0.0), t_eval=xs, rtol=1e-10, atol=1e-12)
        for xk, wk, pk in zip(sol.t, sol.y[0], sol.y[1]):
            rows.append((w0, kind.value, xk, wk, pk))
    _write_csv(args.out, _config_header(args),
               ["w0", "class", "x", "w", "p"], rows)
    _write_json(args.report, args, {"classification": classifications})
    if args.plot_data:
        _write_plot_data(args.plot_data, [(r[3], r[4]) for r in rows
                                          if r[1] != "point"])
    return 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hierarg",
        description="Coarse-graining flow, equilibria, and stability of the "
                    "two-dimensional hierarchical Coulomb gas.")
    parser.add_argument("--version", action="version",
                        version=f"hierarg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, grid_default=256):
        p.add_argument("--grid", type=_power_of_two, default=grid_default,
                       help="collocation intervals on [0, pi] (power of two)")
        p.add_argument("--plot-data", metavar="PATH",
                       help="also write gnuplot-compatible two-column data")

    p = sub.add_parser("flow", help="evolve the odd-form flow from an expression")
    p.add_argument("--alpha", type=_positive("alpha"), required=True)
    p.add_argument("--init", required=True, help="profile, e.g. '0.1*sin(x)'")
    p.add_argument("--t-end", dest="t_end", type=_positive("t-end"), required=True)
    p.add_argument("--dt", type=_positive("dt"), default=1e-3)
    p.add_argument("--stride", type=int, default=100)
    p.add_argument("--out", default="flow.csv")
    p.add_argument("--summary", default="flow_summary.json")
    add_common(p)
    p.set_defaults(func=_cmd_flow)

    p = sub.add_parser("equilibrium", help="reconstruct psi_j^± at given alpha")
    p.add_argument("--alpha", type=_positive("alpha"), required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--sign", choices=["+", "-"], default="+")
    p.add_argument("--out", default="orbit.csv")
    p.add_argument("--report", default="orbit_report.json")
    p.add_argument("--grid", type=_power_of_two, default=None)
    p.add_argument("--plot-data", metavar="PATH")
    p.set_defaults(func=_cmd_equilibrium)

    p = sub.add_parser("bifurcation", help="sweep alpha, tabulate branch values")
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--alpha-min", dest="alpha_min", type=_positive("alpha-min"),
                   required=True)
    p.add_argument("--alpha-max", dest="alpha_max", type=_positive("alpha-max"),
                   required=True)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--out", default="bifurcation.csv")
    p.add_argument("--figure2", default="figure2.csv",
                   help="comparison table against the separatrix value 1/alpha")
    p.add_argument("--plot-data", metavar="PATH")
    p.set_defaults(func=_cmd_bifurcation)

    p = sub.add_parser("spectrum", help="low spectrum of the linearization")
    p.add_argument("--alpha", type=_positive("alpha"), required=True)
    p.add_argument("--branch", default="trivial",
                   help="'trivial' or j with sign, e.g. '1+', '2-'")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--out", default="spectrum.json")
    add_common(p, grid_default=512)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("criterium", help="comparison-criterium shooting trace")
    p.add_argument("--alpha", type=_positive("alpha"), required=True)
    p.add_argument("--branch", default="trivial")
    p.add_argument("--out", default="criterium.csv")
    p.add_argument("--report", default="criterium.json")
    p.add_argument("--plot-data", metavar="PATH")
    p.set_defaults(func=_cmd_criterium)

    p = sub.add_parser("liapunov", help="descent functional along a flow run")
    p.add_argument("--alpha", type=_positive("alpha"), required=True)
    p.add_argument("--init", required=True)
    p.add_argument("--t-end", dest="t_end", type=_positive("t-end"), required=True)
    p.add_argument("--dt", type=_positive("dt"), default=1e-3)
    p.add_argument("--stride", type=int, default=100)
    p.add_argument("--out", default="liapunov.csv")
    p.add_argument("--report", default="liapunov.json")
    add_common(p)
    p.set_defaults(func=_cmd_liapunov)

    p = sub.add_parser("discrete", help="block-spin vs continuum convergence table")
    p.add_argument("--beta", type=_positive("beta"), required=True)
    p.add_argument("--z", type=_positive("z"), default=0.1)
    p.add_argument("--t", type=_positive("t"), default=1.0)
    p.add_argument("--n-list", dest="n_list", default="8,16,32,64")
    p.add_argument("--kind", choices=["hardcore", "bessel"], default="hardcore")
    p.add_argument("--out", default="discrete.csv")
    p.add_argument("--report", default="discrete.json")
    add_common(p)
    p.set_defaults(func=_cmd_discrete)

    p = sub.add_parser("phase-portrait", help="sample and classify phase-plane orbits")
    p.add_argument("--alpha", type=_positive("alpha"), required=True)
    p.add_argument("--w0-list", dest="w0_list", required=True,
                   help="comma-separated starting values on the w-axis")
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--x-max", dest="x_max", type=_positive("x-max"), default=10.0)
    p.add_argument("--out", default="phase_portrait.csv")
    p.add_argument("--report", default="phase_portrait.json")
    p.add_argument("--plot-data", metavar="PATH")
    p.set_defaults(func=_cmd_phase_portrait)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HierargError as exc:
        print(f"hierarg {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
