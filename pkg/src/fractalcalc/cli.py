"""Command-line front end: supports, operators, transforms and verification suites.

Every command writes CSV files (comma-separated, header row, 17 significant
digits) into ``--out``. ``verify`` exits 0 only when every check other than
the printed-variant rows passes. ``FRACTALCALC_TOL`` replaces the default
tolerances of the verification suites.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .errors import FractalCalcError
from .figures import ExampleConfig, example_checks, solve_example, write_example_csv
from .fractal_support import (
    BUILTIN_SPECS,
    build_curve,
    build_set,
    estimate_dimension,
    load_spec,
    rise_function,
    similarity_dimension,
    staircase_of_set,
    write_staircase_csv,
)
from .local_calculus import falpha_derivative, falpha_integral
from .nonlocal_operators import FracOrder, Side, caputo_derivative, rl_derivative, rl_integral
from .reporting import write_rows
from .staircase_coords import GridFunction
from .transforms.laplace import fractal_laplace
from .transforms.mellin import fractal_mellin_many
from .transforms.nonlocal_ode import nonlocal_ode_residual, solve_nonlocal_ode
from .transforms.policy import TruncationPolicy
from .verification import SUITES, run_suites

DEFAULTS = {
    "spec": "cantor",
    "depth": None,
    "alpha": "auto",
    "beta": 0.5,
    "grid": 4096,
    "umax": None,
    "out": "out",
    "jobs": 1,
    "func": "exp(-u)",
    "side": "left",
}

_FUNC_NAMES = ("exp", "log", "sin", "cos", "tan", "sqrt", "abs", "sinh", "cosh", "tanh", "pi", "e", "where", "maximum")


def parse_func(text: str):
    """Turn an expression in ``u`` (numpy names such as ``exp``, ``sqrt``) into a callable."""
    names = {k: getattr(np, k) for k in _FUNC_NAMES}
    try:
        code = compile(text, "<func>", "eval")
    except SyntaxError as exc:
        raise FractalCalcError(f"cannot parse --func {text!r}: {exc.msg}") from None
    for name in code.co_names:
        if name != "u" and name not in names:
            raise FractalCalcError(f"unknown name {name!r} in --func")

    def f(u):
        return np.broadcast_to(np.asarray(eval(code, {"__builtins__": {}}, dict(names, u=u)), dtype=float), np.shape(u))

    return f


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _support(args):
    """Spec, staircase and order from ``--spec``, ``--depth`` and ``--alpha``."""
    spec = load_spec(args.spec)
    depth = args.depth if args.depth is not None else (spec.depth if spec.depth is not None else 10)
    if args.alpha != "auto":
        alpha = float(args.alpha)
    elif spec.alpha is not None:
        alpha = spec.alpha
    else:
        # a depth-0 approximation is a plain interval or segment
        alpha = similarity_dimension(spec.spec.ratios) if depth > 0 else 1.0
    if spec.kind == "set":
        approx = build_set(spec.spec, depth)
        stair = staircase_of_set(approx, alpha)
    else:
        approx = build_curve(spec.spec, depth)
        stair = rise_function(approx, alpha)
    return spec, approx, stair, alpha


def _grid_function(args, stair=None) -> GridFunction:
    f = parse_func(args.func)
    if args.umax is not None:
        return GridFunction.from_function(f, 0.0, args.umax, args.grid)
    return GridFunction.from_function(f, float(stair.values[0]), float(stair.values[-1]), args.grid)


def _out(args, name: str) -> Path:
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


# --- commands -------------------------------------------------------------------


def cmd_staircase(args) -> int:
    spec, approx, stair, alpha = _support(args)
    path = _out(args, "staircase.csv")
    write_staircase_csv(stair, path)
    est = estimate_dimension(approx)
    print(f"{stair.label} total={stair.total:.17g} alpha={alpha:.17g} dimension_estimate={est.estimate:.10g}")
    print(f"wrote {path}")
    return 0


def cmd_solve_example(args) -> int:
    names = [args.spec] if args.spec_given else sorted(BUILTIN_SPECS)
    cfg = ExampleConfig(grid_n=args.grid)
    ok = True
    for name in names:
        sub = argparse.Namespace(**vars(args))
        sub.spec = name
        spec, _, stair, _ = _support(sub)
        sol = solve_example(stair, cfg)
        var, label = ("z", "set") if spec.kind == "set" else ("t", "curve")
        path = _out(args, f"example_{label}.csv")
        write_example_csv(sol, path, var)
        checks = example_checks(sol, label, cfg)
        ok &= all(c.passed for c in checks)
        print(f"{label}: y(0)={sol.y[0]:.17g} y(end)={sol.y[-1]:.17g} residual={sol.residual:.3e} -> {path}")
    return 0 if ok else 1


def cmd_deriv(args) -> int:
    _, _, stair, _ = _support(args)
    d = falpha_derivative(_grid_function(args, stair))
    path = _out(args, "deriv.csv")
    d.to_csv(path)
    print(f"wrote {path}")
    return 0


def cmd_integrate(args) -> int:
    _, _, stair, _ = _support(args)
    g = _grid_function(args, stair)
    lo, hi = stair.domain
    a = lo if args.a is None else args.a
    b = hi if args.b is None else args.b
    res = falpha_integral(g, stair, a, b)
    print(f"value={res.value:.17g} lower={res.lower:.17g} upper={res.upper:.17g}")
    return 0


def _nonlocal(args, op, fname) -> int:
    _, _, stair, alpha = _support(args)
    g = _grid_function(args, stair)
    res = op(g, FracOrder(alpha, args.beta), Side(args.side))
    path = _out(args, fname)
    res.to_csv(path)
    print(f"wrote {path}")
    return 0


def cmd_laplace(args) -> int:
    umax = args.umax if args.umax is not None else 60.0
    g = GridFunction.from_function(parse_func(args.func), 0.0, umax, args.grid)
    trunc = TruncationPolicy(u_max=umax)
    rows = []
    for us in _floats(args.us):
        v = fractal_laplace(g, us, trunc)
        rows.append((us, v.value, v.tail_bound))
        print(f"us={us:.17g} F={v.value:.17g} tail_bound={v.tail_bound:.3e}")
    write_rows(_out(args, "laplace.csv"), ("us", "F", "tail_bound"), rows)
    return 0


def cmd_mellin(args) -> int:
    umax = args.umax if args.umax is not None else 60.0
    sigmas = _floats(args.sigma)
    vals = fractal_mellin_many(parse_func(args.func), sigmas, TruncationPolicy(u_max=umax), n=args.grid, lead=args.lead)
    rows = []
    for s, v in zip(sigmas, vals):
        rows.append((s, v.value, v.lower_tail, v.upper_tail))
        print(f"sigma={s:.17g} M={v.value:.17g}")
    write_rows(_out(args, "mellin.csv"), ("sigma", "M", "lower_tail", "upper_tail"), rows)
    return 0


def cmd_solve_nonlocal(args) -> int:
    alpha = float(args.alpha) if args.alpha != "auto" else _support(args)[3]
    order = FracOrder(alpha, args.beta)
    umax = args.umax if args.umax is not None else 5.0
    c = _floats(args.c) if args.c else [1.0] + [0.0] * (order.n - 1)
    h = None
    if args.h != 0:
        h = GridFunction.from_function(lambda u: np.full_like(u, args.h), 0.0, umax, args.grid)
    y = solve_nonlocal_ode(order, args.lam, c, h, umax, args.grid)
    path = _out(args, "nonlocal.csv")
    y.to_csv(path)
    res = nonlocal_ode_residual(y, order, args.lam, h)
    print(f"residual={res:.3e} on [0.1, {umax:g}] -> {path}")
    return 0


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    env = os.environ.get("FRACTALCALC_TOL")
    tol = float(env) if env else None
    grid = args.grid if args.grid_given else None
    t0 = time.perf_counter()
    reports = run_suites(names, tol=tol, grid=grid, jobs=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for rep in reports:
        rep.write(out)
        print(rep.summary())
        for c in rep.failures:
            print(f"  failed: {getattr(c, 'name', getattr(c, 'row', '?'))} error={c.error:.3e} tol={c.tol:g}")
    ok = all(r.passed for r in reports)
    print(f"{'ALL PASS' if ok else 'FAILURES'} in {time.perf_counter() - t0:.1f}s; reports in {out}")
    return 0 if ok else 1


# --- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option defaults; flags win")
    common.add_argument("--spec", help="spec file or built-in name (cantor, koch)")
    common.add_argument("--depth", type=int, help="pre-fractal depth or generation")
    common.add_argument("--alpha", help="'auto' or a number")
    common.add_argument("--beta", type=float, help="operator order")
    common.add_argument("--grid", type=int, help="grid size")
    common.add_argument("--umax", type=float, help="upper end of the u-grid")
    common.add_argument("--out", help="output directory")
    common.add_argument("--jobs", type=int, help="worker processes for verify")
    common.add_argument("--func", help="expression in u, e.g. 'exp(-u)'")

    p = argparse.ArgumentParser(prog="fractalcalc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("staircase", parents=[common], help="write the staircase or rise function")
    sub.add_parser("solve-example", parents=[common], help="data for the D y = 2y - 4 solution plots")
    sub.add_parser("deriv", parents=[common], help="local derivative of --func")
    s = sub.add_parser("integrate", parents=[common], help="local integral of --func between z-limits")
    s.add_argument("--a", type=float)
    s.add_argument("--b", type=float)
    for name in ("rl-int", "rl-deriv", "caputo"):
        s = sub.add_parser(name, parents=[common], help=f"{name} of --func")
        s.add_argument("--side", choices=("left", "right"))
    s = sub.add_parser("laplace", parents=[common], help="Laplace transform of --func")
    s.add_argument("--us", default="1,2,3")
    s = sub.add_parser("mellin", parents=[common], help="Mellin transform of --func")
    s.add_argument("--sigma", default="0.5,1,1.5")
    s.add_argument("--lead", type=float, default=0.0, help="exponent of the behaviour of --func at 0")
    s = sub.add_parser("solve-nonlocal", parents=[common], help="closed-form solution of D^beta y = lam y + h")
    s.add_argument("--lam", type=float, default=0.5)
    s.add_argument("--c", default="", help="comma-separated initial values")
    s.add_argument("--h", type=float, default=0.0, help="constant forcing")
    s = sub.add_parser("verify", parents=[common], help="run verification suites")
    s.add_argument("suite", choices=SUITES + ("all",))
    return p


_COMMANDS = {
    "staircase": cmd_staircase,
    "solve-example": cmd_solve_example,
    "deriv": cmd_deriv,
    "integrate": cmd_integrate,
    "rl-int": lambda a: _nonlocal(a, rl_integral, "rl_int.csv"),
    "rl-deriv": lambda a: _nonlocal(a, rl_derivative, "rl_deriv.csv"),
    "caputo": lambda a: _nonlocal(a, caputo_derivative, "caputo.csv"),
    "laplace": cmd_laplace,
    "mellin": cmd_mellin,
    "solve-nonlocal": cmd_solve_nonlocal,
    "verify": cmd_verify,
}


def resolve_options(args) -> argparse.Namespace:
    """Fill unset options from ``--config``, then from the built-in defaults."""
    config = {}
    if args.config:
        config = json.loads(Path(args.config).read_text())
    args.spec_given = args.spec is not None or "spec" in config
    args.grid_given = args.grid is not None or "grid" in config
    for key, default in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, config.get(key, default))
    return args


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args = resolve_options(args)
        return _COMMANDS[args.command](args)
    except (FractalCalcError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
