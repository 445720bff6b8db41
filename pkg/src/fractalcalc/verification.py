"""Named verification suites, each a list of checks plus the CSV files it writes."""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .fractal_support import CANTOR, VON_KOCH, build_curve, build_set, rise_function, staircase_of_set
from .figures import ExampleConfig, example_checks, solve_example
from .reporting import TABLE1_HEADER, TRANSFORM_HEADER, CheckResult, write_rows
from .special_functions import gamma
from .table1 import Column, PowerRuleConfig, Table1Config, _power_rows, power_rule_checks, verify_table1
from .transforms.laplace import LaplaceIdentityConfig, Table2Config, laplace_identity_suite, verify_table2
from .transforms.mellin import MellinConfig, MellinOdeConfig, mellin_identity_suite, mellin_ode_example_check
from .transforms.nonlocal_ode import NonlocalOdeConfig, nonlocal_ode_suite

__all__ = [
    "SUITES",
    "SuiteReport",
    "default_columns",
    "staircase_total_checks",
    "run_suite",
    "run_suites",
    "convergence_study",
]

CANTOR_ALPHA = math.log(2) / math.log(3)
KOCH_ALPHA = math.log(4) / math.log(3)
SUITES = ("supports", "table1", "table2", "laplace-ode", "mellin")


@dataclass
class SuiteReport:
    name: str
    checks: list = field(default_factory=list)
    files: dict = field(default_factory=dict)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.erratum and not c.passed]

    @property
    def errata(self) -> list:
        return [c for c in self.checks if c.erratum]

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        confirmed = sum(c.status == "erratum-confirmed" for c in self.errata)
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{self.name}: {verdict} {len(self.checks)} checks, {len(self.failures)} failed, "
            f"{confirmed}/{len(self.errata)} printed variants confirmed as errata"
        )

    def write(self, out_dir) -> list:
        paths = []
        for fname, (header, rows) in self.files.items():
            path = out_dir / fname
            write_rows(path, header, rows)
            paths.append(path)
        return paths


def default_columns(set_depth: int = 10, curve_generation: int = 6) -> list[Column]:
    approx = build_set(CANTOR, set_depth)
    return [
        Column("set", staircase_of_set(approx, CANTOR_ALPHA), CANTOR_ALPHA, 2 / 3, approx),
        Column("curve", rise_function(build_curve(VON_KOCH, curve_generation), KOCH_ALPHA), KOCH_ALPHA, 0.5),
    ]


def staircase_total_checks(set_depths=range(1, 13), curve_generations=range(1, 9), tol: float = 1e-12) -> list[CheckResult]:
    """Total mass of each pre-fractal against its limit value."""
    out = []
    target = gamma(CANTOR_ALPHA + 1)
    for d in set_depths:
        total = staircase_of_set(build_set(CANTOR, d), CANTOR_ALPHA).total
        out.append(CheckResult("cantor-total", abs(total / target - 1), tol, {"depth": d}, lhs=total, rhs=target))
    target = 1 / gamma(KOCH_ALPHA + 1)
    for g in curve_generations:
        total = rise_function(build_curve(VON_KOCH, g), KOCH_ALPHA).total
        out.append(CheckResult("koch-total", abs(total / target - 1), tol, {"generation": g}, lhs=total, rhs=target))
    return out


def _with_tol(cfg, tol):
    return cfg if tol is None else dataclasses.replace(cfg, tol=tol)


def _transform_rows(checks) -> list:
    return [c.as_transform_row() for c in checks]


def _supports(tol, grid):
    checks = staircase_total_checks()
    files = {}
    cfg = _with_tol(ExampleConfig(grid_n=grid or 4096), tol)
    for col, var in zip(default_columns(), ("z", "t")):
        sol = solve_example(col.staircase, cfg)
        checks += example_checks(sol, col.name, cfg)
        files[f"example_{col.name}.csv"] = ((var, "y"), list(zip(sol.z, sol.y)))
    files["supports.csv"] = (TRANSFORM_HEADER, _transform_rows(checks))
    return SuiteReport("supports", checks, files)


def _table1(tol, grid):
    cfg = _with_tol(Table1Config(grid_n=grid or 4096), tol)
    cols = default_columns()
    rows = verify_table1(cols, cfg)
    power = power_rule_checks(cols[0], _with_tol(PowerRuleConfig(), tol))
    files = {
        "table1.csv": (TABLE1_HEADER, [r.as_csv() for r in rows]),
        "power_rule.csv": (TRANSFORM_HEADER, _transform_rows(power)),
    }
    return SuiteReport("table1", list(rows) + power, files)


def _table2(tol, grid):
    checks = verify_table2(_with_tol(Table2Config(grid_n=grid or 2**14), tol))
    return SuiteReport("table2", checks, {"table2.csv": (TRANSFORM_HEADER, _transform_rows(checks))})


def _laplace_ode(tol, grid):
    checks = laplace_identity_suite(_with_tol(LaplaceIdentityConfig(grid_n=grid or 2**14), tol))
    checks += nonlocal_ode_suite(_with_tol(NonlocalOdeConfig(), tol))
    return SuiteReport("laplace-ode", checks, {"laplace_ode.csv": (TRANSFORM_HEADER, _transform_rows(checks))})


def _mellin(tol, grid):
    checks = mellin_identity_suite(_with_tol(MellinConfig(grid_n=grid or 2**14), tol))
    checks += mellin_ode_example_check(_with_tol(MellinOdeConfig(), tol))
    return SuiteReport("mellin", checks, {"mellin.csv": (TRANSFORM_HEADER, _transform_rows(checks))})


_RUNNERS = {"supports": _supports, "table1": _table1, "table2": _table2, "laplace-ode": _laplace_ode, "mellin": _mellin}


def run_suite(name: str, tol: float | None = None, grid: int | None = None) -> SuiteReport:
    """Run one suite. ``tol`` replaces every non-erratum tolerance; ``grid`` the main grid size."""
    return _RUNNERS[name](tol, grid)


def run_suites(names, tol: float | None = None, grid: int | None = None, jobs: int = 1) -> list[SuiteReport]:
    """Run suites in order, optionally across ``jobs`` worker processes."""
    names = list(names)
    if jobs <= 1 or len(names) == 1:
        return [run_suite(n, tol, grid) for n in names]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_suite, names, [tol] * len(names), [grid] * len(names)))


def convergence_study(grids=(2**12, 2**13, 2**14, 2**15)) -> dict[str, list[float]]:
    """Worst error per identity at each grid size; erratum rows are left out."""
    table: dict[str, list[float]] = {}

    def record(checks, key):
        worst: dict[str, float] = {}
        for c in checks:
            if c.erratum or getattr(c, "skipped", False):
                continue
            name = key(c)
            worst[name] = max(worst.get(name, 0.0), c.error)
        for name, err in worst.items():
            table.setdefault(name, []).append(err)

    cols = default_columns()
    for n in grids:
        t1 = Table1Config(grid_n=n, betas=(0.25, 0.5), lambdas=())
        rows = [r for col in cols for b in t1.betas_for(col.alpha) for m in t1.ms for r in _power_rows(col, b, m, t1)]
        record(rows, lambda r: f"table1-row{r.row}-{r.column}")
        record(laplace_identity_suite(LaplaceIdentityConfig(grid_n=n)), lambda c: c.name)
        record(nonlocal_ode_suite(NonlocalOdeConfig(grid_n=n)), lambda c: c.name)
        m_cfg = MellinConfig(grid_n=n)
        record(mellin_identity_suite(m_cfg), lambda c: c.name)
    return table
