"""CSV data behind the figures of the sub-monotone study.

Every table has p in the first column and one column per curve.  Values
are written with 9 significant digits and LF line endings, so identical
inputs give identical bytes.  Cells whose computation fails stay empty
and are counted.
"""
from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field
import numpy as np

from .errors import FaultySearchError
from .submonotone import heuristic_t1, heuristic_t2, limit_ratio, solve_optimal


def p_grid(lo: float = 0.01, hi: float = 0.99, step: float = 0.005) -> list:
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 10) for i in range(n)]


def _R(p, t):
    return solve_optimal(p, t).R_exact


def _beta(p, t):
    return solve_optimal(p, t).beta


def _margin1(p, t):
    return solve_optimal(p, t).report.margin1


def _margin2(p, t):
    return solve_optimal(p, t).report.margin2


def _x_minus_y_scaled(p, t):
    return _margin1(p, t) * p * (1 - p)


def _limit_margin2(p):
    L = limit_ratio(p)
    return L.margin2 * (1 - p) ** 2


def _cols(prefix, ts):
    return [(f"{prefix}{t}", t) for t in ts]


# figure id -> ([(column name, argument)], cell function (p, argument) -> value)
FIGURES: dict = {
    "fig2": (_cols("R", range(0, 5)), lambda p, t: float(_R(p, t))),
    "fig3": (_cols("beta_scaled_t", range(1, 5)),
             lambda p, t: _beta(p, t) * (1 - p) ** 2 - (1 - p)),
    "fig4": (_cols("con1_t", range(1, 5)), _x_minus_y_scaled),
    "fig5": (_cols("con2_t", range(1, 5)), lambda p, t: _margin2(p, t) * (1 - p) ** 2),
    "fig6": (_cols("R", range(5, 11)), lambda p, t: float(_R(p, t))),
    "fig7": (_cols("con2_t", range(5, 11)), lambda p, t: _margin2(p, t) * (1 - p) ** 2),
    "fig8left": (_cols("dR_scaled_t", range(5, 11)),
                 lambda p, t: 4.0 ** (t - 5) * float(_R(p, t - 1) - _R(p, t))),
    "fig8middle": (_cols("dbeta_scaled_t", range(5, 11)),
                   lambda p, t: (1 - p) ** (11 - t) * (_beta(p, t) - _beta(p, t - 1)) / _beta(p, t)),
    "fig8right": (_cols("con1_scaled_t", range(5, 11)),
                  lambda p, t: _x_minus_y_scaled(p, t) * 4.0 ** (t - 5)),
    "fig9left": ([("Rh1_minus_R1", 1)], lambda p, t: float(heuristic_t1(p).R - _R(p, t))),
    "fig9middle": ([("gamma1_scaled", None)],
                   lambda p, _: float(heuristic_t1(p).params.gammas[0]) * (1 - p)),
    "fig9right": ([("Rh2_minus_R1", 1), ("Rh2_minus_R2", 2)],
                  lambda p, t: float(heuristic_t2(p).R - _R(p, t))),
    "fig10left": ([("R10_minus_Rbar", 10)],
                  lambda p, t: float(_R(p, t) - limit_ratio(p).R_exact)),
    "fig10middle": ([("x_Rbar", None)], lambda p, _: limit_ratio(p).x),
    "fig10right": ([("con2_limit", None)], lambda p, _: _limit_margin2(p)),
}


@dataclass
class FigureTable:
    fig_id: str
    header: list
    rows: list
    failures: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.header) + "\n")
        for row in self.rows:
            buf.write(",".join("" if v is None else format_value(v) for v in row) + "\n")
        return buf.getvalue()


def format_value(v) -> str:
    return f"{float(v):.9g}"


def build_table(fig_id: str, grid=None) -> FigureTable:
    if fig_id not in FIGURES:
        raise KeyError(f"unknown figure {fig_id!r}")
    cols, fn = FIGURES[fig_id]
    grid = p_grid() if grid is None else grid
    rows, failures = [], []
    for p in grid:
        row = [p]
        for name, arg in cols:
            try:
                v = fn(p, arg)
                if not np.isfinite(v):
                    raise FaultySearchError("non-finite value")
                row.append(v)
            except (FaultySearchError, ArithmeticError, AssertionError) as exc:
                row.append(None)
                failures.append((p, name, str(exc)))
        rows.append(row)
    return FigureTable(fig_id, ["p"] + [name for name, _ in cols], rows, failures)


def write_figures(outdir: str, figs=None, grid=None) -> tuple:
    """Write one CSV per figure; returns (paths, failures)."""
    os.makedirs(outdir, exist_ok=True)
    figs = list(FIGURES) if not figs else list(figs)
    paths, failures = [], []
    for fig_id in figs:
        table = build_table(fig_id, grid)
        path = os.path.join(outdir, f"{fig_id}.csv")
        with open(path, "w", newline="\n", encoding="ascii") as fh:
            fh.write(table.to_csv())
        paths.append(path)
        failures.extend((fig_id,) + f for f in table.failures)
    return paths, failures
