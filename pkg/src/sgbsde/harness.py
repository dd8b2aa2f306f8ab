"""Running configured experiments, CSV output and table reproduction."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import published
from .config import ExperimentConfig, config_dict
from .geometry import TimeGrid
from .models import make_model
from .parametrization import Coefficients, make_layout
from .presets import get_preset
from .reference import Z95, cole_hopf, exact_y0
from .sgd import SolveReport, solve_direct, solve_picard
from .simulation import derive_seed
from .sparse_grid import Family, SparseGridSpace, count

SUMMARY_HEADER = ["run", "seed", "algorithm", "iteration", "y0", "mse", "mse_fresh", "wall_time"]
REPRODUCE_HEADER = ["target", "quantity", "artifact", "published", "abs_diff"]


def build(cfg: ExperimentConfig):
    """``(model, layout, init)`` for a configuration."""
    model = make_model(cfg.model, cfg.dim, T=cfg.horizon, **cfg.params)
    grid = TimeGrid(cfg.horizon, cfg.steps)
    space = SparseGridSpace(cfg.dim, cfg.level, Family.parse(cfg.family))
    layout = make_layout(model, grid, space, cfg.r)
    init = Coefficients.constant(layout, cfg.init_y, cfg.init_z0, cfg.init_zn)
    return model, layout, init


def run(cfg: ExperimentConfig, seed: Optional[int] = None) -> SolveReport:
    """One solve; ``seed`` overrides the configured one."""
    seed = cfg.seed if seed is None else int(seed)
    model, layout, init = build(cfg)
    if cfg.method == "direct":
        report = solve_direct(model, layout, cfg.schedule, cfg.M, seed, init, cfg.euler_strict)
    else:
        report = solve_picard(model, layout, cfg.picard_config(), cfg.schedule, seed, init, cfg.euler_strict)
    report.config = config_dict(cfg)
    return report


def run_seeds(cfg: ExperimentConfig) -> list[int]:
    """Seeds of the ``cfg.runs`` reseeded runs; the first is the configured seed."""
    return [cfg.seed] + [derive_seed(cfg.seed, 0x5EED, i) for i in range(1, cfg.runs)]


@dataclass
class RunSummary:
    reports: list
    mean: float
    ci_low: float
    ci_high: float

    @property
    def estimates(self) -> np.ndarray:
        return np.array([r.y0 for r in self.reports])


def run_many(cfg: ExperimentConfig) -> RunSummary:
    """``cfg.runs`` reseeded solves with a normal 95% interval for the mean."""
    reports = [run(cfg, s) for s in run_seeds(cfg)]
    ys = np.array([r.y0 for r in reports])
    mean = float(ys.mean())
    half = Z95 * float(ys.std(ddof=1)) / np.sqrt(len(ys)) if len(ys) > 1 else 0.0
    return RunSummary(reports, mean, mean - half, mean + half)


# ---------------------------------------------------------------------------
# CSV


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def summary_rows(reports) -> list[list]:
    rows = []
    for i, rep in enumerate(reports):
        for it in rep.iterations:
            rows.append([i, rep.seed, rep.algorithm, it.p, it.y0, it.mse, it.mse_fresh, ""])
        rows.append([i, rep.seed, rep.algorithm, "final", rep.y0, rep.mse, rep.mse_fresh, rep.wall_time])
    return rows


def write_csv(path_or_file, header, rows) -> None:
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    finally:
        if own:
            fh.close()


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    write_csv(buf, header, rows)
    return buf.getvalue()


def z0_rows(reports) -> list[list]:
    return [[i, l, float(z)] for i, rep in enumerate(reports) if rep.z0 is not None for l, z in enumerate(rep.z0)]


def trace_rows(report) -> list[list]:
    return [[m + 1, float(v)] for m, v in enumerate(report.trace)]


# ---------------------------------------------------------------------------
# reproduction of published tables and values

TARGETS = (
    "table1", "table3", "quadratic-d5", "periodic-d3", "financial-d2", "financial-d4",
    "challenging-d1", "challenging-d2", "challenging-d5", "challenging-d8", "challenging-d10",
    "bifurcation",
)


def _row(target, quantity, artifact, published_value):
    diff = None if published_value is None or artifact is None else abs(float(artifact) - float(published_value))
    return [target, quantity, artifact, published_value, diff]


def reproduce(target: str, runs: Optional[int] = None, seed: int = 0, scale: float = 1.0) -> list[list]:
    """Rows ``(target, quantity, artifact, published, abs_diff)``.

    ``runs`` overrides the number of reseeded runs and ``scale`` multiplies
    the number of SGD steps (for quick looks at reduced cost).
    """
    if target not in TARGETS:
        raise KeyError(f"unknown target {target!r}; available: {', '.join(TARGETS)}")

    def prep(name, default_runs=1):
        cfg = get_preset(name)
        return cfg.with_(seed=seed, runs=runs or default_runs, M=max(1, int(round(cfg.M * scale))))

    if target in ("table1", "table3"):
        fam, table = (("prewavelet", published.TABLE_BOUNDARY) if target == "table1"
                      else ("modhat", published.TABLE_NO_BOUNDARY))
        return [_row(target, f"d={d} level={l}", count(d, l, fam), n)
                for d, cells in table.items() for l, n in cells.items()]
    if target == "quadratic-d5":
        model = make_model("quadratic", 5)
        ref = cole_hopf(model, 0.0, np.zeros(5), 100_000, seed)
        direct = run_many(prep("quadratic-d5-prewavelet"))
        picard = run(prep("quadratic-d5-prewavelet-picard"))
        return [
            _row(target, "reference y0", ref.y0, published.QUADRATIC_D5["reference"]),
            _row(target, "reference ci_low", ref.ci_low, published.QUADRATIC_D5["ci"][0]),
            _row(target, "reference ci_high", ref.ci_high, published.QUADRATIC_D5["ci"][1]),
            _row(target, "direct y0", direct.mean, published.QUADRATIC_D5["reference"]),
            _row(target, "picard y0", picard.y0, published.QUADRATIC_D5["picard"]),
        ]
    if target == "periodic-d3":
        rep = run(prep("periodic-d3-picard"))
        return [_row(target, f"mse p={it.p}", it.mse, ref)
                for it, ref in zip(rep.iterations, published.PERIODIC_D3_MSE)] + [
            _row(target, "mse fresh draws", rep.mse_fresh, published.PERIODIC_D3_MSE[-1])]
    if target in ("financial-d2", "financial-d4"):
        d = int(target[-1])
        summary = run_many(prep(f"financial-d{d}-prewavelet", 10))
        y, lo, hi = published.FINANCIAL_DIRECT[d]
        rows = [
            _row(target, "direct y0", summary.mean, y),
            _row(target, "direct ci_low", summary.ci_low, lo),
            _row(target, "direct ci_high", summary.ci_high, hi),
            _row(target, "deep learning y0 (external)", None, published.FINANCIAL_DEEP[d]),
        ]
        if d == 4:
            rows.append(_row(target, "picard y0", run(prep("financial-d4-prewavelet-picard")).y0,
                             published.FINANCIAL_PICARD[4]))
        return rows
    if target.startswith("challenging-d"):
        d = int(target.split("-d")[1])
        theory, p_direct, p_picard = published.CHALLENGING[d]
        exact = exact_y0(make_model("challenging", d), 0.0, np.full(d, 0.5))
        direct = run(prep(f"challenging-d{d}-hat"))
        picard = run(prep(f"challenging-d{d}-hat-picard"))
        return [
            _row(target, "closed form y0", exact, theory),
            _row(target, "direct y0", direct.y0, p_direct),
            _row(target, "picard y0", picard.y0, p_picard),
            _row(target, "direct error", abs(direct.y0 - exact), abs(p_direct - theory)),
            _row(target, "picard error", abs(picard.y0 - exact), abs(p_picard - theory)),
        ]
    # bifurcation: the Picard iterates for both values of a
    rows = []
    for name in ("bifurcation-a0.4-picard", "bifurcation-a1.5-picard"):
        rep = run(prep(name))
        rows += [_row(target, f"{name} y0 p={it.p}", it.y0, None) for it in rep.iterations]
    return rows
