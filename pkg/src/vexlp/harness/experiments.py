"""One runner per subcommand.  Each returns ``(config_columns, rows)`` with
rows in a deterministic order that does not depend on thread scheduling."""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from vexlp import __version__
from vexlp.corpus import bandlimited_corpus, gaussian, make_corpus
from vexlp.exponents import ExponentField, build_exponent, check_plog
from vexlp.grid import Grid, integrate, make_grid
from vexlp.harness.config import ExperimentConfig
from vexlp.harness.report import ReportBundle, summarize
from vexlp.norms import ModularOverflowError, luxemburg_norm, modular, unit_ball_check
from vexlp.operators import r_trick_ratio
from vexlp.verifiers import (
    Cube,
    RejectedConfigError,
    Theorem2Config,
    convolution_corollary_check,
    counterexample_growth,
    prepare_problem,
    sweep_translation_bound,
    theorem2_check,
    theorem2_strengthened_check,
)

log = logging.getLogger(__name__)

__all__ = ["RUNNERS", "run_experiment", "parallel_map", "thread_count"]


def thread_count() -> int:
    cap = os.environ.get("VEXLP_THREADS")
    if cap:
        try:
            return max(1, int(cap))
        except ValueError:
            log.warning("ignoring non-integer VEXLP_THREADS=%r", cap)
    return os.cpu_count() or 1


def parallel_map(fn: Callable, items: Sequence) -> list:
    """``[fn(x) for x in items]`` on up to ``VEXLP_THREADS`` threads, in order."""
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _flatten(chunks: Iterable[list]) -> list:
    return [row for chunk in chunks for row in chunk]


def _grid(cfg: ExperimentConfig) -> Grid:
    return make_grid(cfg.grid.dimension, cfg.grid.half_width, cfg.grid.points)


def _exponents(cfg: ExperimentConfig, grid: Grid) -> list[tuple[str, ExponentField]]:
    return [(e.id, build_exponent(e.family, e.params, grid)) for e in cfg.exponents]


def _corpus(cfg: ExperimentConfig, grid: Grid):
    c = cfg.corpus
    return make_corpus(grid, c.count, cfg.seed, c.families, c.noise_level)


# ---------------------------------------------------------------------------


def run_norms(cfg: ExperimentConfig):
    grid = _grid(cfg)
    exps = _exponents(cfg, grid)
    exps += [(f"const{p:g}", build_exponent("constant", {"p0": p}, grid)) for p in cfg.sweep.p_values]
    funcs = _corpus(cfg, grid)
    tol = cfg.tolerances.norm

    def one(item):
        (ename, p), (fname, f) = item
        try:
            rho = modular(f, p)
        except ModularOverflowError:
            rho = math.inf
        res = luxemburg_norm(f, p, tol)
        closed = None
        if p.is_constant:
            closed = integrate(f.abs().with_values(np.abs(f.values) ** p.p_minus)) ** (1.0 / p.p_minus)
        return {
            "exponent": ename,
            "function": fname,
            "modular": rho,
            "norm": res.value,
            "iterations": res.bisection_iterations,
            "closed_form": closed,
            "unit_ball_agree": unit_ball_check(f, p, tol).agree,
            "ratio": res.value / closed if closed else None,
        }

    items = [(e, f) for e in exps for f in funcs]
    cols = ("exponent", "function", "modular", "norm", "iterations", "closed_form", "unit_ball_agree")
    return cols, parallel_map(one, items)


def run_clog(cfg: ExperimentConfig):
    grid = _grid(cfg)
    t = cfg.tolerances

    def one(item):
        spec, (name, p) = item
        rep = check_plog(p, t.plog_threshold, pair_budget=t.pair_budget, seed=cfg.seed)
        return {
            "exponent": name,
            "family": spec.family,
            "clog_local_p": rep.clog_local_p,
            "clog_local_recip": rep.clog_local_recip,
            "clog_decay": rep.clog_decay,
            "clog_decay_p": rep.clog_decay_p,
            "is_plog": rep.is_plog,
            "pair_budget": rep.pair_budget,
            "exhaustive": rep.exhaustive,
            "reason": rep.reason,
        }

    cols = (
        "exponent",
        "family",
        "clog_local_p",
        "clog_local_recip",
        "clog_decay",
        "clog_decay_p",
        "is_plog",
        "pair_budget",
        "exhaustive",
        "reason",
    )
    return cols, parallel_map(one, list(zip(cfg.exponents, _exponents(cfg, grid))))


def run_rtrick(cfg: ExperimentConfig):
    grid = _grid(cfg)
    m = grid.dimension + 2.0
    corpora = {v: bandlimited_corpus(grid, v, cfg.corpus.count, cfg.seed) for v in cfg.sweep.levels}

    def one(item):
        r, v = item
        rows = []
        for fname, g in corpora[v]:
            res = r_trick_ratio(g, r, m, v)
            rows.append({"r": r, "v": v, "m": m, "function": fname, "skipped": res.skipped,
                         "ratio": res.ratio, "fitted_c": res.ratio})
        return rows

    items = [(r, v) for r in cfg.sweep.r_values for v in cfg.sweep.levels]
    return ("r", "v", "m", "function", "skipped"), _flatten(parallel_map(one, items))


def _default_starts(grid: Grid) -> tuple[int, ...]:
    n = grid.points_per_axis
    return (3 * n // 8, n // 2, 5 * n // 8)


def _thm2_rows(cfg: ExperimentConfig, strengthened: bool):
    grid = _grid(cfg)
    sw, tol = cfg.sweep, cfg.tolerances
    check = theorem2_strengthened_check if strengthened else theorem2_check
    exps = _exponents(cfg, grid)
    reports = {
        name: check_plog(p, tol.plog_threshold, pair_budget=tol.pair_budget, seed=cfg.seed,
                         exhaustive=grid.dimension == 1 or None)
        for name, p in exps
    }
    funcs = _corpus(cfg, grid)
    starts = sw.cube_starts or _default_starts(grid)
    dim = grid.dimension

    def one(item):
        (ename, p), (fname, f) = item
        prob = prepare_problem(p, f, exponent_id=ename, function_id=fname,
                               normalization=sw.normalization, tol=tol.norm, report=reports[ename])
        rows = []
        for side in sw.cube_sides:
            for start in starts:
                cube = Cube((start,) * dim, side)
                xs = sorted({start, start + side // 2, start + side - 1})
                for xi in xs:
                    for hk in sw.h_cells:
                        for m in sw.m:
                            for gv in sw.gamma_variants:
                                c = Theorem2Config(prob, cube, (xi % grid.points_per_axis,) * dim,
                                                   (hk,) + (0,) * (dim - 1), m, gv)
                                rec = check(c)
                                row = dict(rec.config)
                                row.pop("gamma")
                                row.pop("M")
                                row.pop("theta")
                                row["flags"] = "|".join(rec.flags)
                                row.update(lhs=rec.lhs, rhs_m_term=rec.rhs_terms[0],
                                           rhs_decay_term=rec.rhs_terms[1], slack=rec.slack)
                                rows.append(row)
        return rows

    cols = ("exponent", "function", "cube_start", "cube_side", "cube_volume", "x", "h", "m",
            "gamma_variant", "flags")
    items = [(e, f) for e in exps for f in funcs]
    return cols, _flatten(parallel_map(one, items))


def run_thm2(cfg: ExperimentConfig):
    return _thm2_rows(cfg, strengthened=False)


def run_thm2_strong(cfg: ExperimentConfig):
    return _thm2_rows(cfg, strengthened=True)


def run_translate_sweep(cfg: ExperimentConfig):
    grid = _grid(cfg)
    exps = _exponents(cfg, grid)
    count, seed = cfg.corpus.count, cfg.seed
    sweeps = parallel_map(
        lambda e: sweep_translation_bound(
            [e], cfg.sweep.levels, cfg.sweep.h_cells,
            lambda v: bandlimited_corpus(grid, v, count, seed), tol=cfg.tolerances.norm,
        ),
        exps,
    )
    rows = []
    for sw in sweeps:
        for name, v, k, h_norm, ratio, env, c in sw.rows:
            rows.append({"exponent": name, "v": v, "h_cells": k, "h_norm": h_norm,
                         "clog_p": sw.clog[name], "stability": sw.stability[name],
                         "ratio": ratio, "envelope": env, "fitted_c": c})
    return ("exponent", "v", "h_cells", "h_norm", "clog_p", "stability"), rows


def run_conv_corollary(cfg: ExperimentConfig):
    grid = _grid(cfg)
    exps = _exponents(cfg, grid)
    kernel = gaussian(grid, 0.0, cfg.sweep.kernel_width)
    kernel = kernel * (1.0 / integrate(kernel))

    def one(item):
        (ename, p), v = item
        clog = check_plog(p, exhaustive=grid.dimension == 1 or None).clog_local_p
        rows = []
        for fname, f in bandlimited_corpus(grid, v, cfg.corpus.count, cfg.seed):
            try:
                rec = convolution_corollary_check(f, kernel, p, v, clog_p=clog, tol=cfg.tolerances.norm)
            except RejectedConfigError as exc:
                log.warning("skipping %s/%s at v=%d: %s", ename, fname, v, exc)
                continue
            rows.append({"exponent": ename, "v": v, "function": fname,
                         "weighted_l1": rec.config["weighted_l1"], "clog_p": clog,
                         "lhs": rec.lhs, "rhs_m_term": rec.rhs_terms[0], "rhs_decay_term": 0.0,
                         "slack": rec.slack, "fitted_c": rec.extra["fitted_c"]})
        return rows

    items = [(e, v) for e in exps for v in cfg.sweep.levels]
    return ("exponent", "v", "function", "weighted_l1", "clog_p"), _flatten(parallel_map(one, items))


def run_counterexample(cfg: ExperimentConfig):
    grid = _grid(cfg)
    sw = cfg.sweep

    def one(item):
        name, p = item
        out = counterexample_growth(p, sw.shift, sw.clip_levels, quadrature=sw.quadrature,
                                    tol=cfg.tolerances.norm)
        return [{"exponent": name, "k": r.k, "norm_f": r.norm_f, "norm_shifted": r.norm_shifted,
                 "flagged": r.flagged, "ratio": r.ratio} for r in out]

    cols = ("exponent", "k", "norm_f", "norm_shifted", "flagged")
    return cols, _flatten(parallel_map(one, _exponents(cfg, grid)))


RUNNERS = {
    "norms": run_norms,
    "clog": run_clog,
    "rtrick": run_rtrick,
    "thm2": run_thm2,
    "thm2-strong": run_thm2_strong,
    "translate-sweep": run_translate_sweep,
    "conv-corollary": run_conv_corollary,
    "counterexample": run_counterexample,
}


def run_experiment(cfg: ExperimentConfig) -> ReportBundle:
    cols, rows = RUNNERS[cfg.experiment](cfg)
    # Values that are not finite cannot round-trip; keep them out of metrics.
    for row in rows:
        for k, val in row.items():
            if isinstance(val, float) and not math.isfinite(val):
                row[k] = None
    summary = summarize(cols, rows, cfg.config_hash())
    provenance = {"config_hash": cfg.config_hash(), "toolkit_version": __version__, "seed": cfg.seed}
    return ReportBundle(cfg.experiment, tuple(cols), rows, summary, provenance)


def write_plots(bundle: ReportBundle, out_dir: str | Path) -> list[Path]:
    """Ratio vs envelope per level for translation sweeps; never raises."""
    if bundle.experiment != "translate-sweep" or not bundle.rows:
        return []
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        matplotlib.rcParams["svg.hashsalt"] = "vexlp"
    except Exception as exc:  # plotting is optional
        log.warning("plots skipped: %s", exc)
        return []
    written = []
    for name in sorted({r["exponent"] for r in bundle.rows}):
        try:
            rows = [r for r in bundle.rows if r["exponent"] == name]
            c = max(r["fitted_c"] for r in rows)
            fig, ax = plt.subplots(figsize=(6, 4))
            for v in sorted({r["v"] for r in rows}):
                sel = sorted((r for r in rows if r["v"] == v and r["h_cells"] >= 0), key=lambda r: r["h_norm"])
                hs = [r["h_norm"] for r in sel]
                line, = ax.plot(hs, [r["ratio"] for r in sel], marker="o", label=f"ratio v={v}")
                ax.plot(hs, [c * r["envelope"] for r in sel], ls="--", color=line.get_color())
            ax.set_yscale("log")
            ax.set_xlabel("|h|")
            ax.set_ylabel("ratio / fitted envelope")
            ax.set_title(f"translation ratio, exponent {name}")
            ax.legend(fontsize=7)
            path = Path(out_dir) / f"translate_{name}.svg"
            fig.savefig(path, format="svg", metadata={"Date": None})
            plt.close(fig)
            written.append(path)
        except Exception as exc:
            log.warning("plot for %s failed: %s", name, exc)
    return written
