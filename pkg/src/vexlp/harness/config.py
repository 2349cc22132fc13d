"""Experiment configuration: a TOML file with nested sections.

Example::

    experiment = "thm2"
    seed = 0

    [grid]
    dimension = 1
    half_width = 4.0
    points = 256

    [[exponents]]
    id = "bump"
    family = "smooth_bump"
    p0 = 2.0
    amplitude = 1.0
    width = 1.0

    [corpus]
    families = ["indicator", "gaussian", "power_law", "noise"]
    count = 4

    [sweep]
    cube_sides = [1, 2, 4]
    cube_starts = [112, 128]
    h_cells = [0, 1, -1]
    m = [2.0, 3.0]

    [output]
    dir = "out/thm2"

Every section is optional; missing keys take the defaults below.  The full
schema is documented in ``docs/config.md``.
"""

from __future__ import annotations

import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from vexlp.corpus import CORPUS_FAMILIES
from vexlp.exponents import FAMILIES
from vexlp.grid import make_grid
from vexlp.operators import band_cutoff

__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "GridSpec",
    "ExponentSpec",
    "CorpusSpec",
    "SweepSpec",
    "Tolerances",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "default_config",
]

EXPERIMENTS = (
    "norms",
    "clog",
    "rtrick",
    "thm2",
    "thm2-strong",
    "translate-sweep",
    "conv-corollary",
    "counterexample",
)

_FAMILY_PARAMS = {
    "constant": ("p0",),
    "smooth_bump": ("p0", "amplitude", "width"),
    "log_borderline": ("p0", "a"),
    "step": ("p_left", "p_right"),
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class GridSpec:
    dimension: int = 1
    half_width: float = 4.0
    points: int = 256


@dataclass(frozen=True)
class ExponentSpec:
    id: str
    family: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CorpusSpec:
    families: tuple[str, ...] = CORPUS_FAMILIES
    count: int = 4
    noise_level: int = 2


@dataclass(frozen=True)
class SweepSpec:
    levels: tuple[int, ...] = (0, 1, 2)
    h_cells: tuple[int, ...] = (0, 1, -1, 2, -2)
    cube_sides: tuple[int, ...] = (1, 2, 4, 8)
    cube_starts: tuple[int, ...] = ()
    m: tuple[float, ...] = (2.0, 3.0)
    gamma_variants: tuple[str, ...] = ("recip",)
    normalization: str = "sum"
    clip_levels: tuple[float, ...] = (10.0, 100.0, 1000.0)
    shift: float = 0.5
    r_values: tuple[float, ...] = (0.5, 1.0)
    p_values: tuple[float, ...] = (1.0, 2.0, 4.0)
    quadrature: str = "cell"
    kernel_width: float = 0.25


@dataclass(frozen=True)
class Tolerances:
    norm: float = 1e-10
    slack: float = 1e-12
    plog_threshold: float = 10.0
    pair_budget: int = 20000


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int = 0
    grid: GridSpec = GridSpec()
    exponents: tuple[ExponentSpec, ...] = ()
    corpus: CorpusSpec = CorpusSpec()
    sweep: SweepSpec = SweepSpec()
    tolerances: Tolerances = Tolerances()
    output_dir: str = "out"
    plots: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["exponents"] = [asdict(e) for e in self.exponents]
        return d

    def config_hash(self) -> str:
        # Where results go and whether charts are drawn do not change them.
        d = self.to_dict()
        d.pop("output_dir")
        d.pop("plots")
        blob = json.dumps(d, sort_keys=True, default=list).encode()
        return hashlib.sha256(blob).hexdigest()

    def with_overrides(self, **kw: Any) -> "ExperimentConfig":
        grid_kw = {k: kw.pop(k) for k in ("dimension", "half_width", "points") if kw.get(k) is not None}
        cfg = self
        if grid_kw:
            cfg = replace(cfg, grid=replace(cfg.grid, **grid_kw))
        kw = {k: v for k, v in kw.items() if v is not None}
        cfg = replace(cfg, **kw) if kw else cfg
        validate(cfg)
        return cfg


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def _expect(value: Any, kind, path: str):
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, bool):
        raise ConfigError(f"{path}: expected integer, got boolean")
    if not isinstance(value, kind):
        raise ConfigError(f"{path}: expected {kind.__name__}, got {type(value).__name__} ({value!r})")
    return value


def _list(value: Any, kind, path: str) -> tuple:
    if not isinstance(value, list):
        raise ConfigError(f"{path}: expected a list, got {type(value).__name__}")
    return tuple(_expect(v, kind, f"{path}[{i}]") for i, v in enumerate(value))


def _section(raw: dict, name: str, spec_cls, kinds: dict) -> Any:
    data = raw.get(name, {})
    if not isinstance(data, dict):
        raise ConfigError(f"{name}: expected a table")
    unknown = set(data) - set(kinds)
    if unknown:
        raise ConfigError(f"{name}.{sorted(unknown)[0]}: unknown key")
    kw = {}
    for key, kind in kinds.items():
        if key not in data:
            continue
        path = f"{name}.{key}"
        if isinstance(kind, tuple):
            kw[key] = _list(data[key], kind[0], path)
        else:
            kw[key] = _expect(data[key], kind, path)
    return spec_cls(**kw)


def parse_config(raw: dict, *, experiment: str | None = None) -> ExperimentConfig:
    top = {"experiment", "seed", "grid", "exponents", "corpus", "sweep", "tolerances", "output"}
    unknown = set(raw) - top
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown top-level key")
    exp = experiment or raw.get("experiment")
    if exp is None:
        raise ConfigError("experiment: missing (or pass a subcommand)")
    exp = _expect(exp, str, "experiment")
    grid = _section(raw, "grid", GridSpec, {"dimension": int, "half_width": float, "points": int})
    corpus = _section(raw, "corpus", CorpusSpec, {"families": (str,), "count": int, "noise_level": int})
    sweep = _section(
        raw,
        "sweep",
        SweepSpec,
        {
            "levels": (int,),
            "h_cells": (int,),
            "cube_sides": (int,),
            "cube_starts": (int,),
            "m": (float,),
            "gamma_variants": (str,),
            "normalization": str,
            "clip_levels": (float,),
            "shift": float,
            "r_values": (float,),
            "p_values": (float,),
            "quadrature": str,
            "kernel_width": float,
        },
    )
    tols = _section(
        raw,
        "tolerances",
        Tolerances,
        {"norm": float, "slack": float, "plog_threshold": float, "pair_budget": int},
    )
    output = raw.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("output: expected a table")
    if set(output) - {"dir", "plots"}:
        raise ConfigError(f"output.{sorted(set(output) - {'dir', 'plots'})[0]}: unknown key")

    exps = []
    raw_exps = raw.get("exponents", [])
    if not isinstance(raw_exps, list):
        raise ConfigError("exponents: expected an array of tables ([[exponents]])")
    for i, e in enumerate(raw_exps):
        path = f"exponents[{i}]"
        if not isinstance(e, dict):
            raise ConfigError(f"{path}: expected a table")
        fam = _expect(e.get("family"), str, f"{path}.family")
        if fam not in FAMILIES:
            raise ConfigError(f"{path}.family: unknown family {fam!r}; expected one of {FAMILIES}")
        params = {}
        for key in _FAMILY_PARAMS[fam]:
            if key not in e:
                raise ConfigError(f"{path}.{key}: required for family {fam!r}")
            params[key] = _expect(e[key], float, f"{path}.{key}")
        extra = set(e) - {"id", "family", *_FAMILY_PARAMS[fam]}
        if extra:
            raise ConfigError(f"{path}.{sorted(extra)[0]}: unknown key for family {fam!r}")
        ident = _expect(e.get("id", f"{fam}{i}"), str, f"{path}.id")
        exps.append(ExponentSpec(ident, fam, params))

    cfg = ExperimentConfig(
        experiment=exp,
        seed=_expect(raw.get("seed", 0), int, "seed"),
        grid=grid,
        exponents=tuple(exps),
        corpus=corpus,
        sweep=sweep,
        tolerances=tols,
        output_dir=_expect(output.get("dir", "out"), str, "output.dir"),
        plots=_expect(output.get("plots", False), bool, "output.plots"),
    )
    validate(cfg)
    return cfg


def load_config(path: str | Path, *, experiment: str | None = None) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        # The decoder message carries "(at line L, column C)".
        raise ConfigError(f"{path}: {exc}") from exc
    try:
        return parse_config(raw, experiment=experiment)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def validate(cfg: ExperimentConfig) -> None:
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment: unknown {cfg.experiment!r}; expected one of {EXPERIMENTS}")
    try:
        grid = make_grid(cfg.grid.dimension, cfg.grid.half_width, cfg.grid.points)
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc
    for fam in cfg.corpus.families:
        if fam not in CORPUS_FAMILIES:
            raise ConfigError(f"corpus.families: unknown family {fam!r}")
    if cfg.corpus.count < 0:
        raise ConfigError("corpus.count: must be >= 0")
    sw = cfg.sweep
    for v in list(sw.levels) + [cfg.corpus.noise_level]:
        if v < 0 or not band_cutoff(v) < grid.nyquist:
            raise ConfigError(
                f"sweep.levels: Nyquist violation, level {v} needs 2^(v+1) < {grid.nyquist:.6g}"
            )
    if any(s < 1 or s > cfg.grid.points for s in sw.cube_sides):
        raise ConfigError("sweep.cube_sides: sides must lie in [1, points]")
    if any(m <= 0 for m in sw.m):
        raise ConfigError("sweep.m: values must be positive")
    for gv in sw.gamma_variants:
        if gv not in ("recip", "p"):
            raise ConfigError(f"sweep.gamma_variants: unknown variant {gv!r}")
    if sw.normalization not in ("sum", "lp"):
        raise ConfigError(f"sweep.normalization: unknown {sw.normalization!r}")
    if sw.quadrature not in ("cell", "sample"):
        raise ConfigError(f"sweep.quadrature: unknown {sw.quadrature!r}")
    if any(r <= 0 for r in sw.r_values):
        raise ConfigError("sweep.r_values: values must be positive")
    if any(not (k > 0 and math.isfinite(k)) for k in sw.clip_levels):
        raise ConfigError("sweep.clip_levels: values must be positive and finite")
    if not (0 < cfg.tolerances.norm <= 1e-4):
        raise ConfigError("tolerances.norm: must lie in (0, 1e-4]")
    if cfg.tolerances.pair_budget < 1:
        raise ConfigError("tolerances.pair_budget: must be >= 1")


def default_config(experiment: str) -> ExperimentConfig:
    """Built-in configuration for subcommands run without ``--config``."""
    if experiment == "counterexample":
        cfg = ExperimentConfig(
            experiment,
            grid=GridSpec(1, 2.0, 2**16),
            exponents=(
                ExponentSpec("step", "step", {"p_left": 8.0, "p_right": 2.0}),
                ExponentSpec("const2", "constant", {"p0": 2.0}),
            ),
        )
    elif experiment == "rtrick":
        cfg = ExperimentConfig(
            experiment,
            grid=GridSpec(1, 16.0, 2048),
            corpus=CorpusSpec(count=10),
            sweep=SweepSpec(levels=(0, 1, 2, 3, 4)),
        )
    else:
        cfg = ExperimentConfig(
            experiment,
            exponents=(
                ExponentSpec("const2", "constant", {"p0": 2.0}),
                ExponentSpec("bump", "smooth_bump", {"p0": 2.0, "amplitude": 1.0, "width": 1.0}),
                ExponentSpec("borderline", "log_borderline", {"p0": 2.0, "a": 0.5}),
            ),
        )
    validate(cfg)
    return cfg
