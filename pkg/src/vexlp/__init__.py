"""Numerical toolkit for variable-exponent Lebesgue spaces on periodic grids."""

from vexlp.grid import (
    Grid,
    SampledFunction,
    SpectralFunction,
    dft,
    idft,
    integrate,
    make_grid,
)
from vexlp.exponents import (
    ExponentField,
    LogHolderReport,
    build_exponent,
    check_plog,
    estimate_clog_decay,
    estimate_clog_local,
    exponent_from_samples,
)
from vexlp.norms import NormResult, luxemburg_norm, modular, unit_ball_check
from vexlp.operators import (
    EtaKernel,
    RadiiSet,
    ball_average,
    bandlimit_project,
    convolve,
    eta_kernel,
    hl_maximal,
    r_trick_ratio,
    translate,
)

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "SampledFunction",
    "SpectralFunction",
    "make_grid",
    "integrate",
    "dft",
    "idft",
    "ExponentField",
    "LogHolderReport",
    "build_exponent",
    "exponent_from_samples",
    "estimate_clog_local",
    "estimate_clog_decay",
    "check_plog",
    "NormResult",
    "modular",
    "luxemburg_norm",
    "unit_ball_check",
    "EtaKernel",
    "RadiiSet",
    "translate",
    "ball_average",
    "hl_maximal",
    "eta_kernel",
    "convolve",
    "bandlimit_project",
    "r_trick_ratio",
]
