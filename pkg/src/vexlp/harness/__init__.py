"""Config-driven experiment runner and report bundles."""

from vexlp.harness.config import EXPERIMENTS, ConfigError, ExperimentConfig, default_config, load_config
from vexlp.harness.experiments import run_experiment
from vexlp.harness.report import ReportBundle, load_bundle, write_bundle

__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "ExperimentConfig",
    "ReportBundle",
    "default_config",
    "load_bundle",
    "load_config",
    "run_experiment",
    "write_bundle",
]
