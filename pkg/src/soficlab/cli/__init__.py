from soficlab.cli.config import ConfigError, Experiment, ExperimentConfig, load_config
from soficlab.cli.runner import run_experiment

__all__ = ["ConfigError", "Experiment", "ExperimentConfig", "load_config", "run_experiment"]
