"""Experiment orchestration: configs, corpus, runners and the command line."""

from .config import ConfigError, ExperimentConfig, load_config, parse_config, shipped_configs
from .corpus import corpus_generate, golden_manifest, verify_corpus, load_instance, FAMILIES
from .experiments import REGISTRY, Outcome
from .runner import ResultRecord, Check, RunResult, run, evaluate_thresholds, OUTPUT_ENV

__all__ = [
    "ConfigError", "ExperimentConfig", "load_config", "parse_config", "shipped_configs",
    "corpus_generate", "golden_manifest", "verify_corpus", "load_instance", "FAMILIES",
    "REGISTRY", "Outcome", "ResultRecord", "Check", "RunResult", "run", "evaluate_thresholds", "OUTPUT_ENV",
]
