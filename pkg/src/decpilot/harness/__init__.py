"""Experiment configs, the Monte Carlo sweep engine, results I/O and the CLI."""
from .config import CodeConfig, DecoderConfig, LinkConfig, config_from_dict, load_config
from .engine import rate_sweep, run_point, run_sweep
from .results import CSV_FIELDS, MetricRecord, emit_results, load_results, parse_csv, parse_jsonl

__all__ = [
    "CSV_FIELDS",
    "CodeConfig",
    "DecoderConfig",
    "LinkConfig",
    "MetricRecord",
    "config_from_dict",
    "emit_results",
    "load_config",
    "load_results",
    "parse_csv",
    "parse_jsonl",
    "rate_sweep",
    "run_point",
    "run_sweep",
]
