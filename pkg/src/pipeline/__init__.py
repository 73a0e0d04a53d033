"""Orchestration of full runs, the naive baseline and the benchmark."""

from src.pipeline.bench import BenchResult, bench, make_pair, mutate
from src.pipeline.pipeline import (
    REPORT_SCHEMA,
    PartyOutcome,
    PipelineError,
    RunReport,
    estimate_labels,
    load_text,
    party_main,
    resolve_params,
    run_edm,
    strip_fasta,
)

__all__ = [
    "REPORT_SCHEMA",
    "BenchResult",
    "PartyOutcome",
    "PipelineError",
    "RunReport",
    "bench",
    "estimate_labels",
    "load_text",
    "make_pair",
    "mutate",
    "party_main",
    "resolve_params",
    "run_edm",
    "strip_fasta",
]
