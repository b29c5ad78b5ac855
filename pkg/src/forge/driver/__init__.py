"""Orchestration of the inference loop, the corpus runner and the CLI."""

from .run import (
    FAILURE,
    REPORT_SCHEMA,
    SUCCESS,
    TIMING_FIELDS,
    RunConfig,
    RunReport,
    WaveStats,
    run_dynamate,
)

__all__ = [
    "FAILURE",
    "REPORT_SCHEMA",
    "SUCCESS",
    "TIMING_FIELDS",
    "RunConfig",
    "RunReport",
    "WaveStats",
    "run_dynamate",
]
