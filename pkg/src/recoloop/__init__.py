"""Simulator of link-recommendation feedback loops on directed bi-populated networks."""

__version__ = "0.1.0"

SCHEMA_VERSION = "1"

from .graph import DirectedGraph, GroupLabel
from .dpah import DpahParams, GenerationError, generate
from .recommenders import Recommender, ScoreVector, top_k
from .simulation import SimulationConfig, StepRecord, run, step
from .metrics import MetricsSnapshot, metrics_snapshot

__all__ = [
    "DirectedGraph",
    "GroupLabel",
    "DpahParams",
    "GenerationError",
    "generate",
    "Recommender",
    "ScoreVector",
    "top_k",
    "SimulationConfig",
    "StepRecord",
    "run",
    "step",
    "MetricsSnapshot",
    "metrics_snapshot",
    "SCHEMA_VERSION",
]
