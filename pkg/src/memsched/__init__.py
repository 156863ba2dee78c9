"""Deterministic simulator for bandwidth allocation to a constrained consumer.

Data chunks waiting to be transferred are modeled as linear-drift
memristors competing for a fixed bandwidth budget; allocation policies
divide the budget each step, freshness windows discard stale partial
transfers, and a tunable hybrid controller decides when to act on what
has arrived.
"""

from .engine import (
    ConfigError,
    EngineConfig,
    Schedule,
    StepRecord,
    Trace,
    completion_curve,
    makespan_oracle,
    run,
    trace_summary,
    trace_to_csv,
)
from .hybrid import (
    EMPTY_MODEL,
    ChunkStats,
    HybridConfig,
    LongTermModel,
    LookupRule,
    OverrideRule,
    classify,
    effective_importance,
    hybrid_schedule,
    reactive_step,
    resolve_action,
    update_model,
)
from .model import (
    FRESH,
    ChunkSpec,
    ChunkState,
    analytic_completion_time,
    apply_freshness_reset,
    memristance,
    step,
    transfer_rate,
    volt_time_need,
)
from .policies import (
    Allocation,
    Policy,
    allocate_all_sites,
    allocate_importance_leaf_cutter,
    allocate_leaf_cutter,
    allocate_sequential,
)
from .rng import SplitMix64, derive_seed

__version__ = "0.1.0"
