"""Capacity workbench for cooperative V2I/V2V data dissemination on a highway."""

__version__ = "0.1.0"

from .highway import (
    CycleGeometry,
    Direction,
    NetworkParams,
    ParameterError,
    Role,
    Snapshot,
    Vehicle,
    advance,
    cycle_geometry,
    cycles,
    load_params,
    sample_snapshot,
    vehicles_in,
)
from .analytic import (
    Bottleneck,
    CapacityBreakdown,
    cycle_capacity,
    directional_split,
    eta_max,
    expected_gap,
    expected_pair_count,
    exact_pair_count_oracle,
    gap_distribution,
    helper_fetch_rate,
    mgf_h,
    pdf_gap,
    pmf_m0,
    pmf_mk,
    total_capacity,
    v2i_voi_rate,
    v2v_unconstrained_rate,
)
from .scheduler import PairSchedule, empirical_pair_stats, max_pairs_oracle, select_pairs_opt
from .simulator import SimConfig, TrialStats, run_experiment, run_trial
