"""Schedules and degrees-of-freedom analysis for shared-cache multi-antenna
coded caching in networks where users join and leave."""

from .cc_elevation import (
    DeliveryLedger,
    ElevatedTransmission,
    Phantom,
    ServingPlan,
    Stream,
    elevate,
    make_serving_plan,
    run_cc_step,
)
from .dof_analytics import (
    DofCurve,
    DofReport,
    closed_form_dof,
    optimize_eta_hat,
    remark_dof,
    verify_against_schedule,
)
from .errors import (
    DynCCError,
    InfeasibleAssignmentError,
    NoFeasibleDistributionError,
    ParameterError,
    SnapshotError,
    SuppressionBudgetError,
    UnsupportedRegimeError,
)
from .experiments import (
    ScenarioConfig,
    generate_lengths,
    simulate_dynamics,
    sweep_eta,
    sweep_sigma,
)
from .system_model import (
    ChurnEvent,
    NetworkSnapshot,
    SystemParams,
    apply_churn,
    assign_profile,
    build_placement_matrix,
    cache_contents,
)
from .uc_scheduler import run_uc_step, uc_dof
from .virtual_scheduler import assign_packets, generate_index_sets, lemma1_census

__version__ = "0.1.0"
