"""Uplink cell-free massive MIMO Monte-Carlo simulator."""

from .channel import ChannelState, error_covariance, estimation_model, realize_block, sample_channel
from .combining import (
    ALL_KINDS,
    CENTRALIZED_KINDS,
    LOCAL_KINDS,
    CombinerSet,
    build_combiner,
    local_mmse,
    local_mr,
    local_rzf,
    local_zf,
    mmse_centralized,
    mr_centralized,
    rzf_centralized,
    zf_centralized,
)
from .costmodel import CostQuery, complexity, fronthaul
from .errors import (
    ConfigurationError,
    DegenerateCombinerError,
    MomentInconsistencyError,
    NumericDomainError,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    ResultRecord,
    compute_cdf,
    load_config,
    load_profile,
    percentile,
    run_experiment,
    sum_capacity,
    write_outputs,
)
from .performance import (
    DistributedMoments,
    SinrLinearization,
    centralized_sinr,
    distributed_linearization,
    distributed_sinr,
    estimate_distributed_moments,
    linearize_sinr,
    spectral_efficiency,
)
from .powercontrol import BisectionTrace, feasibility_check, maxmin_bisection, sinr_upper_bound
from .scenario import (
    NetworkConfig,
    PathlossParams,
    Scenario,
    assign_pilots,
    build_scenario,
    local_scattering_R,
    noise_power,
    pathloss_db,
)

__version__ = "0.1.0"
