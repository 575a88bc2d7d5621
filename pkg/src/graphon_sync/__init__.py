"""Coupled phase oscillators on graphon-sampled random networks.

Simulation of the sampled, averaged, and continuum oscillator systems;
closed-form synchronization bounds and their empirical validation; the exact
three-variable reduction of the homogeneous sinusoidal model; and a
deterministic Monte Carlo sweep engine with a CLI.
"""

from .dynamics import (
    CouplingSpec,
    PhaseField,
    ads_rhs,
    cds_rhs,
    custom_coupling,
    discretize_initial,
    interpolate,
    kuramoto,
    prepare_ads_rhs,
    prepare_cds_rhs,
    prepare_sds_rhs,
    sakaguchi,
    sds_rhs,
)
from .graphon import (
    DiscretizedGraphon,
    Graphon,
    SampledNetwork,
    constant_graphon,
    discretize,
    erdos_renyi,
    grid_graphon,
    is_connected,
    product_sine_graphon,
    sample_network,
    write_edge_list,
)
from .integrator import DivergenceError, IntegratorConfig, Trajectory, integrate
from .observables import (
    OrderParameter,
    SyncVerdict,
    linf_distance,
    order_parameter,
    phase_diameter,
    sync_verdict,
)
from .reduction import (
    FrameSolveError,
    ReducedState,
    ReducedTrajectory,
    ReductionFrame,
    SingularStateError,
    frame_vector_field,
    integrate_reduced,
    lyapunov_rate_residual,
    lyapunov_value,
    reconstruct,
    reconstruct_field,
    reduced_rhs,
    solve_initial_frame,
)
from .theory import (
    BoundParams,
    beta_threshold_p,
    connectivity_threshold,
    empirical_g,
    g_bar,
    max_beta_for,
    positive_system_bound,
    write_bound_curve,
)
from .experiments import (
    ConvergenceRow,
    ExperimentConfig,
    GridCell,
    TrialRecord,
    emit_csv,
    initial_profile,
    run_convergence_study,
    run_phase_diagram,
    run_trial,
)

__version__ = "0.1.0"
