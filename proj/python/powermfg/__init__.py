"""Energy-efficient power-control games.

Thin wrapper over the compiled core: efficiency families with their
operating-point analytics, the one-shot Nash equilibrium, battery/channel
dynamics, the single-player grid solver, the finite-population simulator,
and the mean-field equilibrium loop.
"""

from ._core import (  # noqa: F401
    Axis,
    ChannelMoments,
    ChannelPathSpec,
    ConfigError,
    ConsistencyReport,
    ConvergenceRow,
    Efficiency,
    ExistenceReport,
    FeedbackPolicy,
    GameParams,
    GridField,
    GridSpec,
    HamiltonianResult,
    MfgConfig,
    MfgSolution,
    NeResult,
    NumericalError,
    OffProbabilityRow,
    OUParams,
    Population,
    RunConfig,
    State,
    StaticProfile,
    Trajectory,
    TrajectorySlice,
    Vec2,
    __version__,
    best_response,
    common_population,
    config_hash,
    consistency_check,
    convergence_report,
    extract_policy,
    initial_density,
    load_config,
    make_efficiency,
    make_grid,
    mean_interference,
    off_probability,
    parse_config,
    serialize,
    simulate,
    simulate_channel_paths,
    sinr,
    solve_fpk,
    solve_mfg,
    solve_value,
    static_ne,
    stationary_density,
    stationary_population,
    step_state,
    step_state_exact,
    transient_moments,
    utility,
    validate,
)
