"""Observer-based event-triggered control: identification, design, simulation.

The package covers the full networked-control workflow for SISO-measured LTI
plants: realize a state-space model from input/output data, compute LQR and
observer gains through Riccati equations, derive the quadratic event-trigger
certificate, and simulate the closed loop with packet accounting, optional
transmission delay, and inter-event diagnostics.
"""

from .design import (
    DesignWeights,
    GainSet,
    LtiModel,
    NotObservableError,
    TriggerDesign,
    build_trigger_design,
    check_controllability,
    check_observability,
    design_gains,
    lqr_gain,
    observer_gain,
)
from .linalg import (
    NoConvergenceError,
    NotHurwitzError,
    NotStabilizableError,
    NumericsError,
    SingularError,
    solve_care,
    solve_lyapunov,
)
from .scenarios import (
    Scenario,
    ScenarioError,
    bundled_names,
    get_scenario,
    load_scenario_file,
    save_scenario,
)
from .simulate import (
    DivergedError,
    EventLog,
    MetricsReport,
    SimConfig,
    SimTrace,
    analytic_tau,
    metrics,
    sigma_sweep,
    simulate,
)
from .sysid import (
    ChirpSpec,
    DegenerateInputError,
    EraDataset,
    IdentifiedModel,
    SysIdError,
    c2d_tustin,
    d2c_tustin,
    gen_chirp,
    identify,
    validate_model,
)

__version__ = "0.1.0"

__all__ = [
    "ChirpSpec",
    "DegenerateInputError",
    "DesignWeights",
    "DivergedError",
    "EraDataset",
    "EventLog",
    "GainSet",
    "IdentifiedModel",
    "LtiModel",
    "MetricsReport",
    "NoConvergenceError",
    "NotHurwitzError",
    "NotObservableError",
    "NotStabilizableError",
    "NumericsError",
    "Scenario",
    "ScenarioError",
    "SimConfig",
    "SimTrace",
    "SingularError",
    "SysIdError",
    "TriggerDesign",
    "analytic_tau",
    "build_trigger_design",
    "bundled_names",
    "c2d_tustin",
    "check_controllability",
    "check_observability",
    "d2c_tustin",
    "design_gains",
    "gen_chirp",
    "get_scenario",
    "identify",
    "load_scenario_file",
    "lqr_gain",
    "metrics",
    "observer_gain",
    "save_scenario",
    "sigma_sweep",
    "simulate",
    "solve_care",
    "solve_lyapunov",
    "validate_model",
]
