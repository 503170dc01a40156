"""Exact uncertainty quantification for finite-state interactive agent trajectories."""

from .aggregate import (
    AggregatorSpec,
    TrajectoryReport,
    TurnUncertainty,
    exact_total,
    expected_report,
    gated_total,
    gating_extrema,
    intermediate_information_total,
    multistep,
    pointwise_report,
    process_reward_analogs,
    single_step,
)
from .classify import (
    AIRLINE_TAXONOMY,
    ActionCategory,
    ActionClass,
    ActionClassifier,
    EvidentialityRule,
    all_reducing_classifier,
    classify_action,
    in_reduction_set,
    is_evidential,
    none_reducing_classifier,
)
from .dist import Alphabet, Dist, Symbol
from .errors import (
    AgentUQError,
    ConfigurationError,
    EnumerationCapError,
    ParameterError,
    SchemaError,
    StructuralError,
    UsageError,
    ValidationError,
)
from .evaluate import (
    BoundSuiteResult,
    ConvergenceResult,
    DesideratumResult,
    bound_suite,
    desideratum_check,
    failure_auroc,
    mc_convergence,
    random_classifier,
)
from .measures import (
    JointTable,
    MeasureSpec,
    conditional_entropy,
    entropy,
    entropy_of_probs,
    information_content,
    informational_energy,
    kl_divergence,
    max_entropy,
    mixture_mutual_information,
    mutual_information,
    onicescu_correlation,
    pointwise_mutual_information,
    power_entropy,
    renyi_entropy,
    to_bits,
    tsallis_entropy,
)
from .scenario import (
    BUILTIN_SCENARIOS,
    RandomSystemSpec,
    builtin_deterministic_chain,
    builtin_mini_booking,
    builtin_scenario,
    builtin_uniform_binary_2turn,
    generate_random_system,
    load_scenario,
    save_scenario,
    serialize_scenario,
    system_from_dict,
)
from .simulate import (
    Trajectory,
    TurnEvent,
    apply_react_constraint,
    enumerate_trajectories,
    sample_trajectories,
    sample_trajectory,
    trajectory_log_prob,
)
from .system import AgentSystem, EnvState, RewardTable

__version__ = "0.1.0"
