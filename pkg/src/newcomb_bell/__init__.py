"""Bayesian and causal decision theory, Newcomb problems and the Bell game."""

from .bell_game import (
    Agent,
    BankrollLedger,
    Decision,
    GameConfig,
    Mechanism,
    Semantics,
    SessionRecord,
    bdt_decision,
    cdt_decision,
    chsh_statistic,
    fabricate_boxes,
    play_session,
    run_tournament,
)
from .causal_models import (
    Colour,
    DeterministicStrategy,
    HypothesisMixture,
    LHVModel,
    break_even_epsilon,
    check_no_signalling,
    check_statistical_independence,
    chsh_of_model,
    enumerate_deterministic,
    lhv_chsh_max,
    lhv_joint,
    mixture_causal_joint,
    mixture_chsh_bound,
    two_agent_causal_joint,
)
from .decision import (
    DecisionProblem,
    DependencyHypothesisSet,
    Prescription,
    Theory,
    causal_eu,
    causal_probability,
    evidential_decomposition_residual,
    evidential_eu,
    is_newcomb_type,
    prescribe,
    validate_screening,
)
from .prob import ConditionalTable, FiniteDistribution, expectation, mix, normalize
from .quantum import (
    CHSHConfiguration,
    MeasurementSetting,
    TwoQubitState,
    born_joint,
    correlator,
    phi_plus,
    tsirelson_config,
)
from .scenarios import (
    ScenarioSpec,
    marble_game_payoffs,
    million_box,
    newcomb_classic,
    smoking_gene,
)

__version__ = "0.1.0"
