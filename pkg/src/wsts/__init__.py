"""Verification toolkit for well-structured transition systems."""

from .errors import (
    BudgetExceededError,
    ParseError,
    UnsupportedAnalysisError,
    UsageError,
    WstsError,
)
from .orders import (
    CHANNEL_ORDER,
    MARKING_ORDER,
    OMEGA,
    PREFIX_ORDER,
    VECTOR_ORDER,
    Configuration,
    MinBasis,
    Order,
    is_omega,
    leq_dickson,
    leq_omega,
    leq_prefix,
    leq_subword,
    minimize,
    product_leq,
)
from .models import (
    CounterInstruction,
    CounterMachine,
    LcsTransition,
    LossyChannelMachine,
    PcmModel,
    PcmTransition,
    VassModel,
    VassTransition,
    counter_machine_to_pcm,
    step_variables,
    vass_to_pcm,
)
from .analyses import (
    BoundednessResult,
    CoverabilityResult,
    KmResult,
    OracleResult,
    PumpWitness,
    RrtResult,
    TerminationResult,
    backward_coverability,
    bounded_forward_oracle,
    boundedness,
    build_rrt,
    control_state_reachability,
    karp_miller,
    km_to_dot,
    replay_witness,
    rrt_to_dot,
    termination,
)
from .abstraction import (
    AbstractionReport,
    SimulationResult,
    drop_zero_tests,
    lossy_abstraction,
    simulation_check_bounded,
    zero_tests_to_resets,
)
from .dsl import ParsedModel, model_to_dsl, parse_model, parse_target
from .reports import Query, Report, emit_report, run_query

__version__ = "0.1.0"
