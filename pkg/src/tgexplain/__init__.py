"""Explain black-box continuous-time dynamic-graph model predictions by
searching for the event subset that best reproduces the prediction."""

from .annealing import (
    Explanation,
    SearchConfig,
    SearchTrace,
    accept_probability,
    explain,
    initial_solution,
    propose_move,
    run_stage,
)
from .errors import BridgeError, DataError, OracleError, TgExplainError
from .events import (
    ComputationGraph,
    Event,
    EventStore,
    extract_computation_graph,
    load_events,
)
from .explainer import AnnealingExplainer
from .metrics import (
    FidelityReport,
    ObjectiveWeights,
    alpha_fidelity,
    delta_fidelity,
    fidelity_minus,
    fidelity_plus,
    objective,
    sparsity,
)
from .oracle import ModelOracle, Prediction, PredictionCache, TaskKind, prediction_distance
from .synthetic import (
    GroundTruth,
    PlantedOracle,
    PlantedSpec,
    build,
    generate,
    planted_predict,
    recovery_score,
)

__version__ = "0.1.0"

__all__ = [
    "AnnealingExplainer",
    "BridgeError",
    "ComputationGraph",
    "DataError",
    "Event",
    "EventStore",
    "Explanation",
    "FidelityReport",
    "GroundTruth",
    "ModelOracle",
    "ObjectiveWeights",
    "OracleError",
    "PlantedOracle",
    "PlantedSpec",
    "Prediction",
    "PredictionCache",
    "SearchConfig",
    "SearchTrace",
    "TaskKind",
    "TgExplainError",
    "accept_probability",
    "alpha_fidelity",
    "build",
    "delta_fidelity",
    "explain",
    "extract_computation_graph",
    "fidelity_minus",
    "fidelity_plus",
    "generate",
    "initial_solution",
    "load_events",
    "objective",
    "planted_predict",
    "prediction_distance",
    "propose_move",
    "recovery_score",
    "run_stage",
    "sparsity",
]
