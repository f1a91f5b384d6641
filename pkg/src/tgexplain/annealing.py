"""Multi-stage simulated annealing over event subsets.

Stage 1 minimizes pure prediction error with size-preserving swaps, stage 2
adds the fidelity-ratio reward, and stage 3 adds the sparsity reward and
unlocks size-changing moves. Each stage restarts the temperature and seeds
the next stage with its best-visited solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DataError, OracleError
from .events import ComputationGraph, EventStore
from .metrics import (
    FidelityReport,
    ObjectiveWeights,
    full_report,
    objective,
    subset_objective,
)
from .oracle import ModelOracle, PredictionCache

DEFAULT_MOVE_MIX = (0.4, 0.2, 0.4)  # remove, add, swap in stage 3


@dataclass(frozen=True)
class SearchConfig:
    """All annealing and objective hyperparameters for one search."""

    size: int = 20
    stages: int = 3
    iterations_per_stage: int = 500
    t0: float = 1.0
    cooling: float = 0.99
    sparsity_weight: float = 0.1
    seed: int = 0
    move_mix: tuple[float, float, float] = DEFAULT_MOVE_MIX

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("size must be >= 1")
        if self.stages not in (1, 2, 3):
            raise ValueError("stages must be 1, 2 or 3")
        if self.iterations_per_stage < 0:
            raise ValueError("iterations_per_stage must be >= 0")
        if not self.t0 > 0:
            raise ValueError("t0 must be > 0")
        if not 0 < self.cooling < 1:
            raise ValueError("cooling must lie in (0, 1)")
        if not 0.0 <= self.sparsity_weight <= 1.0:
            raise ValueError("sparsity weight must lie in [0, 1]")
        if len(self.move_mix) != 3 or any(p < 0 for p in self.move_mix):
            raise ValueError("move_mix needs three non-negative probabilities")
        if abs(sum(self.move_mix) - 1.0) > 1e-9:
            raise ValueError("move_mix must sum to 1")


@dataclass(frozen=True)
class TraceStep:
    iteration: int
    stage: int
    temperature: float
    proposed_objective: float
    accepted: bool
    size: int


@dataclass
class SearchTrace:
    steps: list[TraceStep] = field(default_factory=list)

    def extend(self, steps: Sequence[TraceStep]) -> None:
        self.steps.extend(steps)


@dataclass(frozen=True)
class Explanation:
    """A subset of the computation graph plus its quality report."""

    event_ids: tuple[int, ...]
    objective_value: float
    report: FidelityReport
    stage: int
    saturated: bool = False  # computation graph smaller than the requested size


def stage_weights(stage: int, sparsity_weight: float) -> ObjectiveWeights:
    """Objective weights of each search stage."""
    if stage == 1:
        return ObjectiveWeights(error=1.0, ratio=0.0, sparsity=0.0)
    if stage == 2:
        return ObjectiveWeights(error=1.0, ratio=1.0, sparsity=0.0)
    return ObjectiveWeights(error=1.0, ratio=1.0, sparsity=sparsity_weight)


def initial_solution(
    cg: ComputationGraph, size: int, rng: np.random.Generator
) -> frozenset:
    """Uniform random subset of exactly `size` candidates."""
    if not 1 <= size <= len(cg.candidate_ids):
        raise ValueError(
            f"size must lie in [1, {len(cg.candidate_ids)}], got {size}"
        )
    picked = rng.choice(len(cg.candidate_ids), size=size, replace=False)
    return frozenset(cg.candidate_ids[i] for i in picked)


def accept_probability(l_new: float, l_old: float, temperature: float) -> float:
    """1 when the proposal is not worse, otherwise exp(-|delta| / T).

    Very large deltas at low temperature underflow to 0, i.e. certain reject.
    """
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    if l_new <= l_old:
        return 1.0
    return math.exp(-abs(l_new - l_old) / temperature)


def propose_move(
    current: frozenset,
    cg: ComputationGraph,
    stage: int,
    rng: np.random.Generator,
    move_mix: tuple[float, float, float] = DEFAULT_MOVE_MIX,
) -> frozenset:
    """One neighborhood move.

    Stages 1-2 always swap one member for one non-member (size preserved).
    Stage 3 draws remove/add/swap from the move mix; infeasible move kinds
    (remove at size 1, add/swap with nothing excluded) are renormalized out.
    The result is always a valid non-empty subset.
    """
    members = sorted(current)
    excluded = sorted(set(cg.candidate_ids) - current)

    def swap() -> frozenset:
        if not excluded:
            return current
        out = members[rng.integers(len(members))]
        inc = excluded[rng.integers(len(excluded))]
        return (current - {out}) | {inc}

    if stage < 3:
        return swap()

    weights = [
        move_mix[0] if len(members) > 1 else 0.0,  # remove
        move_mix[1] if excluded else 0.0,  # add
        move_mix[2] if excluded else 0.0,  # swap
    ]
    total = sum(weights)
    if total == 0:
        return current
    draw = rng.random() * total
    if draw < weights[0]:
        out = members[rng.integers(len(members))]
        return current - {out}
    if draw < weights[0] + weights[1]:
        inc = excluded[rng.integers(len(excluded))]
        return current | {inc}
    return swap()


def run_stage(
    cache: PredictionCache,
    weights: ObjectiveWeights,
    config: SearchConfig,
    init: frozenset,
    rng: np.random.Generator,
    stage: int,
) -> tuple[frozenset, float, list[TraceStep]]:
    """One annealing stage; returns the best-visited solution, not the last.

    The temperature starts at t0 and is multiplied by the cooling rate each
    iteration. A worse proposal is accepted with probability exp(-|delta|/T).
    """
    current = frozenset(init)
    try:
        current_obj = subset_objective(cache, current, weights)
    except OracleError as exc:
        raise OracleError(f"stage {stage} init: {exc}") from exc
    best, best_obj = current, current_obj
    temperature = config.t0
    steps: list[TraceStep] = []
    for i in range(config.iterations_per_stage):
        proposal = propose_move(current, cache.cg, stage, rng, config.move_mix)
        try:
            prop_obj = subset_objective(cache, proposal, weights)
        except OracleError as exc:
            raise OracleError(f"stage {stage} iteration {i}: {exc}") from exc
        p = accept_probability(prop_obj, current_obj, temperature)
        accepted = p >= 1.0 or rng.random() < p
        if accepted:
            current, current_obj = proposal, prop_obj
        if prop_obj < best_obj:
            best, best_obj = proposal, prop_obj
        steps.append(
            TraceStep(
                iteration=i,
                stage=stage,
                temperature=temperature,
                proposed_objective=prop_obj,
                accepted=accepted,
                size=len(current),
            )
        )
        temperature *= config.cooling
    return best, best_obj, steps


def explain(
    store: EventStore,
    cg: ComputationGraph,
    oracle: ModelOracle,
    config: SearchConfig,
) -> tuple[Explanation, SearchTrace]:
    """Run the staged search and return the final explanation plus trace."""
    if len(cg.candidate_ids) == 0:
        raise DataError(
            f"target {cg.target_event_id}: computation graph has no candidates"
        )
    saturated = len(cg.candidate_ids) < config.size
    size = min(config.size, len(cg.candidate_ids))
    cache = PredictionCache(oracle, store, cg)
    rng = np.random.default_rng(config.seed)
    current = initial_solution(cg, size, rng)
    trace = SearchTrace()
    last_weights = stage_weights(1, config.sparsity_weight)
    for stage in range(1, config.stages + 1):
        last_weights = stage_weights(stage, config.sparsity_weight)
        current, _, steps = run_stage(
            cache, last_weights, config, current, rng, stage
        )
        trace.extend(steps)
    report = full_report(cache, current)
    explanation = Explanation(
        event_ids=tuple(sorted(current)),
        objective_value=objective(report, last_weights),
        report=report,
        stage=config.stages,
        saturated=saturated,
    )
    return explanation, trace
