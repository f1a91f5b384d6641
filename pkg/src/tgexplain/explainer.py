"""Estimator-style front end so the search composes with sklearn tooling."""

from __future__ import annotations

from typing import Optional

from sklearn.base import BaseEstimator

from .annealing import (
    DEFAULT_MOVE_MIX,
    Explanation,
    SearchConfig,
    SearchTrace,
    explain,
)
from .errors import DataError
from .events import EventStore, extract_computation_graph
from .oracle import ModelOracle


class AnnealingExplainer(BaseEstimator):
    """Explains single predictions of a black-box temporal-graph model.

    fit() binds an event store and a model oracle; explain() searches the
    target's computation graph for the event subset that best reproduces
    the model's prediction. Hyperparameters follow sklearn conventions
    (settable via set_params, inspectable via get_params).
    """

    def __init__(
        self,
        hops: int = 2,
        size: int = 20,
        stages: int = 3,
        sparsity_weight: float = 0.1,
        iterations: int = 500,
        t0: float = 1.0,
        cooling: float = 0.99,
        seed: int = 0,
        move_mix: tuple[float, float, float] = DEFAULT_MOVE_MIX,
    ):
        self.hops = hops
        self.size = size
        self.stages = stages
        self.sparsity_weight = sparsity_weight
        self.iterations = iterations
        self.t0 = t0
        self.cooling = cooling
        self.seed = seed
        self.move_mix = move_mix

    def _config(self, seed: Optional[int] = None) -> SearchConfig:
        return SearchConfig(
            size=self.size,
            stages=self.stages,
            iterations_per_stage=self.iterations,
            t0=self.t0,
            cooling=self.cooling,
            sparsity_weight=self.sparsity_weight,
            seed=self.seed if seed is None else seed,
            move_mix=tuple(self.move_mix),
        )

    def fit(self, store: EventStore, oracle: ModelOracle) -> "AnnealingExplainer":
        if not isinstance(store, EventStore):
            raise TypeError("store must be an EventStore")
        if not hasattr(oracle, "predict") or not hasattr(oracle, "task"):
            raise TypeError("oracle must implement the ModelOracle contract")
        self._config()  # validates hyperparameters eagerly
        if self.hops < 1:
            raise ValueError("hops must be >= 1")
        self.store_ = store
        self.oracle_ = oracle
        return self

    def explain(
        self, target_event_id: int, seed: Optional[int] = None
    ) -> Explanation:
        explanation, _ = self.explain_with_trace(target_event_id, seed=seed)
        return explanation

    def explain_with_trace(
        self, target_event_id: int, seed: Optional[int] = None
    ) -> tuple[Explanation, SearchTrace]:
        if not hasattr(self, "store_"):
            raise DataError("explainer is not fitted; call fit(store, oracle) first")
        cg = extract_computation_graph(self.store_, target_event_id, self.hops)
        return explain(self.store_, cg, self.oracle_, self._config(seed))
