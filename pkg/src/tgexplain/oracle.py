"""Black-box model contract and task-aware prediction distances.

The explainer only ever sees a model through `ModelOracle.predict`, which
answers: what would the model output for the target if the input graph
contained exactly this subset of events? Masked events are removed from
the input entirely, never zero-filled. Outputs are pre-activation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Protocol, runtime_checkable

import numpy as np

from .errors import OracleError
from .events import EventStore

ENTITY_BINARY = "entity-binary"
ENTITY_MULTICLASS = "entity-multiclass"
GRAPH_MULTICLASS = "graph-multiclass"
ENTITY_REGRESSION = "entity-regression"
GRAPH_REGRESSION = "graph-regression"

_KINDS = (
    ENTITY_BINARY,
    ENTITY_MULTICLASS,
    GRAPH_MULTICLASS,
    ENTITY_REGRESSION,
    GRAPH_REGRESSION,
)


@dataclass(frozen=True)
class TaskKind:
    """What the base model predicts: entity/graph level, class count or dim."""

    kind: str
    classes: Optional[int] = None
    dim: Optional[int] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown task kind {self.kind!r}")
        if self.kind in (ENTITY_MULTICLASS, GRAPH_MULTICLASS):
            if self.classes is None or self.classes < 2:
                raise ValueError("multiclass tasks need classes >= 2")
        if self.kind in (ENTITY_REGRESSION, GRAPH_REGRESSION):
            if self.dim is None or self.dim < 1:
                raise ValueError("regression tasks need dim >= 1")

    @property
    def graph_level(self) -> bool:
        return self.kind in (GRAPH_MULTICLASS, GRAPH_REGRESSION)

    @property
    def output_length(self) -> int:
        if self.kind == ENTITY_BINARY:
            return 1
        if self.kind in (ENTITY_MULTICLASS, GRAPH_MULTICLASS):
            return self.classes  # type: ignore[return-value]
        return self.dim  # type: ignore[return-value]

    def to_wire(self) -> dict:
        out = {"kind": self.kind}
        if self.classes is not None:
            out["classes"] = self.classes
        if self.dim is not None:
            out["dim"] = self.dim
        return out

    @classmethod
    def from_wire(cls, obj: dict) -> "TaskKind":
        return cls(
            kind=obj["kind"],
            classes=obj.get("classes"),
            dim=obj.get("dim"),
        )


@dataclass
class Prediction:
    """Pre-activation output vector; graph-level tasks carry per-node vectors."""

    task: TaskKind
    values: np.ndarray
    per_node: Optional[list[np.ndarray]] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ValueError("prediction values must be a 1-d vector")
        if len(self.values) != self.task.output_length:
            raise ValueError(
                f"{self.task.kind} prediction needs length "
                f"{self.task.output_length}, got {len(self.values)}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("prediction values must be finite")
        if self.task.graph_level:
            if not self.per_node:
                raise ValueError("graph-level predictions need per_node vectors")
            self.per_node = [np.asarray(v, dtype=float) for v in self.per_node]
            for v in self.per_node:
                if len(v) != self.task.output_length or not np.all(np.isfinite(v)):
                    raise ValueError("bad per-node vector")
        elif self.per_node:
            raise ValueError("entity-level predictions must not carry per_node")


@runtime_checkable
class ModelOracle(Protocol):
    """Behavioral contract of the explained black box.

    `predict` must be a pure function of (included ids, target id) for a
    fixed model. `reentrant` advertises whether concurrent calls are safe.
    """

    task: TaskKind
    reentrant: bool

    def predict(
        self,
        store: EventStore,
        included: Iterable[int],
        target_event_id: int,
    ) -> Prediction: ...


def prediction_distance(a: Prediction, b: Prediction) -> float:
    """Task-specific non-negative distance between two predictions.

    Binary uses the single explained logit; multiclass sums absolute logit
    errors over classes; regression sums absolute errors over dims; graph
    level variants average the per-node error over nodes.
    """
    if a.task != b.task:
        raise ValueError(f"task mismatch: {a.task} vs {b.task}")
    if a.task.graph_level:
        assert a.per_node is not None and b.per_node is not None
        if len(a.per_node) != len(b.per_node):
            raise ValueError("per-node length mismatch")
        errs = [
            float(np.sum(np.abs(x - y))) for x, y in zip(a.per_node, b.per_node)
        ]
        return float(np.mean(errs)) if errs else 0.0
    return float(np.sum(np.abs(a.values - b.values)))


class PredictionCache:
    """Memoizes oracle calls for one (store, target) instance.

    The reference prediction (full candidate set) is computed once and
    reused for every fidelity evaluation.
    """

    def __init__(self, oracle: ModelOracle, store: EventStore, cg):
        self.oracle = oracle
        self.store = store
        self.cg = cg
        self._memo: dict[frozenset, Prediction] = {}
        self.calls = 0

    def predict(self, included: Iterable[int]) -> Prediction:
        key = frozenset(included)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        self.calls += 1
        pred = self.oracle.predict(self.store, sorted(key), self.cg.target_event_id)
        self._memo[key] = pred
        return pred

    @property
    def reference(self) -> Prediction:
        return self.predict(self.cg.candidate_ids)
