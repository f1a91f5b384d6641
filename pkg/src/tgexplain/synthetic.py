"""Planted-ground-truth benchmark: transparent oracles with known answers.

The generated model is closed form: a bias, an exponentially time-decayed
weight per planted singleton event, a joint weight per planted pair that
activates only when both members are included (the dependency construct),
and a fixed tiny contribution per noise event. Because every term is known,
explanation quality can be scored against ground truth without a trained
deep model.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional

import numpy as np

from .errors import DataError, OracleError
from .events import Event, EventStore
from .oracle import ENTITY_REGRESSION, Prediction, TaskKind

REGRESSION_1D = TaskKind(kind=ENTITY_REGRESSION, dim=1)


@dataclass(frozen=True)
class PlantedSpec:
    """Recipe for one synthetic instance."""

    n_nodes: int
    n_events: int
    singletons: tuple[tuple[int, float], ...] = ()  # (event index, weight)
    pairs: tuple[tuple[tuple[int, int], float], ...] = ()  # ((i, j), joint weight)
    tau: float = 1e6
    bias: float = 1.0
    noise_scale: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_nodes < 3:
            raise DataError("need at least 3 nodes")
        if self.n_events < 1:
            raise DataError("need at least 1 event")
        if not self.tau > 0:
            raise DataError("tau must be > 0")
        if self.noise_scale < 0:
            raise DataError("noise_scale must be >= 0")
        planted = [i for i, _ in self.singletons]
        for (i, j), _ in self.pairs:
            if i == j:
                raise DataError("pair members must be distinct")
            planted.extend((i, j))
        if len(set(planted)) != len(planted):
            raise DataError("planted event indices must be distinct")
        if any(not 0 <= i < self.n_events for i in planted):
            raise DataError("planted event index out of range")

    @property
    def important_indices(self) -> frozenset:
        out = {i for i, _ in self.singletons}
        for (i, j), _ in self.pairs:
            out |= {i, j}
        return frozenset(out)


@dataclass(frozen=True)
class GroundTruth:
    important_ids: frozenset

    def __post_init__(self):
        if not self.important_ids:
            raise DataError("ground truth must be non-empty")


class PlantedOracle:
    """Closed-form oracle over precomputed per-event and per-pair terms.

    Pure and reentrant: noise contributions are fixed seeded draws, never
    fresh randomness, so predict is a function of the included set only.
    """

    task = REGRESSION_1D
    reentrant = True

    def __init__(
        self,
        bias: float,
        t_k: float,
        target_id: int,
        event_terms: dict[int, float],
        pair_terms: list[tuple[int, int, float]],
        attribute_dim: int = 0,
    ):
        self.bias = bias
        self.t_k = t_k
        self.target_id = target_id
        self.event_terms = dict(event_terms)
        self.pair_terms = list(pair_terms)
        self.attribute_dim = attribute_dim
        n = max(event_terms) + 1 if event_terms else 0
        self._terms = np.zeros(n)
        for eid, term in event_terms.items():
            self._terms[eid] = term

    def predict(
        self, store: Optional[EventStore], included: Iterable[int], target_event_id: int
    ) -> Prediction:
        ids = sorted(set(included))
        for eid in ids:
            if eid not in self.event_terms:
                raise OracleError(f"unknown event id {eid}")
        present = frozenset(ids)
        value = self.bias + float(np.sum(self._terms[ids]))
        for i, j, term in self.pair_terms:
            if i in present and j in present:
                value += term
        return Prediction(task=self.task, values=np.array([value]))

    def to_dict(self) -> dict:
        """Serializable exact model terms (for sidecar files and bridges)."""
        return {
            "bias": self.bias,
            "t_k": self.t_k,
            "target": self.target_id,
            "task": self.task.to_wire(),
            "attribute_dim": self.attribute_dim,
            "event_terms": {str(k): v for k, v in sorted(self.event_terms.items())},
            "pair_terms": [[i, j, t] for i, j, t in self.pair_terms],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "PlantedOracle":
        return cls(
            bias=obj["bias"],
            t_k=obj["t_k"],
            target_id=obj["target"],
            event_terms={int(k): v for k, v in obj["event_terms"].items()},
            pair_terms=[tuple(p) for p in obj["pair_terms"]],
            attribute_dim=obj.get("attribute_dim", 0),
        )

    @classmethod
    def from_file(cls, path) -> "PlantedOracle":
        try:
            with open(path) as fp:
                return cls.from_dict(json.load(fp))
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise DataError(f"bad planted model file {path}: {exc}") from None


@dataclass
class PlantedBenchmark:
    """Everything one synthetic instance provides."""

    spec: PlantedSpec
    store: EventStore
    target: Event
    truth: GroundTruth
    oracle: PlantedOracle


ATTR_DIM = 4
_TIME_SPAN = 100.0


def build(spec: PlantedSpec) -> PlantedBenchmark:
    """Generate the event stream, target event, ground truth, and oracle.

    All events are incident to one of the target's two nodes, so a hop
    count of 1 or more puts every event in the computation graph. The
    target event is appended last with id n_events.
    """
    rng = np.random.default_rng(spec.seed)
    times = np.sort(rng.uniform(0.0, _TIME_SPAN, size=spec.n_events))
    endpoints = rng.integers(0, 2, size=spec.n_events)
    others = rng.integers(2, spec.n_nodes, size=spec.n_events)
    attrs = rng.normal(size=(spec.n_events, ATTR_DIM))
    events = [
        Event(
            id=i,
            source=int(endpoints[i]),
            destination=int(others[i]),
            timestamp=float(times[i]),
            attributes=tuple(float(v) for v in attrs[i]),
        )
        for i in range(spec.n_events)
    ]
    t_k = _TIME_SPAN + 1.0
    target = Event(
        id=spec.n_events,
        source=0,
        destination=1,
        timestamp=t_k,
        attributes=(0.0,) * ATTR_DIM,
        label=1,
    )
    events.append(target)
    store = EventStore(events)

    event_terms = {i: 0.0 for i in range(spec.n_events)}
    for i, w in spec.singletons:
        event_terms[i] = w * math.exp(-(t_k - float(times[i])) / spec.tau)
    if spec.noise_scale > 0:
        noise_rng = np.random.default_rng(
            np.random.SeedSequence(entropy=spec.seed, spawn_key=(1,))
        )
        draws = noise_rng.uniform(-spec.noise_scale, spec.noise_scale, spec.n_events)
        for i in range(spec.n_events):
            if i not in spec.important_indices:
                event_terms[i] = float(draws[i])
    pair_terms = [
        (i, j, w * math.exp(-(t_k - max(float(times[i]), float(times[j]))) / spec.tau))
        for (i, j), w in spec.pairs
    ]
    oracle = PlantedOracle(
        bias=spec.bias,
        t_k=t_k,
        target_id=target.id,
        event_terms=event_terms,
        pair_terms=pair_terms,
        attribute_dim=ATTR_DIM,
    )
    truth = GroundTruth(important_ids=spec.important_indices)
    return PlantedBenchmark(
        spec=spec, store=store, target=target, truth=truth, oracle=oracle
    )


def generate(spec: PlantedSpec) -> tuple[EventStore, Event, GroundTruth]:
    bench = build(spec)
    return bench.store, bench.target, bench.truth


def planted_predict(
    spec: PlantedSpec, included: Iterable[int], t_k: Optional[float] = None
) -> Prediction:
    """Closed-form prediction for an included set under a spec.

    With t_k given, decays are re-evaluated at that time; otherwise the
    generated target time is used.
    """
    bench = build(spec)
    oracle = bench.oracle
    if t_k is not None and t_k != oracle.t_k:
        times = {e.id: e.timestamp for e in bench.store.events}
        event_terms = {i: 0.0 for i in range(spec.n_events)}
        for i, w in spec.singletons:
            event_terms[i] = w * math.exp(-(t_k - times[i]) / spec.tau)
        if spec.noise_scale > 0:
            for i in range(spec.n_events):
                if i not in spec.important_indices:
                    event_terms[i] = oracle.event_terms[i]
        pair_terms = [
            (i, j, w * math.exp(-(t_k - max(times[i], times[j])) / spec.tau))
            for (i, j), w in spec.pairs
        ]
        oracle = PlantedOracle(
            bias=spec.bias,
            t_k=t_k,
            target_id=bench.target.id,
            event_terms=event_terms,
            pair_terms=pair_terms,
            attribute_dim=ATTR_DIM,
        )
    return oracle.predict(None, included, oracle.target_id)


def recovery_score(
    explanation_ids: Iterable[int], truth: GroundTruth
) -> tuple[float, float]:
    """(precision, recall) of the explanation against the planted truth."""
    ids = set(explanation_ids)
    if not ids:
        raise DataError("empty explanation")
    hit = len(ids & truth.important_ids)
    return hit / len(ids), hit / len(truth.important_ids)


def write_truth_sidecar(bench: PlantedBenchmark, stream: IO[str]) -> None:
    """One-line ground-truth sidecar next to a generated dataset."""
    obj = {
        "important": sorted(bench.truth.important_ids),
        "pairs": [[i, j] for (i, j), _ in bench.spec.pairs],
        "bias": bench.spec.bias,
        "tau": bench.spec.tau,
    }
    stream.write(json.dumps(obj) + "\n")
