"""Fidelity metric family, sparsity, and the staged search objective.

Both fidelities are realized as non-negative prediction distances (the
absolute-error reading), which keeps the ratio metric well defined. The
objective rewards a high fidelity ratio, so its ratio term enters with a
negative sign and the whole objective is minimized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .oracle import PredictionCache, prediction_distance

#: Denominator floor and cap for the fidelity ratio. Keeps the ratio finite
#: and comparable when the explanation reproduces the reference exactly.
RATIO_FLOOR = 1e-8
RATIO_CAP = 1e8


@dataclass(frozen=True)
class ObjectiveWeights:
    """Weights of the three objective terms: error, fidelity ratio, sparsity."""

    error: float = 1.0
    ratio: float = 0.0
    sparsity: float = 0.0

    def __post_init__(self):
        if self.error < 0 or self.ratio < 0:
            raise ValueError("weights must be non-negative")
        if not 0.0 <= self.sparsity <= 1.0:
            raise ValueError("sparsity weight must lie in [0, 1]")
        if self.error == 0 and self.ratio == 0 and self.sparsity == 0:
            raise ValueError("at least one weight must be positive")


@dataclass(frozen=True)
class FidelityReport:
    """All explanation-quality numbers for one subset."""

    fid_plus: float
    fid_minus: float
    delta_fid: float
    alpha_fid: float
    sparsity: float

    @property
    def error(self) -> float:
        """The objective's error term coincides with fidelity-minus."""
        return self.fid_minus


def fidelity_minus(cache: PredictionCache, subset: Iterable[int]) -> float:
    """Distance between the reference prediction and the subset prediction."""
    return prediction_distance(cache.reference, cache.predict(subset))


def fidelity_plus(cache: PredictionCache, subset: Iterable[int]) -> float:
    """Distance between the reference prediction and the complement prediction."""
    complement = set(cache.cg.candidate_ids) - set(subset)
    return prediction_distance(cache.reference, cache.predict(complement))


def delta_fidelity(fid_plus: float, fid_minus: float) -> float:
    return fid_plus - fid_minus


def alpha_fidelity(fid_plus: float, fid_minus: float) -> float:
    """Ratio of the two fidelities, floored and capped for finiteness."""
    if fid_plus < 0 or fid_minus < 0:
        raise ValueError("fidelities must be non-negative")
    return min(fid_plus / max(fid_minus, RATIO_FLOOR), RATIO_CAP)


def sparsity(subset_size: int, cg_size: int) -> float:
    """Fraction of the computation graph excluded from the explanation."""
    if cg_size < 1:
        raise ValueError("computation graph must be non-empty")
    if not 0 <= subset_size <= cg_size:
        raise ValueError("subset size out of range")
    return 1.0 - subset_size / cg_size


def objective(report: FidelityReport, weights: ObjectiveWeights) -> float:
    """Search objective, minimized: error - ratio reward - sparsity reward."""
    return (
        weights.error * report.error
        - weights.ratio * report.alpha_fid
        - weights.sparsity * report.sparsity
    )


def subset_objective(
    cache: PredictionCache, subset: Iterable[int], weights: ObjectiveWeights
) -> float:
    """Objective for one subset, skipping the complement call when the
    ratio term carries no weight (stage 1 needs one oracle call, not two)."""
    subset = frozenset(subset)
    fm = fidelity_minus(cache, subset)
    value = weights.error * fm
    if weights.ratio > 0:
        fp = fidelity_plus(cache, subset)
        value -= weights.ratio * alpha_fidelity(fp, fm)
    if weights.sparsity > 0:
        value -= weights.sparsity * sparsity(len(subset), len(cache.cg))
    return value


def full_report(cache: PredictionCache, subset: Iterable[int]) -> FidelityReport:
    subset = frozenset(subset)
    fm = fidelity_minus(cache, subset)
    fp = fidelity_plus(cache, subset)
    return FidelityReport(
        fid_plus=fp,
        fid_minus=fm,
        delta_fid=delta_fidelity(fp, fm),
        alpha_fid=alpha_fidelity(fp, fm),
        sparsity=sparsity(len(subset), len(cache.cg)),
    )
