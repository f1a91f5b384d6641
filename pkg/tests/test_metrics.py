import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tgexplain import (
    FidelityReport,
    ObjectiveWeights,
    alpha_fidelity,
    delta_fidelity,
    fidelity_minus,
    fidelity_plus,
    objective,
    sparsity,
)
from tgexplain.events import extract_computation_graph
from tgexplain.metrics import RATIO_CAP, full_report, subset_objective
from tgexplain.oracle import PredictionCache


@pytest.fixture
def cache(small_bench):
    cg = extract_computation_graph(
        small_bench.store, small_bench.target.id, 2
    )
    return PredictionCache(small_bench.oracle, small_bench.store, cg)


def planted_magnitude(bench):
    """Independent hand evaluation of the planted formula (no oracle calls)."""
    times = {e.id: e.timestamp for e in bench.store.events}
    t_k = bench.target.timestamp
    spec = bench.spec
    total = sum(w * math.exp(-(t_k - times[i]) / spec.tau) for i, w in spec.singletons)
    total += sum(
        w * math.exp(-(t_k - max(times[i], times[j])) / spec.tau)
        for (i, j), w in spec.pairs
    )
    return total


class TestFidelities:
    def test_full_subset_has_zero_error(self, cache):
        assert fidelity_minus(cache, cache.cg.candidate_ids) == 0.0

    def test_empty_subset_has_zero_fid_plus(self, cache):
        assert fidelity_plus(cache, frozenset()) == 0.0

    def test_planted_set_captures_all_signal(self, cache, small_bench):
        important = small_bench.truth.important_ids
        assert fidelity_minus(cache, important) == pytest.approx(0.0, abs=1e-12)
        assert fidelity_plus(cache, important) == pytest.approx(
            planted_magnitude(small_bench)
        )

    def test_empty_subset_misses_all_signal(self, cache, small_bench):
        assert fidelity_minus(cache, frozenset()) == pytest.approx(
            planted_magnitude(small_bench)
        )

    def test_zero_weight_event_changes_nothing(self, cache, small_bench):
        important = set(small_bench.truth.important_ids)
        spare = next(
            i for i in cache.cg.candidate_ids if i not in important
        )
        assert fidelity_minus(cache, important | {spare}) == fidelity_minus(
            cache, important
        )


class TestScalarMetrics:
    def test_delta_fidelity(self):
        assert delta_fidelity(4.0, 2.0) == 2.0
        assert delta_fidelity(3.0, 3.0) == 0.0
        assert delta_fidelity(0.0, 5.0) == -5.0

    @given(st.floats(0, 1e6), st.floats(0, 1e6))
    def test_delta_antisymmetric(self, a, b):
        assert delta_fidelity(a, b) == -delta_fidelity(b, a)

    def test_alpha_fidelity_values(self):
        assert alpha_fidelity(4.0, 2.0) == 2.0
        assert alpha_fidelity(0.5, 0.5) == 1.0
        assert alpha_fidelity(3.0, 0.0) == RATIO_CAP

    @given(st.floats(0, 1e12), st.floats(0, 1e12))
    def test_alpha_always_finite_capped(self, fp, fm):
        a = alpha_fidelity(fp, fm)
        assert 0.0 <= a <= RATIO_CAP
        assert math.isfinite(a)

    def test_alpha_rejects_negative(self):
        with pytest.raises(ValueError):
            alpha_fidelity(-1.0, 0.0)

    def test_sparsity(self):
        assert sparsity(20, 100) == pytest.approx(0.8)
        assert sparsity(7, 7) == 0.0
        assert sparsity(0, 7) == 1.0
        with pytest.raises(ValueError):
            sparsity(0, 0)
        with pytest.raises(ValueError):
            sparsity(8, 7)


def report(fp, fm, sp):
    return FidelityReport(
        fid_plus=fp,
        fid_minus=fm,
        delta_fid=delta_fidelity(fp, fm),
        alpha_fid=alpha_fidelity(fp, fm),
        sparsity=sp,
    )


class TestObjective:
    def test_stage1_reduces_to_error(self):
        w = ObjectiveWeights(error=1.0, ratio=0.0, sparsity=0.0)
        assert objective(report(1.0, 0.2, 0.5), w) == pytest.approx(0.2)

    def test_stage2_arithmetic(self):
        w = ObjectiveWeights(error=1.0, ratio=1.0, sparsity=0.0)
        assert objective(report(0.5, 0.1, 0.5), w) == pytest.approx(0.1 - 5.0)

    def test_stage3_arithmetic_at_cap(self):
        w = ObjectiveWeights(error=1.0, ratio=1.0, sparsity=0.1)
        assert objective(report(3.0, 0.0, 0.9), w) == pytest.approx(-1e8 - 0.09)

    def test_weights_validated(self):
        with pytest.raises(ValueError):
            ObjectiveWeights(error=0.0, ratio=0.0, sparsity=0.0)
        with pytest.raises(ValueError):
            ObjectiveWeights(error=-1.0)
        with pytest.raises(ValueError):
            ObjectiveWeights(sparsity=1.5)

    def test_error_only_ordering_matches_fidelity_minus(self, cache):
        # with ratio = sparsity = 0 the argmin ordering is by fid_minus,
        # for any positive error weight
        rng = np.random.default_rng(0)
        candidates = list(cache.cg.candidate_ids)
        subsets = [
            frozenset(rng.choice(candidates, size=4, replace=False).tolist())
            for _ in range(10)
        ]
        for scale in (1.0, 3.5):
            w = ObjectiveWeights(error=scale, ratio=0.0, sparsity=0.0)
            by_objective = sorted(subsets, key=lambda s: subset_objective(cache, s, w))
            by_fid = sorted(subsets, key=lambda s: fidelity_minus(cache, s))
            assert [fidelity_minus(cache, s) for s in by_objective] == [
                fidelity_minus(cache, s) for s in by_fid
            ]

    def test_subset_objective_matches_full_report(self, cache, small_bench):
        subset = frozenset(list(small_bench.truth.important_ids)[:3])
        for w in (
            ObjectiveWeights(1.0, 0.0, 0.0),
            ObjectiveWeights(1.0, 1.0, 0.0),
            ObjectiveWeights(1.0, 1.0, 0.3),
        ):
            assert subset_objective(cache, subset, w) == objective(
                full_report(cache, subset), w
            )
