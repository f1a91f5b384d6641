import pytest
from sklearn.base import clone

from tgexplain import AnnealingExplainer, DataError


def test_get_set_params_roundtrip():
    explainer = AnnealingExplainer(size=5, seed=7)
    params = explainer.get_params()
    assert params["size"] == 5
    assert params["seed"] == 7
    explainer.set_params(size=9)
    assert explainer.size == 9


def test_clone_preserves_params(small_bench):
    explainer = AnnealingExplainer(size=4, stages=2, iterations=100, seed=1)
    cloned = clone(explainer)
    assert cloned.get_params() == explainer.get_params()


def test_unfitted_explain_rejected():
    with pytest.raises(DataError, match="not fitted"):
        AnnealingExplainer().explain(0)


def test_fit_validates_inputs(small_bench):
    with pytest.raises(TypeError):
        AnnealingExplainer().fit("not a store", small_bench.oracle)
    with pytest.raises(TypeError):
        AnnealingExplainer().fit(small_bench.store, object())
    with pytest.raises(ValueError):
        AnnealingExplainer(hops=0).fit(small_bench.store, small_bench.oracle)


def test_end_to_end_matches_functional_api(small_bench):
    from tgexplain import SearchConfig, explain, extract_computation_graph

    explainer = AnnealingExplainer(
        hops=2, size=4, stages=2, iterations=200, seed=11
    ).fit(small_bench.store, small_bench.oracle)
    via_estimator = explainer.explain(small_bench.target.id)

    cg = extract_computation_graph(small_bench.store, small_bench.target.id, 2)
    config = SearchConfig(size=4, stages=2, iterations_per_stage=200, seed=11)
    via_function, _ = explain(small_bench.store, cg, small_bench.oracle, config)
    assert via_estimator == via_function


def test_seed_override(small_bench):
    explainer = AnnealingExplainer(size=4, stages=1, iterations=50, seed=0).fit(
        small_bench.store, small_bench.oracle
    )
    assert explainer.explain(small_bench.target.id, seed=5) == explainer.explain(
        small_bench.target.id, seed=5
    )
