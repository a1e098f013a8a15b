import json

import numpy as np
import pytest

from testinj.citest import DatasetCITester
from testinj.dataset import BinaryDataset
from testinj.discovery import DiscoveryConfig, fci
from testinj.experiment import (
    DEFAULT_GRID,
    SCENARIO_NODES,
    SyntheticScm,
    alpha_sweep,
    demographic_columns,
    double_data,
    paper_scenario_generator,
    sample,
)
from testinj.graphs import BackgroundKnowledge, Dag, connected_nonisolated, emit_dot
from testinj.labeling import coarsen

BK = BackgroundKnowledge(roots=frozenset({"race", "gender", "age"}), leaves=frozenset({"is_testinj"}))


def two_coins():
    dag = Dag(["x", "y"], [])
    return SyntheticScm(dag=dag, parents={"x": (), "y": ()}, cpts={"x": {(): 0.5}, "y": {(): 0.5}})


# ---------------------------------------------------------------------------
# sampling


def test_sample_constant_node():
    scm = SyntheticScm(Dag(["x"], []), {"x": ()}, {"x": {(): 1.0}})
    data = sample(scm, 100, seed=0)
    assert data.column("x").sum() == 100


def test_sample_copy_cpt():
    scm = SyntheticScm(
        Dag(["a", "b"], [("a", "b")]),
        {"a": (), "b": ("a",)},
        {"a": {(): 0.5}, "b": {(0,): 0.0, (1,): 1.0}},
    )
    data = sample(scm, 5000, seed=3)
    assert np.array_equal(data.column("a"), data.column("b"))


def test_sample_independent_coins_uncorrelated():
    data = sample(two_coins(), 10000, seed=11)
    x = data.column("x").astype(float)
    y = data.column("y").astype(float)
    assert abs(np.corrcoef(x, y)[0, 1]) < 0.05


def test_sample_bit_reproducible():
    a = sample(two_coins(), 1000, seed=5)
    b = sample(two_coins(), 1000, seed=5)
    assert a == b
    assert a != sample(two_coins(), 1000, seed=6)


def test_sample_incomplete_cpt_rejected():
    scm = SyntheticScm(
        Dag(["a", "b"], [("a", "b")]),
        {"a": (), "b": ("a",)},
        {"a": {(): 0.5}, "b": {(0,): 0.2}},
    )
    with pytest.raises(ValueError):
        sample(scm, 10, seed=0)


def test_sample_n_validation():
    with pytest.raises(ValueError):
        sample(two_coins(), 0, seed=0)


# ---------------------------------------------------------------------------
# scenario generator


def test_scenario_structure():
    scm = paper_scenario_generator(1)
    assert tuple(sorted(scm.dag.nodes)) == tuple(sorted(SCENARIO_NODES))
    edges = set(scm.dag.edges())
    assert ("race", "evidentials") in edges
    assert ("race", "stigmatizing") in edges
    assert ("gender", "judgementals") in edges
    assert ("age", "judgementals") in edges
    assert ("evidentials", "negatives") in edges
    assert ("negatives", "stigmatizing") in edges
    assert {("evidentials", "is_testinj"), ("judgementals", "is_testinj"), ("stigmatizing", "is_testinj")} <= edges
    scm.validate()


def test_scenario_effect_ordering():
    scm = paper_scenario_generator(1)
    race_effect = scm.cpts["evidentials"][(1,)] - scm.cpts["evidentials"][(0,)]
    gender_effect = scm.cpts["judgementals"][(1, 0)] - scm.cpts["judgementals"][(0, 0)]
    age_effect = scm.cpts["judgementals"][(0, 1)] - scm.cpts["judgementals"][(0, 0)]
    assert race_effect > gender_effect > age_effect > 0


# ---------------------------------------------------------------------------
# doubling


def test_double_data_rows():
    data = BinaryDataset(("x",), np.array([[0], [1], [1], [0], [1]], dtype=np.uint8))
    doubled = double_data(data)
    assert doubled.n == 10
    assert np.array_equal(doubled.values[:5], data.values)
    assert np.array_equal(doubled.values[5:], data.values)


def test_double_data_preserves_proportions():
    data = sample(paper_scenario_generator(2), 3000, seed=2)
    doubled = double_data(data)
    for column in data.columns:
        assert doubled.column(column).mean() == data.column(column).mean()


def test_double_data_doubles_g2_exactly():
    data = sample(paper_scenario_generator(2), 2000, seed=2)
    doubled = double_data(data)
    base = DatasetCITester(data)
    dbl = DatasetCITester(doubled)
    cases = [
        ("race", "stigmatizing", ()),
        ("gender", "judgementals", ("age",)),
        ("evidentials", "is_testinj", ("judgementals", "stigmatizing")),
    ]
    for x, y, z in cases:
        s1, d1, p1 = base.result(x, y, z)
        s2, d2, p2 = dbl.result(x, y, z)
        assert d2 == d1
        assert abs(s2 - 2.0 * s1) <= 1e-12
        assert p2 <= p1


# ---------------------------------------------------------------------------
# alpha sweep


def test_sweep_grid_validation():
    data = sample(two_coins(), 100, seed=1)
    with pytest.raises(ValueError):
        alpha_sweep(data, grid=())
    with pytest.raises(ValueError):
        alpha_sweep(data, grid=(0.05, 0.01))


def test_sweep_independent_coins_nothing_connects():
    dag = Dag(["race", "is_testinj"], [])
    scm = SyntheticScm(dag, {"race": (), "is_testinj": ()}, {"race": {(): 0.5}, "is_testinj": {(): 0.5}})
    data = sample(scm, 10000, seed=8)
    result = alpha_sweep(data, grid=(0.001, 0.01, 0.05, 0.2), features=("race",))
    assert result.min_alpha["race"] is None


def test_sweep_singleton_grid_matches_direct_run():
    data = sample(paper_scenario_generator(3), 4000, seed=3)
    config = DiscoveryConfig(alpha=0.05)
    result = alpha_sweep(data, grid=(0.05,), config=config, bk=BK)
    direct, _ = fci(data, config, BK)
    assert emit_dot(result.graphs[0.05]) == emit_dot(direct)


def test_sweep_strong_pair_connects_at_single_point():
    dag = Dag(["race", "is_testinj"], [("race", "is_testinj")])
    scm = SyntheticScm(
        dag,
        {"race": (), "is_testinj": ("race",)},
        {"race": {(): 0.5}, "is_testinj": {(0,): 0.2, (1,): 0.8}},
    )
    data = sample(scm, 5000, seed=9)
    result = alpha_sweep(data, grid=(0.05,), features=("race",))
    assert result.min_alpha["race"] == 0.05
    assert result.reaches_outcome[0.05] == ("race",)


def test_sweep_scenario_ordering_one_seed():
    data = sample(paper_scenario_generator(1), 50000, seed=1)
    result = alpha_sweep(data, grid=DEFAULT_GRID, bk=BK)
    ordered = [result.min_alpha[f] for f in ("race", "gender", "age")]
    ranks = [DEFAULT_GRID.index(a) if a is not None else len(DEFAULT_GRID) for a in ordered]
    assert ranks[0] <= ranks[1] <= ranks[2]
    # age is the weakest link by construction: it must connect last
    assert ranks[2] >= max(ranks[0], ranks[1])
    assert result.min_alpha["race"] == DEFAULT_GRID[0]


def test_sweep_json_and_table():
    data = sample(paper_scenario_generator(4), 2000, seed=4)
    result = alpha_sweep(data, grid=(0.01, 0.05), bk=BK)
    payload = json.loads(result.to_json())
    assert payload["grid"] == [0.01, 0.05]
    assert len(payload["per_alpha"]) == 2
    table = result.table()
    assert "race" in table and "alpha" in table


def test_demographic_columns_detection():
    data = sample(paper_scenario_generator(5), 50, seed=5)
    assert demographic_columns(data) == ("race", "gender", "age")
    coarse = coarsen(data, ("race", "gender", "age"))
    assert demographic_columns(coarse) == ("is_marginalized",)


def test_coarse_discovery_has_no_fine_demographics():
    data = sample(paper_scenario_generator(6), 20000, seed=6)
    coarse = coarsen(data, ("race", "gender", "age"))
    bk = BackgroundKnowledge(roots=frozenset({"is_marginalized"}), leaves=frozenset({"is_testinj"}))
    graph, _ = fci(coarse, DiscoveryConfig(alpha=0.05), bk)
    assert "race" not in graph.nodes
    assert "gender" not in graph.nodes
    assert "age" not in graph.nodes
    assert connected_nonisolated(graph, "is_marginalized")
