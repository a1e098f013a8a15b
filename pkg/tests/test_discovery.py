import random
from itertools import combinations

from oracles import (
    all_dags,
    dag_latent_model,
    enumerate_mags,
    mag_model,
    mixed_to_cpdag_dict,
    mixed_to_pag_dict,
    pag_from_mags,
    query_list,
    random_dag,
    true_cpdag,
)
from testinj.citest import AlphaCISource, DatasetCITester
from testinj.dataset import BinaryDataset
from testinj.discovery import (
    DiscoveryConfig,
    OracleCISource,
    SepsetStore,
    fci,
    meek_rules,
    orient_v_structures,
    pc,
    possible_d_sep,
    skeleton,
)
from testinj.experiment import paper_scenario_generator, sample
from testinj.graphs import ARROW, CIRCLE, TAIL, BackgroundKnowledge, Dag, MixedGraph, emit_dot


def oracle(edges, nodes=("A", "B", "C")):
    return OracleCISource(Dag(nodes, edges))


class TableSource:
    """Independence source scripted from an explicit answer table."""

    def __init__(self, independencies):
        self.independencies = {(min(x, y), max(x, y), frozenset(z)) for x, y, z in independencies}

    def independent(self, x, y, z=()):
        return (min(x, y), max(x, y), frozenset(z)) in self.independencies


# ---------------------------------------------------------------------------
# skeleton


def test_skeleton_chain():
    g, sepsets = skeleton(["A", "B", "C"], oracle([("A", "B"), ("B", "C")]))
    assert g.skeleton_pairs() == [("A", "B"), ("B", "C")]
    assert sepsets.get("A", "C") == ("B",)


def test_skeleton_collider():
    g, sepsets = skeleton(["A", "B", "C"], oracle([("A", "B"), ("C", "B")]))
    assert g.skeleton_pairs() == [("A", "B"), ("B", "C")]
    assert sepsets.get("A", "C") == ()


def test_skeleton_independent_pair():
    g, sepsets = skeleton(["A", "B"], oracle([], nodes=("A", "B")))
    assert g.skeleton_pairs() == []
    assert sepsets.get("A", "B") == ()


def test_skeleton_all_circles():
    g, _ = skeleton(["A", "B", "C"], oracle([("A", "B"), ("B", "C")]))
    for a, b, mark_a, mark_b in g.edges():
        assert mark_a is CIRCLE and mark_b is CIRCLE


def test_skeleton_max_conditioning_size():
    config = DiscoveryConfig(max_conditioning_size=0)
    g, _ = skeleton(["A", "B", "C"], oracle([("A", "B"), ("B", "C")]), config)
    # A-C needs conditioning on B, which size 0 cannot provide
    assert ("A", "C") in g.skeleton_pairs()


# ---------------------------------------------------------------------------
# v-structures and Meek


def test_v_structures_collider_oracle():
    g, sepsets = skeleton(["A", "B", "C"], oracle([("A", "B"), ("C", "B")]))
    out = orient_v_structures(g, sepsets)
    assert out.mark_at("B", "A") is ARROW
    assert out.mark_at("B", "C") is ARROW
    assert out.mark_at("A", "B") is CIRCLE  # far ends untouched


def test_v_structures_chain_unchanged():
    g, sepsets = skeleton(["A", "B", "C"], oracle([("A", "B"), ("B", "C")]))
    out = orient_v_structures(g, sepsets)
    assert out == g


def test_v_structures_complete_graph_unchanged():
    g = MixedGraph(["A", "B", "C"])
    for a, b in combinations("ABC", 2):
        g.add_edge(a, b, CIRCLE, CIRCLE)
    out = orient_v_structures(g, SepsetStore())
    assert out == g


def test_v_structure_conflict_flagged_as_bidirected():
    # 4-cycle with sepset(a,c) = sepset(b,d) = {}: the two colliders at b
    # and c fight over the b-c edge
    source = TableSource([("a", "c", ()), ("b", "d", ())])
    g, report = pc(source, variables=["a", "b", "c", "d"])
    assert g.mark_at("b", "c") is ARROW
    assert g.mark_at("c", "b") is ARROW
    assert report.conflicts


def test_meek_rule_one():
    g = MixedGraph(["A", "B", "C"])
    g.add_edge("A", "B", TAIL, ARROW)
    g.add_edge("B", "C", TAIL, TAIL)
    out = meek_rules(g)
    assert out.is_directed("B", "C")


def test_meek_rule_two():
    g = MixedGraph(["A", "B", "C"])
    g.add_edge("A", "B", TAIL, ARROW)
    g.add_edge("B", "C", TAIL, ARROW)
    g.add_edge("A", "C", TAIL, TAIL)
    out = meek_rules(g)
    assert out.is_directed("A", "C")


def test_meek_undirected_tree_unchanged():
    g = MixedGraph(["A", "B", "C", "D"])
    for a, b in [("A", "B"), ("B", "C"), ("B", "D")]:
        g.add_edge(a, b, TAIL, TAIL)
    out = meek_rules(g)
    assert out == g


def test_meek_rule_three():
    # a - b, a - c, a - d, c -> b, d -> b, c/d nonadjacent  =>  a -> b
    g = MixedGraph(["a", "b", "c", "d"])
    g.add_edge("a", "b", TAIL, TAIL)
    g.add_edge("a", "c", TAIL, TAIL)
    g.add_edge("a", "d", TAIL, TAIL)
    g.add_edge("c", "b", TAIL, ARROW)
    g.add_edge("d", "b", TAIL, ARROW)
    out = meek_rules(g)
    assert out.is_directed("a", "b")


def test_meek_rule_four_kite():
    # a - b, a - c, a - d, d -> c -> b, b/d nonadjacent  =>  a -> b
    g = MixedGraph(["a", "b", "c", "d"])
    g.add_edge("a", "b", TAIL, TAIL)
    g.add_edge("a", "c", TAIL, TAIL)
    g.add_edge("a", "d", TAIL, TAIL)
    g.add_edge("d", "c", TAIL, ARROW)
    g.add_edge("c", "b", TAIL, ARROW)
    out = meek_rules(g)
    assert out.is_directed("a", "b")


# ---------------------------------------------------------------------------
# PC spec examples


def test_pc_chain_cpdag():
    g, _ = pc(Dag(["A", "B", "C"], [("A", "B"), ("B", "C")]))
    assert mixed_to_cpdag_dict(g) == {("A", "B"): "--", ("B", "C"): "--"}


def test_pc_collider_identified():
    g, _ = pc(Dag(["A", "B", "C"], [("A", "B"), ("C", "B")]))
    assert mixed_to_cpdag_dict(g) == {("A", "B"): "->", ("B", "C"): "<-"}


def test_pc_chain_with_background_knowledge_fully_oriented():
    bk = BackgroundKnowledge(roots=frozenset({"A"}), leaves=frozenset({"C"}))
    g, _ = pc(Dag(["A", "B", "C"], [("A", "B"), ("B", "C")]), bk=bk)
    assert g.is_directed("A", "B")
    assert g.is_directed("B", "C")


def test_pc_oracle_equals_cpdag_all_3_node_dags():
    nodes = ["a", "b", "c"]
    for edges in all_dags(nodes):
        g, _ = pc(Dag(nodes, edges))
        assert mixed_to_cpdag_dict(g) == true_cpdag(nodes, edges), f"edges={sorted(edges)}"


def test_pc_oracle_equals_cpdag_sample_4_node_dags():
    nodes = ["a", "b", "c", "d"]
    rng = random.Random(13)
    dags = all_dags(nodes)
    for edges in rng.sample(dags, 120):
        g, _ = pc(Dag(nodes, edges))
        assert mixed_to_cpdag_dict(g) == true_cpdag(nodes, edges), f"edges={sorted(edges)}"


# ---------------------------------------------------------------------------
# FCI spec examples


def test_fci_chain_pag():
    g, _ = fci(Dag(["A", "B", "C"], [("A", "B"), ("B", "C")]))
    assert mixed_to_pag_dict(g) == {
        ("A", "B"): (CIRCLE, CIRCLE),
        ("B", "C"): (CIRCLE, CIRCLE),
    }


def test_fci_collider_pag():
    g, _ = fci(Dag(["A", "B", "C"], [("A", "B"), ("C", "B")]))
    assert mixed_to_pag_dict(g) == {
        ("A", "B"): (CIRCLE, ARROW),
        ("B", "C"): (ARROW, CIRCLE),
    }


def test_fci_two_variables_latent_confounder():
    # A <- L -> B with L unobserved: the A-B edge cannot be removed
    dag = Dag(["A", "B", "L"], [("L", "A"), ("L", "B")])
    source = OracleCISource(dag)
    g, _ = fci(source, variables=["A", "B"])
    assert mixed_to_pag_dict(g) == {("A", "B"): (CIRCLE, CIRCLE)}


def test_fci_discriminating_path_case():
    # the classic discriminating-path graph: latent confounding between b
    # and d plus the chain through c requires the R4 orientation
    nodes = ["a", "b", "c", "d", "l"]
    edges = [("a", "b"), ("b", "c"), ("a", "c"), ("c", "d"), ("l", "b"), ("l", "d")]
    dag = Dag(nodes, edges)
    observed = ["a", "b", "c", "d"]
    g, _ = fci(OracleCISource(dag), variables=observed)
    queries = query_list(observed)
    model = dag_latent_model(nodes, edges, observed, queries)
    mags = [m for m in enumerate_mags(observed) if mag_model(m, queries) == model]
    assert mixed_to_pag_dict(g) == pag_from_mags(mags)


def test_fci_oracle_equals_pag_3_observed_1_latent_exhaustive():
    nodes = ["a", "b", "c", "l"]
    observed = ["a", "b", "c"]
    queries = query_list(observed)
    catalog = {}
    for mag in enumerate_mags(observed):
        catalog.setdefault(mag_model(mag, queries), []).append(mag)
    checked_models = {}
    for edges in all_dags(nodes):
        model = dag_latent_model(nodes, edges, observed, queries)
        if model in checked_models:
            continue
        g, _ = fci(OracleCISource(Dag(nodes, edges)), variables=observed)
        expected = pag_from_mags(catalog[model])
        checked_models[model] = True
        assert mixed_to_pag_dict(g) == expected, f"edges={sorted(edges)}"
    assert len(checked_models) > 5


def test_fci_adjacencies_match_pc_under_sufficiency():
    rng = random.Random(21)
    nodes = ["a", "b", "c", "d", "e"]
    for _ in range(40):
        edges = random_dag(nodes, rng)
        dag = Dag(nodes, edges)
        g_pc, _ = pc(dag)
        g_fci, _ = fci(dag)
        assert g_pc.skeleton_pairs() == g_fci.skeleton_pairs()


def test_possible_d_sep_collider_chain():
    # a o-> b <-o c, c o-o d: the walk a-b-c passes (b is a collider), but
    # a-b-c-d stops at c, which is neither a collider nor in a triangle
    g = MixedGraph(["a", "b", "c", "d"])
    g.add_edge("a", "b", CIRCLE, ARROW)
    g.add_edge("c", "b", CIRCLE, ARROW)
    g.add_edge("c", "d", CIRCLE, CIRCLE)
    assert possible_d_sep(g, "a") == ["b", "c"]
    assert possible_d_sep(g, "d") == ["c"]


def test_possible_d_sep_triangle_walks():
    g = MixedGraph(["a", "b", "c", "d"])
    for x, y in [("a", "b"), ("b", "c"), ("a", "c"), ("c", "d")]:
        g.add_edge(x, y, CIRCLE, CIRCLE)
    # the walk a-b-c passes (triangle at b) but stops at c, whose walk
    # neighbours b and d are nonadjacent
    assert possible_d_sep(g, "a") == ["b", "c"]
    # from d, c blocks immediately for the same reason
    assert possible_d_sep(g, "d") == ["c"]


# ---------------------------------------------------------------------------
# dataset-driven properties


BK_SCENARIO = BackgroundKnowledge(
    roots=frozenset({"race", "gender", "age"}), leaves=frozenset({"is_testinj"})
)


def _scenario_dataset(seed, n=2000):
    return sample(paper_scenario_generator(seed), n, seed)


def test_skeleton_monotone_in_alpha_on_trace():
    data = _scenario_dataset(seed=3)
    tester = DatasetCITester(data)
    removed = {}
    for alpha in (0.01, 0.2):
        source = AlphaCISource(tester, alpha)
        g, sepsets = skeleton(sorted(data.columns), source)
        removed[alpha] = {pair for pair, _ in sepsets.items()}
        # every recorded removal is justified by its own trace entry
        for row in source.trace:
            if row.independent:
                assert row.p_value > alpha
    assert removed[0.2] <= removed[0.01]


def test_run_determinism():
    data = _scenario_dataset(seed=4)
    outputs = []
    for _ in range(2):
        g, report = fci(data, DiscoveryConfig(alpha=0.05), BK_SCENARIO)
        outputs.append((emit_dot(g), report.to_dict()))
    assert outputs[0] == outputs[1]


def test_run_recovers_three_node_chain_scm():
    from testinj.discovery import run
    from testinj.experiment import SyntheticScm

    scm = SyntheticScm(
        Dag(["gender", "judgementals", "is_testinj"], [("gender", "judgementals"), ("judgementals", "is_testinj")]),
        {"gender": (), "judgementals": ("gender",), "is_testinj": ("judgementals",)},
        {
            "gender": {(): 0.5},
            "judgementals": {(0,): 0.15, (1,): 0.75},
            "is_testinj": {(0,): 0.1, (1,): 0.8},
        },
    )
    data = sample(scm, 20000, seed=12)
    bk = BackgroundKnowledge(roots=frozenset({"gender"}), leaves=frozenset({"is_testinj"}))
    graph, _ = run(data, DiscoveryConfig(alpha=0.05, algorithm="fci"), bk)
    assert graph.is_directed("gender", "judgementals")
    assert graph.is_directed("judgementals", "is_testinj")


def test_run_dispatches_on_algorithm():
    from testinj.discovery import run

    data = _scenario_dataset(seed=5, n=1500)
    for algorithm, direct in (("pc", pc), ("fci", fci)):
        config = DiscoveryConfig(alpha=0.05, algorithm=algorithm)
        got, _ = run(data, config, BK_SCENARIO)
        want, _ = direct(data, config, BK_SCENARIO)
        assert got == want


def test_pearson_statistic_config():
    data = _scenario_dataset(seed=6, n=4000)
    g2_graph, _ = fci(data, DiscoveryConfig(alpha=0.05, statistic="g2"), BK_SCENARIO)
    chi2_graph, _ = fci(data, DiscoveryConfig(alpha=0.05, statistic="chi2"), BK_SCENARIO)
    # both statistics must find the strong ground-truth links at this n
    for a, b in [("gender", "judgementals"), ("race", "stigmatizing")]:
        assert g2_graph.has_edge(a, b)
        assert chi2_graph.has_edge(a, b)


def test_oracle_runs_have_no_conflicts():
    rng = random.Random(31)
    nodes = ["a", "b", "c", "d"]
    for _ in range(30):
        dag = Dag(nodes, random_dag(nodes, rng))
        _, report_pc = pc(dag)
        _, report_fci = fci(dag)
        assert report_pc.conflicts == []
        assert report_fci.conflicts == []
