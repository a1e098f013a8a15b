"""Experimental procedures: the alpha sweep over discovery runs, the
data-doubling comparison, and the synthetic structural-model generator used
to validate the pipeline against a known ground truth.

The bundled validation scenario wires three binary demographic indicators
into the four term categories and the outcome with effect strengths ordered
race > gender > age, so sweeps over sampled data should connect race at the
smallest significance level and age at the largest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product

import numpy as np

from .citest import AlphaCISource, DatasetCITester
from .dataset import BinaryDataset
from .discovery import DiscoveryConfig, fci, pc
from .graphs import BackgroundKnowledge, Dag, MixedGraph, connected_nonisolated, graph_to_json
from .rng import Xoshiro256

__all__ = [
    "AlphaSweepResult",
    "DEFAULT_GRID",
    "SCENARIO_NODES",
    "SyntheticScm",
    "alpha_sweep",
    "demographic_columns",
    "double_data",
    "paper_scenario_generator",
    "sample",
]

# every significance level discussed alongside the default working points
DEFAULT_GRID = (0.001, 0.005, 0.01, 0.02, 0.05, 0.08, 0.12, 0.2, 0.3, 0.4, 0.5, 0.57, 0.6)

DEMOGRAPHIC_CANDIDATES = (
    "race",
    "gender",
    "age",
    "is_marginalized_race",
    "is_marginalized_gender",
    "is_marginalized_age",
    "is_marginalized",
)

OUTCOME = "is_testinj"


@dataclass(frozen=True)
class SyntheticScm:
    """A DAG over named binary nodes plus one P(node=1 | parents) table per
    node, keyed by parent-value assignments in ``parents`` order."""

    dag: Dag
    parents: dict  # node -> tuple of parent names (CPT key order)
    cpts: dict  # node -> {assignment tuple: probability}
    seed: int = 0

    def validate(self):
        for node in self.dag.nodes:
            ps = self.parents[node]
            table = self.cpts[node]
            for assignment in product((0, 1), repeat=len(ps)):
                if assignment not in table:
                    raise ValueError(f"CPT for {node!r} missing assignment {assignment}")
            for probability in table.values():
                if not 0.0 <= probability <= 1.0:
                    raise ValueError(f"CPT for {node!r} has probability outside [0, 1]")


def sample(scm: SyntheticScm, n: int, seed: int | None = None) -> BinaryDataset:
    """Ancestral sampling with the pinned xoshiro256** stream.

    Nodes are sampled in topological order (ties broken lexicographically);
    each node consumes n uniforms, row by row.  Bit-reproducible for a given
    (scm, n, seed).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    scm.validate()
    rng = Xoshiro256(scm.seed if seed is None else seed)
    order = scm.dag.topological_order()
    values: dict[str, np.ndarray] = {}
    for node in order:
        uniforms = np.array(rng.floats(n))
        parent_names = scm.parents[node]
        table = scm.cpts[node]
        if not parent_names:
            threshold = table[()]
            values[node] = (uniforms < threshold).astype(np.uint8)
        else:
            lookup = np.empty(1 << len(parent_names))
            for assignment, probability in table.items():
                code = 0
                for bit in assignment:
                    code = (code << 1) | bit
                lookup[code] = probability
            codes = np.zeros(n, dtype=np.int64)
            for parent in parent_names:
                codes = (codes << 1) | values[parent]
            values[node] = (uniforms < lookup[codes]).astype(np.uint8)
    columns = {node: values[node] for node in sorted(scm.dag.nodes)}
    return BinaryDataset.from_columns(columns)


SCENARIO_NODES = (
    "race",
    "gender",
    "age",
    "evidentials",
    "judgementals",
    "negatives",
    "stigmatizing",
    "is_testinj",
)


def paper_scenario_generator(seed: int = 0) -> SyntheticScm:
    """The fixed eight-node validation scenario.

    race feeds evidentials and stigmatizing strongly; gender feeds
    judgementals strongly; age feeds judgementals weakly; evidentials feed
    negatives feed stigmatizing; evidentials, judgementals and stigmatizing
    jointly raise the outcome (noisy OR).
    """
    edges = [
        ("race", "evidentials"),
        ("race", "stigmatizing"),
        ("gender", "judgementals"),
        ("age", "judgementals"),
        ("evidentials", "negatives"),
        ("negatives", "stigmatizing"),
        ("evidentials", "is_testinj"),
        ("judgementals", "is_testinj"),
        ("stigmatizing", "is_testinj"),
    ]
    dag = Dag(SCENARIO_NODES, edges)
    parents = {
        "race": (),
        "gender": (),
        "age": (),
        "evidentials": ("race",),
        "judgementals": ("gender", "age"),
        "negatives": ("evidentials",),
        "stigmatizing": ("race", "negatives"),
        "is_testinj": ("evidentials", "judgementals", "stigmatizing"),
    }

    def bernoulli(p):
        return {(): p}

    def from_fn(names, fn):
        return {a: fn(*a) for a in product((0, 1), repeat=len(names))}

    cpts = {
        "race": bernoulli(0.35),
        "gender": bernoulli(0.50),
        "age": bernoulli(0.40),
        "evidentials": from_fn(("race",), lambda r: 0.20 + 0.40 * r),
        # the age coefficient is deliberately tiny: its link should only
        # become detectable late in an alpha sweep at n around 50k
        "judgementals": from_fn(("gender", "age"), lambda g, a: 0.15 + 0.28 * g + 0.010 * a),
        "negatives": from_fn(("evidentials",), lambda e: 0.10 + 0.35 * e),
        "stigmatizing": from_fn(("race", "negatives"), lambda r, n: 0.08 + 0.30 * r + 0.22 * n),
        "is_testinj": from_fn(
            ("evidentials", "judgementals", "stigmatizing"),
            lambda e, j, s: 1.0 - 0.97 * (1.0 - 0.30 * e) * (1.0 - 0.45 * j) * (1.0 - 0.45 * s),
        ),
    }
    scm = SyntheticScm(dag=dag, parents=parents, cpts=cpts, seed=seed)
    scm.validate()
    return scm


def double_data(dataset: BinaryDataset) -> BinaryDataset:
    """Duplicate every row once: original block first, copy second."""
    return BinaryDataset(dataset.columns, np.vstack([dataset.values, dataset.values]))


def demographic_columns(dataset: BinaryDataset) -> tuple[str, ...]:
    return tuple(c for c in DEMOGRAPHIC_CANDIDATES if c in dataset.columns)


@dataclass
class AlphaSweepResult:
    grid: tuple[float, ...]
    features: tuple[str, ...]
    outcome: str
    graphs: dict  # alpha -> MixedGraph
    reports: dict  # alpha -> RunReport
    connected: dict  # alpha -> tuple of non-isolated features
    reaches_outcome: dict  # alpha -> tuple of features with a path to the outcome
    min_alpha: dict  # feature -> smallest scanned alpha at which connected, or None

    def to_json(self) -> str:
        payload = {
            "grid": list(self.grid),
            "features": list(self.features),
            "outcome": self.outcome,
            "per_alpha": [
                {
                    "alpha": alpha,
                    "connected": list(self.connected[alpha]),
                    "reaches_outcome": list(self.reaches_outcome[alpha]),
                    "graph": json.loads(graph_to_json(self.graphs[alpha])),
                    "report": self.reports[alpha].to_dict(),
                }
                for alpha in self.grid
            ],
            "min_alpha": {f: self.min_alpha[f] for f in self.features},
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        """Human-readable connectivity table."""
        width = max(len(f) for f in self.features) if self.features else 7
        lines = ["alpha     " + "  ".join(f.ljust(width) for f in self.features)]
        for alpha in self.grid:
            row = [f"{alpha:<8g}"]
            for feature in self.features:
                row.append(("+" if feature in self.connected[alpha] else ".").ljust(width))
            lines.append("  ".join(row))
        summary = ", ".join(
            f"{f}: {self.min_alpha[f] if self.min_alpha[f] is not None else 'never'}" for f in self.features
        )
        lines.append(f"first connected at: {summary}")
        return "\n".join(lines) + "\n"


def _has_path(graph: MixedGraph, src: str, dst: str) -> bool:
    if src == dst:
        return True
    stack = [src]
    seen = {src}
    while stack:
        cur = stack.pop()
        for nxt in graph.adjacent(cur):
            if nxt == dst:
                return True
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return False


def alpha_sweep(
    dataset: BinaryDataset,
    grid=DEFAULT_GRID,
    config: DiscoveryConfig | None = None,
    bk: BackgroundKnowledge | None = None,
    features=None,
    outcome: str = OUTCOME,
) -> AlphaSweepResult:
    """Run discovery at each grid point and track which demographic features
    joined the graph (non-isolated) and which reach the outcome.

    Statistics are cached across grid points: only the verdicts depend on
    alpha.
    """
    grid = tuple(grid)
    if not grid or list(grid) != sorted(set(grid)):
        raise ValueError("grid must be non-empty and strictly ascending")
    config = config or DiscoveryConfig()
    if features is None:
        features = demographic_columns(dataset)
    features = tuple(features)
    for feature in features:
        dataset.column(feature)  # raises on unknown column

    tester = DatasetCITester(dataset, config.statistic)
    algorithm = pc if config.algorithm == "pc" else fci
    graphs, reports, connected, reaches = {}, {}, {}, {}
    for alpha in grid:
        source = AlphaCISource(tester, alpha)
        graph, report = algorithm(source, config, bk, variables=dataset.columns)
        graphs[alpha] = graph
        reports[alpha] = report
        connected[alpha] = tuple(f for f in features if connected_nonisolated(graph, f))
        if outcome in graph.nodes:
            reaches[alpha] = tuple(f for f in connected[alpha] if _has_path(graph, f, outcome))
        else:
            reaches[alpha] = ()
    min_alpha = {}
    for feature in features:
        hits = [alpha for alpha in grid if feature in connected[alpha]]
        min_alpha[feature] = hits[0] if hits else None
    return AlphaSweepResult(
        grid=grid,
        features=features,
        outcome=outcome,
        graphs=graphs,
        reports=reports,
        connected=connected,
        reaches_outcome=reaches,
        min_alpha=min_alpha,
    )
