"""Constraint-based structure learning: PC (CPDAG output) and FCI (PAG
output) over a binary dataset or a d-separation oracle.

Everything is deterministic: edges, conditioning subsets and orientation
rules are all visited in lexicographic order, so two runs over the same
input produce identical graphs, sepsets and traces.  Orientation conflicts
on finite data never raise; they are recorded in the run report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .citest import AlphaCISource, DatasetCITester
from .dataset import BinaryDataset
from .graphs import (
    ARROW,
    CIRCLE,
    TAIL,
    BackgroundKnowledge,
    Dag,
    MixedGraph,
    apply_background_knowledge,
)

__all__ = [
    "DiscoveryConfig",
    "OracleCISource",
    "RunReport",
    "SepsetStore",
    "fci",
    "meek_rules",
    "orient_v_structures",
    "pc",
    "run",
    "skeleton",
]


@dataclass(frozen=True)
class DiscoveryConfig:
    alpha: float = 0.05
    algorithm: str = "fci"  # "pc" | "fci"
    max_conditioning_size: int | None = None
    max_pdsep_size: int | None = 4
    statistic: str = "g2"  # "g2" | "chi2"

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.algorithm not in ("pc", "fci"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")


class SepsetStore:
    """Separating sets found during skeleton search; a pair has an entry
    iff its edge was removed."""

    def __init__(self):
        self._sets: dict[tuple[str, str], tuple[str, ...]] = {}

    @staticmethod
    def _key(x, y):
        return (x, y) if x < y else (y, x)

    def record(self, x, y, z):
        self._sets[self._key(x, y)] = tuple(sorted(z))

    def get(self, x, y):
        return self._sets.get(self._key(x, y))

    def __contains__(self, pair):
        return self._key(*pair) in self._sets

    def __len__(self):
        return len(self._sets)

    def items(self):
        return sorted(self._sets.items())


class OracleCISource:
    """Independence source backed by d-separation in a known DAG."""

    def __init__(self, dag: Dag):
        self.dag = dag
        self._cache: dict = {}

    def independent(self, x, y, z=()) -> bool:
        key = (min(x, y), max(x, y), frozenset(z))
        hit = self._cache.get(key)
        if hit is None:
            hit = self.dag.d_separated(x, y, z)
            self._cache[key] = hit
        return hit


@dataclass
class RunReport:
    algorithm: str
    variables: tuple[str, ...]
    stages: dict = field(default_factory=dict)  # stage name -> edge count
    rule_firings: dict = field(default_factory=dict)
    conflicts: list = field(default_factory=list)
    sepsets: list = field(default_factory=list)

    def fired(self, rule: str):
        self.rule_firings[rule] = self.rule_firings.get(rule, 0) + 1

    def conflict(self, message: str):
        if message not in self.conflicts:
            self.conflicts.append(message)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "variables": list(self.variables),
            "stages": dict(self.stages),
            "rule_firings": dict(sorted(self.rule_firings.items())),
            "conflicts": list(self.conflicts),
            "sepsets": [[list(pair), list(z)] for pair, z in self.sepsets],
        }


def skeleton(variables, source, config: DiscoveryConfig | None = None):
    """Adjacency search: start complete, grow the conditioning size k and
    remove an edge as soon as some size-k subset of either endpoint's
    current neighbourhood separates it.  Returns the all-circle skeleton
    and the sepset store."""
    config = config or DiscoveryConfig()
    variables = sorted(variables)
    if len(variables) < 2:
        raise ValueError("need at least 2 variables")
    g = MixedGraph(variables)
    for x, y in combinations(variables, 2):
        g.add_edge(x, y, CIRCLE, CIRCLE)
    sepsets = SepsetStore()
    k = 0
    while True:
        if config.max_conditioning_size is not None and k > config.max_conditioning_size:
            break
        any_big_enough = False
        for x, y in g.skeleton_pairs():
            adj_x = [v for v in g.adjacent(x) if v != y]
            adj_y = [v for v in g.adjacent(y) if v != x]
            if len(adj_x) < k and len(adj_y) < k:
                continue
            any_big_enough = True
            tried = set()
            found = None
            for candidates in (adj_x, adj_y):
                if len(candidates) < k:
                    continue
                for z in combinations(candidates, k):
                    if z in tried:
                        continue
                    tried.add(z)
                    if source.independent(x, y, z):
                        found = z
                        break
                if found is not None:
                    break
            if found is not None:
                g.remove_edge(x, y)
                sepsets.record(x, y, found)
        if not any_big_enough:
            break
        k += 1
    return g, sepsets


def _place_arrow(g, frm, at, bk, report, rule) -> bool:
    """Put an arrowhead at ``at`` on the edge (frm, at); tails flip to
    arrows only in the v-structure phase (rule "v"), where the collision is
    kept as a bidirected edge and flagged."""
    if bk is not None and bk.forbids_arrow_at(at, frm):
        if report:
            report.conflict(f"{rule}: arrow at {at} on {frm}-{at} forbidden by background knowledge")
        return False
    current = g.mark_at(at, frm)
    if current is ARROW:
        return False
    if current is TAIL:
        if rule != "v":
            if report:
                report.conflict(f"{rule}: arrow at {at} on {frm}-{at} collides with tail")
            return False
        # directing an undirected (tail-tail) edge is the normal PC case;
        # only an arrow already at the far end makes this a collision
        if g.mark_at(frm, at) is ARROW and report:
            report.conflict(f"v-structure collision leaves {frm}-{at} bidirected")
    g.set_mark_at(at, frm, ARROW)
    if report:
        report.fired(rule)
    return True


def _place_tail(g, at, other, bk, report, rule) -> bool:
    current = g.mark_at(at, other)
    if current is TAIL:
        return False
    if current is ARROW:
        if report:
            report.conflict(f"{rule}: tail at {at} on {at}-{other} collides with arrow")
        return False
    g.set_mark_at(at, other, TAIL)
    if report:
        report.fired(rule)
    return True


def _orient_directed(g, frm, to, bk, report, rule) -> bool:
    """Orient frm -> to (tail, arrow) if neither endpoint resists."""
    if bk is not None and bk.forbids_arrow_at(to, frm):
        if report:
            report.conflict(f"{rule}: {frm}->{to} forbidden by background knowledge")
        return False
    if g.mark_at(to, frm) is TAIL or g.mark_at(frm, to) is ARROW:
        if report:
            report.conflict(f"{rule}: cannot orient {frm}->{to} over fixed marks")
        return False
    changed = False
    if g.mark_at(to, frm) is not ARROW:
        g.set_mark_at(to, frm, ARROW)
        changed = True
    if g.mark_at(frm, to) is not TAIL:
        g.set_mark_at(frm, to, TAIL)
        changed = True
    if changed and report:
        report.fired(rule)
    return changed


def orient_v_structures(g: MixedGraph, sepsets: SepsetStore, bk=None, report=None) -> MixedGraph:
    """Orient every unshielded triple x - z - y with z outside sepset(x, y)
    as a collider by placing arrowheads at z.  Far endpoint marks are left
    alone (circles for FCI input, tails for a PC pattern)."""
    out = g.copy()
    for z in sorted(out.nodes):
        for x, y in combinations(out.adjacent(z), 2):
            if out.has_edge(x, y):
                continue
            sep = sepsets.get(x, y)
            if sep is None or z in sep:
                continue
            _place_arrow(out, x, z, bk, report, "v")
            _place_arrow(out, y, z, bk, report, "v")
    return out


# ---------------------------------------------------------------------------
# PC completion (Meek rules)


def _undirected(g, a, b):
    return g.has_edge(a, b) and g.mark_at(a, b) is TAIL and g.mark_at(b, a) is TAIL


def _has_directed_path(g, src, dst):
    stack = [src]
    seen = set()
    while stack:
        cur = stack.pop()
        if cur == dst:
            return True
        if cur in seen:
            continue
        seen.add(cur)
        stack.extend(v for v in g.adjacent(cur) if g.is_directed(cur, v))
    return False


def _meek_orient(g, a, b, bk, report, rule) -> bool:
    """Direct the undirected edge a - b as a -> b, refusing orientations
    that would create a directed cycle or a fresh unshielded collider."""
    if bk is not None and bk.forbids_arrow_at(b, a):
        report.conflict(f"{rule}: {a}->{b} forbidden by background knowledge")
        return False
    if _has_directed_path(g, b, a):
        report.conflict(f"{rule}: {a}->{b} would close a directed cycle")
        return False
    for other in g.adjacent(b):
        if other != a and g.is_directed(other, b) and not g.has_edge(other, a):
            report.conflict(f"{rule}: {a}->{b} would create a new collider at {b}")
            return False
    g.set_mark_at(b, a, ARROW)
    report.fired(rule)
    return True


def meek_rules(g: MixedGraph, bk=None, report=None) -> MixedGraph:
    """Apply the four Meek completion rules to fixpoint on a tail/arrow
    pattern.  Returns a new graph."""
    out = g.copy()
    report = report or RunReport("pc", out.nodes)
    changed = True
    while changed:
        changed = False
        for a, b in sorted((a, b) for a, b in combinations(sorted(out.nodes), 2) if out.has_edge(a, b)):
            for u, v in ((a, b), (b, a)):
                if not _undirected(out, u, v):
                    continue
                if _meek_r1(out, u, v) and _meek_orient(out, u, v, bk, report, "M1"):
                    changed = True
                    continue
                if _meek_r2(out, u, v) and _meek_orient(out, u, v, bk, report, "M2"):
                    changed = True
                    continue
                if _meek_r3(out, u, v) and _meek_orient(out, u, v, bk, report, "M3"):
                    changed = True
                    continue
                if _meek_r4(out, u, v) and _meek_orient(out, u, v, bk, report, "M4"):
                    changed = True
    return out


def _meek_r1(g, a, b):
    # c -> a, a - b, c and b nonadjacent  =>  a -> b
    return any(
        g.is_directed(c, a) and not g.has_edge(c, b) for c in g.adjacent(a) if c != b
    )


def _meek_r2(g, a, b):
    # a -> c -> b with a - b  =>  a -> b (acyclicity)
    return any(
        g.is_directed(a, c) and g.is_directed(c, b)
        for c in g.adjacent(a)
        if c != b and g.has_edge(c, b)
    )


def _meek_r3(g, a, b):
    # a - c -> b, a - d -> b, c and d nonadjacent  =>  a -> b
    into_b = [c for c in g.adjacent(a) if c != b and _undirected(g, a, c) and g.is_directed(c, b)]
    for c, d in combinations(into_b, 2):
        if not g.has_edge(c, d):
            return True
    return False


def _meek_r4(g, a, b):
    # a - d, d -> c, c -> b, a adjacent to c, d and b nonadjacent  =>  a -> b
    # (only needed once background knowledge has oriented some edges)
    for d in g.adjacent(a):
        if d == b or not _undirected(g, a, d) or g.has_edge(d, b):
            continue
        for c in g.adjacent(d):
            if c in (a, b) or not g.has_edge(a, c):
                continue
            if g.is_directed(d, c) and g.is_directed(c, b):
                return True
    return False


# ---------------------------------------------------------------------------
# FCI orientation rules (arrowhead rules R1-R4, tail rules R8-R10; the
# selection-bias rules R5-R7 are not needed without undirected edges)


def _fci_r1(g, bk, report) -> bool:
    # alpha *-> beta o-* gamma, alpha and gamma nonadjacent  =>  beta -> gamma
    changed = False
    for beta in sorted(g.nodes):
        for alpha in g.adjacent(beta):
            if g.mark_at(beta, alpha) is not ARROW:
                continue
            for gamma in g.adjacent(beta):
                if gamma == alpha or g.has_edge(alpha, gamma):
                    continue
                if g.mark_at(beta, gamma) is CIRCLE:
                    if _orient_directed(g, beta, gamma, bk, report, "R1"):
                        changed = True
    return changed


def _fci_r2(g, bk, report) -> bool:
    # (alpha -> beta *-> gamma) or (alpha *-> beta -> gamma), alpha *-o gamma
    #   =>  arrowhead at gamma on alpha-gamma
    changed = False
    for alpha, gamma in sorted((a, c) for a in g.nodes for c in g.adjacent(a)):
        if g.mark_at(gamma, alpha) is not CIRCLE:
            continue
        for beta in g.adjacent(alpha):
            if beta == gamma or not g.has_edge(beta, gamma):
                continue
            chain1 = g.is_directed(alpha, beta) and g.mark_at(gamma, beta) is ARROW
            chain2 = g.mark_at(beta, alpha) is ARROW and g.is_directed(beta, gamma)
            if chain1 or chain2:
                if _place_arrow(g, alpha, gamma, bk, report, "R2"):
                    changed = True
                break
    return changed


def _fci_r3(g, bk, report) -> bool:
    # alpha *-> beta <-* gamma, alpha *-o theta o-* gamma, alpha/gamma
    # nonadjacent, theta *-o beta  =>  arrowhead at beta on theta-beta
    changed = False
    for beta in sorted(g.nodes):
        for alpha, gamma in combinations(g.adjacent(beta), 2):
            if g.has_edge(alpha, gamma):
                continue
            if g.mark_at(beta, alpha) is not ARROW or g.mark_at(beta, gamma) is not ARROW:
                continue
            for theta in sorted(set(g.adjacent(alpha)) & set(g.adjacent(gamma)) & set(g.adjacent(beta))):
                if theta in (alpha, beta, gamma):
                    continue
                if g.mark_at(theta, alpha) is CIRCLE and g.mark_at(theta, gamma) is CIRCLE:
                    if g.mark_at(beta, theta) is CIRCLE:
                        if _place_arrow(g, theta, beta, bk, report, "R3"):
                            changed = True
    return changed


def _discriminating_paths(g, beta, gamma):
    """(theta, alpha) pairs of discriminating paths <theta, ..., alpha,
    beta, gamma>: theta nonadjacent to gamma, and every vertex strictly
    between theta and beta a collider on the path and a parent of gamma."""
    parents = {v for v in g.adjacent(gamma) if v != beta and g.is_directed(v, gamma)}
    # grow path fragments <..., alpha> backwards from beta; fragment heads
    # have their beta-side arrowhead verified, their far side pending
    stack = [
        (alpha,)
        for alpha in sorted(g.adjacent(beta))
        if alpha != gamma and alpha in parents and g.mark_at(alpha, beta) is ARROW
    ]
    results = set()
    while stack:
        frag = stack.pop()
        head = frag[-1]
        for w in sorted(g.adjacent(head)):
            if w in frag or w == beta or w == gamma:
                continue
            if g.mark_at(head, w) is not ARROW:
                continue  # head must be a collider on the path
            if not g.has_edge(w, gamma):
                results.add((w, frag[0]))
            elif w in parents and g.mark_at(w, head) is ARROW:
                stack.append(frag + (w,))
    return sorted(results)


def _fci_r4(g, sepsets, bk, report) -> bool:
    # discriminating path <theta, ..., alpha, beta, gamma> with circle at
    # beta on beta-gamma: beta in sepset(theta, gamma) orients beta -> gamma,
    # otherwise the triple becomes alpha <-> beta <-> gamma
    changed = False
    for beta in sorted(g.nodes):
        for gamma in g.adjacent(beta):
            if g.mark_at(beta, gamma) is not CIRCLE:
                continue
            for theta, alpha in _discriminating_paths(g, beta, gamma):
                sep = sepsets.get(theta, gamma)
                if sep is not None and beta in sep:
                    if _orient_directed(g, beta, gamma, bk, report, "R4"):
                        changed = True
                else:
                    did = _place_arrow(g, alpha, beta, bk, report, "R4")
                    did |= _place_arrow(g, beta, alpha, bk, report, "R4")
                    did |= _place_arrow(g, gamma, beta, bk, report, "R4")
                    did |= _place_arrow(g, beta, gamma, bk, report, "R4")
                    changed |= did
                if g.mark_at(beta, gamma) is not CIRCLE:
                    break
    return changed


def _pd_edge(g, u, v):
    # the edge u *-* v could be oriented u -> v
    return g.mark_at(u, v) is not ARROW and g.mark_at(v, u) is not TAIL


def _uncovered_pd_paths(g, start, end, min_edges):
    """Uncovered potentially directed simple paths from start to end."""
    paths = []

    def extend(path):
        last = path[-1]
        for nxt in sorted(g.adjacent(last)):
            if nxt in path or not _pd_edge(g, last, nxt):
                continue
            if len(path) >= 2 and g.has_edge(path[-2], nxt):
                continue
            new_path = path + [nxt]
            if nxt == end:
                if len(new_path) - 1 >= min_edges:
                    paths.append(tuple(new_path))
            else:
                extend(new_path)

    extend([start])
    return paths


def _fci_r8(g, bk, report) -> bool:
    # alpha -> beta -> gamma and alpha o-> gamma  =>  alpha -> gamma
    changed = False
    for alpha in sorted(g.nodes):
        for gamma in g.adjacent(alpha):
            if g.mark_at(alpha, gamma) is not CIRCLE or g.mark_at(gamma, alpha) is not ARROW:
                continue
            for beta in g.adjacent(alpha):
                if beta != gamma and g.is_directed(alpha, beta) and g.has_edge(beta, gamma) and g.is_directed(beta, gamma):
                    if _place_tail(g, alpha, gamma, bk, report, "R8"):
                        changed = True
                    break
    return changed


def _fci_r9(g, bk, report) -> bool:
    # alpha o-> gamma with an uncovered p.d. path alpha, beta, ..., gamma
    # where beta and gamma are nonadjacent  =>  tail at alpha
    changed = False
    for alpha in sorted(g.nodes):
        for gamma in g.adjacent(alpha):
            if g.mark_at(alpha, gamma) is not CIRCLE or g.mark_at(gamma, alpha) is not ARROW:
                continue
            for path in _uncovered_pd_paths(g, alpha, gamma, min_edges=2):
                if path[1] != gamma and not g.has_edge(path[1], gamma):
                    if _place_tail(g, alpha, gamma, bk, report, "R9"):
                        changed = True
                    break
    return changed


def _fci_r10(g, bk, report) -> bool:
    # alpha o-> gamma, beta -> gamma <- theta, uncovered p.d. paths p1 to
    # beta and p2 to theta whose first steps mu != omega are nonadjacent
    changed = False
    for alpha in sorted(g.nodes):
        for gamma in g.adjacent(alpha):
            if g.mark_at(alpha, gamma) is not CIRCLE or g.mark_at(gamma, alpha) is not ARROW:
                continue
            parents = [v for v in g.adjacent(gamma) if v != alpha and g.is_directed(v, gamma)]
            if len(parents) < 2:
                continue
            first_steps = {}
            for parent in parents:
                steps = {p[1] for p in _uncovered_pd_paths(g, alpha, parent, min_edges=1)}
                if steps:
                    first_steps[parent] = steps
            done = False
            for beta, theta in combinations(sorted(first_steps), 2):
                for mu in first_steps[beta]:
                    for omega in first_steps[theta]:
                        if mu != omega and not g.has_edge(mu, omega):
                            if _place_tail(g, alpha, gamma, bk, report, "R10"):
                                changed = True
                            done = True
                            break
                    if done:
                        break
                if done:
                    break
    return changed


def _fci_orient(g, sepsets, bk, report):
    changed = True
    while changed:
        changed = False
        changed |= _fci_r1(g, bk, report)
        changed |= _fci_r2(g, bk, report)
        changed |= _fci_r3(g, bk, report)
        changed |= _fci_r4(g, sepsets, bk, report)
        changed |= _fci_r8(g, bk, report)
        changed |= _fci_r9(g, bk, report)
        changed |= _fci_r10(g, bk, report)


def possible_d_sep(g: MixedGraph, node: str):
    """Nodes reachable from ``node`` along walks whose every inner vertex is
    either a collider on the walk or part of a triangle with its walk
    neighbours."""
    reached = set()
    visited = set()
    stack = [(node, nbr) for nbr in g.adjacent(node)]
    while stack:
        a, b = stack.pop()
        if (a, b) in visited:
            continue
        visited.add((a, b))
        reached.add(b)
        for c in g.adjacent(b):
            if c == a:
                continue
            collider = g.mark_at(b, a) is ARROW and g.mark_at(b, c) is ARROW
            if collider or g.has_edge(a, c):
                stack.append((b, c))
    reached.discard(node)
    return sorted(reached)


def _as_source(data_or_oracle, config):
    if isinstance(data_or_oracle, BinaryDataset):
        tester = DatasetCITester(data_or_oracle, config.statistic)
        return AlphaCISource(tester, config.alpha), sorted(data_or_oracle.columns)
    if isinstance(data_or_oracle, Dag):
        return OracleCISource(data_or_oracle), sorted(data_or_oracle.nodes)
    if hasattr(data_or_oracle, "independent"):
        return data_or_oracle, None
    raise TypeError(f"cannot build an independence source from {type(data_or_oracle)!r}")


def pc(data_or_oracle, config: DiscoveryConfig | None = None, bk: BackgroundKnowledge | None = None, variables=None):
    """PC: skeleton, v-structures, Meek completion.  Output marks are tails
    and arrows only; an undirected edge is tail-tail."""
    config = config or DiscoveryConfig(algorithm="pc")
    source, inferred = _as_source(data_or_oracle, config)
    variables = sorted(variables) if variables is not None else inferred
    if variables is None:
        raise ValueError("variables required when passing a bare independence source")
    report = RunReport("pc", tuple(variables))

    g, sepsets = skeleton(variables, source, config)
    report.stages["skeleton"] = g.edge_count()
    for a, b in g.skeleton_pairs():
        g.set_mark_at(a, b, TAIL)
        g.set_mark_at(b, a, TAIL)
    if bk is not None:
        g = apply_background_knowledge(g, bk)
    g = orient_v_structures(g, sepsets, bk, report)
    report.stages["v_structures"] = g.edge_count()
    g = meek_rules(g, bk, report)
    if bk is not None:
        g = apply_background_knowledge(g, bk)
    report.stages["final"] = g.edge_count()
    report.sepsets = sepsets.items()
    return g, report


def fci(data_or_oracle, config: DiscoveryConfig | None = None, bk: BackgroundKnowledge | None = None, variables=None):
    """FCI: skeleton, collider orientation, possible-d-sep pruning, full
    re-orientation with the final rule set.  Output is a PAG."""
    config = config or DiscoveryConfig(algorithm="fci")
    source, inferred = _as_source(data_or_oracle, config)
    variables = sorted(variables) if variables is not None else inferred
    if variables is None:
        raise ValueError("variables required when passing a bare independence source")
    report = RunReport("fci", tuple(variables))

    g, sepsets = skeleton(variables, source, config)
    report.stages["skeleton"] = g.edge_count()
    if bk is not None:
        g = apply_background_knowledge(g, bk)
    g = orient_v_structures(g, sepsets, bk, report)

    pds = {node: possible_d_sep(g, node) for node in variables}
    for x, y in g.skeleton_pairs():
        if not g.has_edge(x, y):
            continue
        tried = set()
        found = None
        for side in (x, y):
            candidates = [v for v in pds[side] if v not in (x, y)]
            top = len(candidates) if config.max_pdsep_size is None else min(config.max_pdsep_size, len(candidates))
            for k in range(0, top + 1):
                for z in combinations(candidates, k):
                    if z in tried:
                        continue
                    tried.add(z)
                    if source.independent(x, y, z):
                        found = z
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is not None:
            g.remove_edge(x, y)
            sepsets.record(x, y, found)
    report.stages["pdsep"] = g.edge_count()

    final = MixedGraph(variables)
    for a, b in g.skeleton_pairs():
        final.add_edge(a, b, CIRCLE, CIRCLE)
    if bk is not None:
        final = apply_background_knowledge(final, bk)
    final = orient_v_structures(final, sepsets, bk, report)
    _fci_orient(final, sepsets, bk, report)
    if bk is not None:
        final = apply_background_knowledge(final, bk)
    report.stages["final"] = final.edge_count()
    report.sepsets = sepsets.items()
    return final, report


def run(dataset: BinaryDataset, config: DiscoveryConfig, bk: BackgroundKnowledge | None = None):
    """Dispatch to pc or fci with the dataset CI test as the independence
    source.  Returns (graph, report)."""
    algorithm = pc if config.algorithm == "pc" else fci
    graph, report = algorithm(dataset, config, bk)
    return graph, report
