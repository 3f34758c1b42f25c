"""Evidential polytrees, target-oriented reorientation and one-way propagation.

A network carries one valuation per node, a bpa over the node and its
parents. Roots carry plain marginals; every other valuation is a Cano-type
conditional (vacuous on the parents). The represented joint is the ⊕ of all
valuations, vacuously extended to the full frame.

Propagation toward a target runs along the undirected backbone: every node
combines its valuation, its evidence and the messages of its upstream
neighbours, and passes on the marginal over the variables it still shares
with the rest of the network.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .conditionals import Strategy, approximate_conditional, correctness_witness, is_cano_type
from .config import DEFAULT_LIMITS, Limits
from .errors import FormatError, NetworkError, TotalConflictError
from .frames import FocalSet, JointFrame, box
from .mass import MassFunction, box_hull, combine, combine_all, marginalize, vacuous_extend

logger = logging.getLogger(__name__)

Edge = tuple[str, str]


@dataclass(frozen=True)
class EvidentialPolytree:
    frame: JointFrame
    edges: tuple[Edge, ...]
    valuations: Mapping[str, MassFunction] = field(compare=False)

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.frame.names)
        g.add_edges_from(self.edges)
        return g

    def skeleton(self) -> nx.Graph:
        return self.graph().to_undirected()

    def parents(self, node: str) -> tuple[str, ...]:
        return self.frame.ordered(u for u, v in self.edges if v == node)

    def family(self, node: str) -> tuple[str, ...]:
        return self.frame.ordered({node, *self.parents(node)})


@dataclass(frozen=True)
class TargetOrientedNetwork(EvidentialPolytree):
    target: str = ""
    added_edges: tuple[Edge, ...] = ()
    reversed_edges: tuple[Edge, ...] = ()
    qualities: Mapping[str, Fraction] = field(default_factory=dict, compare=False)
    backbone: tuple[Edge, ...] = ()

    def skeleton(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.frame.names)
        g.add_edges_from(self.backbone)
        return g


@dataclass(frozen=True)
class EvidenceSet:
    observations: Mapping[str, frozenset] = field(default_factory=dict)

    def check(self, frame: JointFrame) -> None:
        for var, values in self.observations.items():
            if var not in frame.names:
                raise NetworkError(f"evidence on unknown variable {var!r}")
            if not values:
                raise NetworkError(f"empty evidence set for {var!r}")
            unknown = set(values) - set(frame.variable(var).domain)
            if unknown:
                raise NetworkError(f"unknown value(s) {sorted(unknown)} in evidence on {var!r}")


def parse_evidence(items: Iterable[str]) -> EvidenceSet:
    """Parse ``X=x1|x2`` observations."""
    observations: dict[str, frozenset] = {}
    for item in items:
        var, sep, values = item.partition("=")
        var = var.strip()
        if not sep or not var or not values.strip():
            raise FormatError(f"evidence {item!r} is not of the form VAR=v1|v2")
        if var in observations:
            raise NetworkError(f"more than one observation of {var!r}")
        observations[var] = frozenset(v.strip() for v in values.split("|"))
    return EvidenceSet(observations)


def build_network(
    frame: JointFrame, edges: Iterable[Sequence[str]], valuations: Mapping[str, MassFunction]
) -> EvidentialPolytree:
    return EvidentialPolytree(frame, tuple((str(u), str(v)) for u, v in edges), dict(valuations))


def validate_polytree(net: EvidentialPolytree) -> list[str]:
    """Structural and valuation problems of ``net``; empty when it is a valid polytree."""
    names = set(net.frame.names)
    problems = []
    for u, v in net.edges:
        if u not in names or v not in names:
            problems.append(f"edge {u}->{v} names an unknown variable")
        elif u == v:
            problems.append(f"self-loop on {u}")
    if len(set(net.edges)) != len(net.edges):
        problems.append("duplicate edge")
    if problems:
        return problems

    graph = net.graph()
    if not nx.is_directed_acyclic_graph(graph):
        problems.append("directed cycle: " + " -> ".join(u for u, _ in nx.find_cycle(graph)))
    pairs = {frozenset(e) for e in net.edges}
    if len(pairs) != len(net.edges) or not nx.is_forest(net.skeleton()):
        problems.append("more than one undirected path between some pair of nodes")

    for node in net.frame.names:
        valuation = net.valuations.get(node)
        if valuation is None:
            problems.append(f"no valuation for {node}")
            continue
        family = net.family(node)
        if valuation.frame != net.frame.subframe(family):
            problems.append(
                f"valuation of {node} is over {list(valuation.frame.names)}, expected {list(family)}"
            )
            continue
        if not valuation.is_proper:
            problems.append(f"valuation of {node} is not a proper bpa")
            continue
        parents = net.parents(node)
        if parents and not is_cano_type(valuation, parents):
            problems.append(f"valuation of {node} is not a Cano-type conditional given {', '.join(parents)}")
    extra = sorted(set(net.valuations) - names)
    if extra:
        problems.append(f"valuations for unknown node(s): {', '.join(extra)}")
    return problems


def _require_valid(net: EvidentialPolytree) -> None:
    problems = validate_polytree(net)
    if problems:
        raise NetworkError("invalid polytree: " + "; ".join(problems))


def _require_node(net: EvidentialPolytree, node: str) -> None:
    if node not in net.frame.names:
        raise NetworkError(f"unknown target {node!r}")


def ancestral_marginal(net: EvidentialPolytree, names: Iterable[str]) -> MassFunction:
    """Marginal of the represented joint on ``names``, from their ancestral valuations only."""
    names = net.frame.ordered(names)
    graph = net.graph()
    closure = set(names)
    for n in names:
        closure |= nx.ancestors(graph, n)
    sub = net.frame.subframe(closure)
    joint = combine_all(vacuous_extend(net.valuations[n], sub) for n in sub.names)
    return marginalize(joint, names)


def reorient_for_target(
    net: EvidentialPolytree,
    target: str,
    strategy: Strategy | str = Strategy.EXHAUSTIVE,
    seed: int | None = None,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> TargetOrientedNetwork:
    """Reverse edges until every backbone edge points toward ``target``.

    Reversing u→v gives u the parents of v besides u, plus v, and gives v the
    parents of u. Families whose parent set changed get a new valuation
    extracted from their local joint; the quality of each extraction is kept.
    """
    _require_node(net, target)
    _require_valid(net)
    names = net.frame.names
    skeleton = net.skeleton()
    paths = nx.shortest_path(skeleton, target)
    distance = {n: len(path) - 1 for n, path in paths.items()}

    original = {n: set(net.parents(n)) for n in names}
    parents = {n: set(ps) for n, ps in original.items()}
    to_reverse = sorted(
        ((u, v) for u, v in net.edges if v in paths and v != target and paths[v][-2] == u),
        key=lambda e: (distance[e[0]], names.index(e[0]), names.index(e[1])),
    )
    for u, v in to_reverse:
        pu, pv = parents[u], parents[v] - {u}
        parents[u] = pu | pv | {v}
        parents[v] = pv | pu
        logger.debug("reversed %s->%s", u, v)

    edges = tuple((p, n) for n in names for p in net.frame.ordered(parents[n]))
    graph = nx.DiGraph(edges)
    graph.add_nodes_from(names)
    if not nx.is_directed_acyclic_graph(graph):
        raise NetworkError("edge reversal produced a directed cycle")
    original_pairs = {frozenset(e) for e in net.edges}
    added = tuple(e for e in edges if frozenset(e) not in original_pairs)
    backbone = tuple(e for e in edges if frozenset(e) in original_pairs)

    valuations = dict(net.valuations)
    qualities: dict[str, Fraction] = {}
    for node in names:
        if parents[node] == original[node]:
            continue
        family = net.frame.ordered(parents[node] | {node})
        local = ancestral_marginal(net, family)
        if not parents[node]:
            valuations[node] = local
            qualities[node] = Fraction(1)
            continue
        if not all(f.is_box for f in local):
            logger.warning("local joint of %s has non-box focal sets; using its box hull", node)
            local = box_hull(local)
        result = approximate_conditional(local, net.frame.ordered(parents[node]), strategy, seed, limits=limits)
        valuations[node] = result.conditional
        qualities[node] = result.quality
        logger.info("new valuation for %s given %s: quality %s", node, ",".join(sorted(parents[node])), result.quality)

    return TargetOrientedNetwork(
        frame=net.frame,
        edges=edges,
        valuations=valuations,
        target=target,
        added_edges=added,
        reversed_edges=tuple(to_reverse),
        qualities=qualities,
        backbone=backbone,
    )


def compose_evidence(ev: EvidenceSet, frame: JointFrame) -> MassFunction:
    ev.check(frame)
    return MassFunction.categorical(box(ev.observations, frame, fill=True))


def _combine_at(node: str, pieces: Sequence[MassFunction]) -> MassFunction:
    result = pieces[0]
    for piece in pieces[1:]:
        try:
            result, conflict = combine(result, piece)
        except TotalConflictError:
            raise TotalConflictError(node=node) from None
        if conflict:
            logger.debug("conflict %s at %s", conflict, node)
    return result


def propagate(
    net: EvidentialPolytree,
    ev: EvidenceSet,
    target: str | None = None,
    *,
    schedule: Sequence[str] | None = None,
) -> MassFunction:
    """Pass messages from the leaves of the backbone to ``target`` and return its posterior.

    ``target`` defaults to the target of an oriented network. ``schedule``
    gives the order in which nodes send; every node must come after its
    upstream neighbours.
    """
    if target is None:
        target = getattr(net, "target", None) or ""
    _require_node(net, target)
    frame = net.frame
    ev.check(frame)

    tree = net.skeleton()
    paths = nx.shortest_path(tree, target)
    component = set(paths)
    upstream: dict[str, list[str]] = {n: [] for n in component}
    for n in component - {target}:
        upstream[paths[n][-2]].append(n)
    skipped = set(ev.observations) - component
    if skipped:
        logger.debug("evidence on %s is disconnected from %s", ", ".join(sorted(skipped)), target)

    if schedule is None:
        schedule = list(reversed(list(nx.bfs_tree(tree, target))))
    position = {n: i for i, n in enumerate(schedule)}
    if set(position) != component or len(position) != len(schedule):
        raise NetworkError("the schedule must list every node connected to the target exactly once")
    for n, ups in upstream.items():
        if any(position[u] > position[n] for u in ups):
            raise NetworkError(f"{n} is scheduled before one of its upstream neighbours")

    subtree: dict[str, set[str]] = {}
    for n in sorted(component, key=lambda n: -len(paths[n])):
        subtree[n] = {n}.union(*(subtree[u] for u in upstream[n]))

    def scope(nodes: Iterable[str]) -> set[str]:
        out: set[str] = set()
        for w in nodes:
            out.update(net.family(w))
        return out

    messages: dict[str, MassFunction] = {}
    for node in schedule:
        pieces = [net.valuations[node]]
        if node in ev.observations:
            pieces.append(MassFunction.categorical(box({node: ev.observations[node]}, frame.subframe([node]))))
        pieces.extend(messages[u] for u in sorted(upstream[node], key=position.get))
        sub = frame.subframe(set().union(*(p.frame.names for p in pieces)))
        combined = _combine_at(node, [vacuous_extend(p, sub) for p in pieces])
        if node == target:
            return marginalize(combined, [target])
        separator = scope(subtree[node]) & scope(component - subtree[node])
        messages[node] = marginalize(combined, separator)
        logger.debug("message %s -> %s over %s", node, paths[node][-2], ",".join(sorted(separator)))
    raise NetworkError("the schedule never reached the target")


def joint_of(net: EvidentialPolytree) -> MassFunction:
    return combine_all(vacuous_extend(net.valuations[n], net.frame) for n in net.frame.names)


def oracle_marginal(net: EvidentialPolytree, ev: EvidenceSet, target: str) -> MassFunction:
    """Posterior of ``target`` by conditioning the full joint directly."""
    _require_node(net, target)
    posterior, _ = combine(joint_of(net), compose_evidence(ev, net.frame))
    return marginalize(posterior, [target])


@dataclass(frozen=True)
class VerificationReport:
    target: str
    propagated: MassFunction
    oracle: MassFunction
    equal: bool
    correct: bool
    witness: FocalSet | None
    qualities: Mapping[str, Fraction] = field(default_factory=dict, compare=False)
    added_edges: tuple[Edge, ...] = ()

    @property
    def status(self) -> str:
        if self.equal:
            return "equal"
        return "correct" if self.correct else "violation"


def verify(
    net: EvidentialPolytree,
    ev: EvidenceSet,
    target: str,
    *,
    reference: MassFunction | None = None,
    baseline: bool = False,
    strategy: Strategy | str = Strategy.EXHAUSTIVE,
    seed: int | None = None,
    limits: Limits = DEFAULT_LIMITS,
) -> VerificationReport:
    """Compare one-way propagation toward ``target`` with the exact posterior.

    The exact posterior comes from the network's own joint, or from
    ``reference`` (e.g. the case data the network was built from) when given.
    ``baseline`` propagates on the original orientation instead.
    """
    _require_node(net, target)
    if baseline:
        oriented, propagated = None, propagate(net, ev, target)
    else:
        oriented = reorient_for_target(net, target, strategy, seed, limits=limits)
        propagated = propagate(oriented, ev)
    if reference is None:
        oracle = oracle_marginal(net, ev, target)
    else:
        posterior, _ = combine(reference, compose_evidence(ev, reference.frame))
        oracle = marginalize(posterior, [target])
        if oracle.frame != propagated.frame:
            raise NetworkError(f"reference domain of {target!r} differs from the network's")
    found = correctness_witness(oracle, propagated, joint=True, limits=limits)
    report = VerificationReport(
        target=target,
        propagated=propagated,
        oracle=oracle,
        equal=propagated == oracle,
        correct=found is None,
        witness=None if found is None else found[1],
        qualities=dict(oriented.qualities) if oriented else {},
        added_edges=oriented.added_edges if oriented else (),
    )
    logger.info("verification of %s: %s", target, report.status)
    return report
