# topology.py
# Radial network tree: one plant at the root, junctions, consumer leaves.
# Every edge is a pipe run carrying a supply/return pair.

import logging
from dataclasses import dataclass

import networkx as nx

from ..errors import TopologyError

logger = logging.getLogger(__name__)

PLANT = "plant"
JUNCTION = "junction"
CONSUMER = "consumer"
NODE_KINDS = (PLANT, JUNCTION, CONSUMER)


@dataclass(frozen=True)
class PipeRun:
    id: str
    parent: str
    child: str
    length: float


class NetworkTopology:
    """Validated tree of nodes and pipe runs.

    Runs are directed parent -> child, i.e. in supply flow direction.
    """

    def __init__(self, nodes, runs):
        self.graph = nx.DiGraph()
        for node_id, kind in nodes.items():
            if kind not in NODE_KINDS:
                raise TopologyError(f"node {node_id!r} has unknown kind {kind!r}")
            self.graph.add_node(node_id, kind=kind)

        for run in runs:
            for end in (run.parent, run.child):
                if end not in self.graph:
                    raise TopologyError(f"pipe run {run.id!r} references unknown node {end!r}")
            if self.graph.has_edge(run.parent, run.child):
                raise TopologyError(f"pipe run {run.id!r} duplicates an existing run")
            self.graph.add_edge(run.parent, run.child, run=run)

        self._check()
        self.root = next(n for n, k in self.graph.nodes(data="kind") if k == PLANT)

        # parents before children, siblings in insertion order
        self.runs = [self.graph.edges[e]["run"] for e in nx.bfs_edges(self.graph, self.root)]
        self.consumers = [n for n in nx.bfs_tree(self.graph, self.root) if self.kind(n) == CONSUMER]
        logger.debug("network topology: %d runs, %d consumers", len(self.runs), len(self.consumers))

    def _check(self):
        plants = [n for n, k in self.graph.nodes(data="kind") if k == PLANT]
        if len(plants) != 1:
            raise TopologyError(f"network needs exactly one plant node, found {len(plants)}")
        if not any(k == CONSUMER for _, k in self.graph.nodes(data="kind")):
            raise TopologyError("network has no consumers")

        undirected = self.graph.to_undirected(as_view=True)
        cycles = nx.cycle_basis(undirected)
        if cycles:
            raise TopologyError(f"network contains a cycle through nodes {sorted(cycles[0])}")
        if not nx.is_connected(undirected):
            orphans = set(self.graph) - nx.node_connected_component(undirected, plants[0])
            raise TopologyError(f"nodes not connected to the plant: {sorted(orphans)}")
        if not nx.is_arborescence(self.graph) or self.graph.in_degree(plants[0]) != 0:
            raise TopologyError("pipe runs must point away from the plant")

        for node, kind in self.graph.nodes(data="kind"):
            children = self.graph.out_degree(node)
            if kind == CONSUMER and children:
                raise TopologyError(f"consumer {node!r} must be a leaf")
            if kind == JUNCTION and not children:
                raise TopologyError(f"junction {node!r} has no downstream runs")

    def kind(self, node):
        return self.graph.nodes[node]["kind"]

    def incoming_run(self, node):
        """The run feeding ``node``; None for the plant."""
        preds = list(self.graph.predecessors(node))
        return self.graph.edges[preds[0], node]["run"] if preds else None

    def outgoing_runs(self, node):
        return [self.graph.edges[node, child]["run"] for child in self.graph.successors(node)]

    def path_to(self, consumer):
        """Runs from the plant to ``consumer``, in supply direction."""
        nodes = nx.shortest_path(self.graph, self.root, consumer)
        return [self.graph.edges[a, b]["run"] for a, b in zip(nodes, nodes[1:])]

    def downstream_consumers(self, run):
        below = nx.descendants(self.graph, run.child) | {run.child}
        return [c for c in self.consumers if c in below]
