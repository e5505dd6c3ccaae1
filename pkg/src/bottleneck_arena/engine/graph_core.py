"""Graph core - path validity, enumeration and min-weight / min-max path search."""

import heapq
import logging
from collections import deque
from collections.abc import Callable, Sequence
from functools import lru_cache

import networkx as nx

from ..errors import NoPathError, PreconditionError, ResultTooLargeError
from ..models.graph import Graph, Path

logger = logging.getLogger(__name__)

DEFAULT_PATH_CAP = 10**6

EdgeFunction = Callable[[int], int] | Sequence[int]


@lru_cache(maxsize=256)
def _incidence(graph: Graph) -> tuple[tuple[int, ...], ...]:
    """Edge ids incident to each node, ascending."""
    incident: list[list[int]] = [[] for _ in range(graph.node_count)]
    for edge in graph.edges:
        incident[edge.u].append(edge.edge_id)
        incident[edge.v].append(edge.edge_id)
    return tuple(tuple(ids) for ids in incident)


@lru_cache(maxsize=256)
def to_networkx(graph: Graph) -> nx.MultiGraph:
    """MultiGraph view keyed by edge id. Shared and cached: treat as read-only."""
    multigraph = nx.MultiGraph()
    multigraph.add_nodes_from(range(graph.node_count))
    for edge in graph.edges:
        multigraph.add_edge(edge.u, edge.v, key=edge.edge_id)
    return multigraph


def path_nodes(graph: Graph, path: Path) -> list[int] | None:
    """Nodes visited walking `path` from its source, or None if the walk breaks."""
    nodes = [path.source]
    current = path.source
    for edge_id in path.edge_seq:
        if not 0 <= edge_id < graph.edge_count:
            return None
        nxt = graph.edges[edge_id].other(current)
        if nxt is None:
            return None
        nodes.append(nxt)
        current = nxt
    return nodes


def validate_path(graph: Graph, path: Path) -> bool:
    """True iff `path` is an edge-simple walk from its source to its destination."""
    if not graph.has_node(path.source) or not graph.has_node(path.destination):
        return False
    if not path.edge_seq:
        return path.source == path.destination
    if len(set(path.edge_seq)) != len(path.edge_seq):
        return False
    nodes = path_nodes(graph, path)
    if nodes is None or nodes[-1] != path.destination:
        return False
    # consecutive edges must meet in exactly one endpoint
    for prev_id, next_id in zip(path.edge_seq, path.edge_seq[1:]):
        if graph.edges[prev_id].endpoints == graph.edges[next_id].endpoints:
            return False
    return True


def is_node_simple(graph: Graph, path: Path) -> bool:
    nodes = path_nodes(graph, path)
    return nodes is not None and len(set(nodes)) == len(nodes)


def hop_distance(graph: Graph, source: int, target: int) -> int | None:
    """Fewest edges between two nodes, None when unreachable."""
    try:
        return nx.shortest_path_length(to_networkx(graph), source, target)
    except nx.NetworkXNoPath:
        return None


def _check_endpoints(graph: Graph, source: int, target: int) -> None:
    if not graph.has_node(source) or not graph.has_node(target):
        raise PreconditionError(f"nodes {source}, {target} must lie in [0, {graph.node_count})")
    if source == target:
        raise PreconditionError("source and destination must differ", node=source)


def all_simple_paths(
    graph: Graph,
    source: int,
    target: int,
    max_len: int,
    cap: int = DEFAULT_PATH_CAP,
) -> list[Path]:
    """
    Every node-simple path from source to target with at most max_len edges,
    sorted by edge id sequence.
    """
    _check_endpoints(graph, source, target)
    if max_len < 1:
        raise PreconditionError("max_len must be >= 1", max_len=max_len)
    sequences: list[tuple[int, ...]] = []
    for edge_path in nx.all_simple_edge_paths(to_networkx(graph), source, target, cutoff=max_len):
        sequences.append(tuple(key for _, _, key in edge_path))
        if len(sequences) > cap:
            raise ResultTooLargeError(
                f"more than {cap} paths from {source} to {target}",
                cap=cap,
                source=source,
                target=target,
            )
    sequences.sort()
    logger.debug("Enumerated %d paths %d->%d (max_len=%d)", len(sequences), source, target, max_len)
    return [Path(edge_seq=seq, source=source, destination=target) for seq in sequences]


def _edge_values(graph: Graph, values: EdgeFunction, what: str) -> list[int]:
    if callable(values):
        resolved = [int(values(edge.edge_id)) for edge in graph.edges]
    else:
        resolved = [int(v) for v in values]
    if len(resolved) != graph.edge_count:
        raise PreconditionError(f"{what} must cover all {graph.edge_count} edges")
    if any(v < 0 for v in resolved):
        raise PreconditionError(f"{what} must be nonnegative")
    return resolved


def _lex_dijkstra(
    graph: Graph,
    source: int,
    target: int,
    weight: list[int],
    allowed: frozenset[int] | None,
    max_len: int | None,
) -> Path | None:
    """
    Minimum (total weight, length, edge id sequence) over node-simple paths.
    With a hop limit, states are (node, hops) instead of nodes.
    """
    incidence = _incidence(graph)
    edges = graph.edges
    heap: list[tuple[int, int, tuple[int, ...], int, frozenset[int]]] = [
        (0, 0, (), source, frozenset((source,)))
    ]
    settled: set = set()
    while heap:
        total, length, seq, node, visited = heapq.heappop(heap)
        state = node if max_len is None else (node, length)
        if state in settled:
            continue
        settled.add(state)
        if node == target:
            return Path(edge_seq=seq, source=source, destination=target)
        if max_len is not None and length >= max_len:
            continue
        for edge_id in incidence[node]:
            if allowed is not None and edge_id not in allowed:
                continue
            nxt = edges[edge_id].other(node)
            if nxt in visited:
                continue
            heapq.heappush(
                heap,
                (total + weight[edge_id], length + 1, seq + (edge_id,), nxt, visited | {nxt}),
            )
    return None


def min_weight_path(
    graph: Graph,
    source: int,
    target: int,
    weights: EdgeFunction,
    max_len: int | None = None,
) -> Path:
    """
    Path minimizing the exact integer weight sum; ties go to the shorter path,
    then to the lexicographically smaller edge id sequence.
    """
    _check_endpoints(graph, source, target)
    weight = _edge_values(graph, weights, "weights")
    path = _lex_dijkstra(graph, source, target, weight, None, max_len)
    if path is None:
        raise NoPathError(f"no path from {source} to {target}", source=source, target=target)
    return path


def _reachable_within(
    graph: Graph,
    source: int,
    target: int,
    allowed: frozenset[int],
    max_len: int | None,
) -> bool:
    incidence = _incidence(graph)
    depth = {source: 0}
    queue = deque([source])
    while queue:
        node = queue.popleft()
        if node == target:
            return True
        if max_len is not None and depth[node] >= max_len:
            continue
        for edge_id in incidence[node]:
            if edge_id not in allowed:
                continue
            nxt = graph.edges[edge_id].other(node)
            if nxt not in depth:
                depth[nxt] = depth[node] + 1
                queue.append(nxt)
    return False


def min_bottleneck_path(
    graph: Graph,
    source: int,
    target: int,
    loads: EdgeFunction,
    max_len: int | None = None,
) -> Path:
    """
    Path minimizing the largest edge load; ties go to the smaller load sum,
    then the shorter path, then the lexicographically smaller sequence.
    """
    _check_endpoints(graph, source, target)
    load = _edge_values(graph, loads, "loads")
    thresholds = sorted(set(load))
    every_edge = frozenset(range(graph.edge_count))
    if not thresholds or not _reachable_within(graph, source, target, every_edge, max_len):
        raise NoPathError(f"no path from {source} to {target}", source=source, target=target)

    lo, hi = 0, len(thresholds) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        allowed = frozenset(e for e in range(graph.edge_count) if load[e] <= thresholds[mid])
        if _reachable_within(graph, source, target, allowed, max_len):
            hi = mid
        else:
            lo = mid + 1
    bottleneck = thresholds[lo]
    allowed = frozenset(e for e in range(graph.edge_count) if load[e] <= bottleneck)
    path = _lex_dijkstra(graph, source, target, load, allowed, max_len)
    if path is None:
        raise NoPathError(f"no path from {source} to {target}", source=source, target=target)
    return path


def path_weight(path: Path, weights: Sequence[int]) -> int:
    return sum(weights[e] for e in path.edge_seq)
