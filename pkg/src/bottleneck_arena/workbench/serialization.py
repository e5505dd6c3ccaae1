"""Canonical JSON for instances, routings and reports, with content digests."""

import hashlib
import json
import logging
from typing import Any, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..engine.game_model import check_routing
from ..engine.graph_core import hop_distance, validate_path
from ..errors import (
    ArenaError,
    FormatVersionError,
    InvalidGraphError,
    InvalidInstanceError,
    InvalidPathError,
    InvalidPlayerError,
    InvalidRoutingError,
    ParseError,
    SchemaError,
    UnknownKeyError,
)
from ..models.game import AllPaths, CostModel, CostVariant, ExplicitPaths, Instance, Player, Routing
from ..models.graph import Edge, Graph, Path

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class _GraphDoc(_Strict):
    nodes: int = Field(..., ge=1)
    edges: list[tuple[int, int, int]]


class _AllPathsDoc(_Strict):
    all_paths: int = Field(..., ge=1)


class _PlayerDoc(_Strict):
    id: int = Field(..., ge=0)
    src: int = Field(..., ge=0)
    dst: int = Field(..., ge=0)
    strategies: Union[list[list[int]], _AllPathsDoc]


class _CostDoc(_Strict):
    variant: CostVariant
    degree: Optional[int] = Field(default=None, ge=1)


class InstanceDoc(_Strict):
    """On-disk instance document."""

    format_version: int
    graph: _GraphDoc
    players: list[_PlayerDoc]
    cost_model: _CostDoc


class RoutingDoc(_Strict):
    """On-disk routing: one edge id list per player, in player-id order."""

    format_version: int
    paths: list[list[int]]


def canonical_json(data: Any) -> str:
    """Sorted keys, compact separators, trailing newline."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc


def _check_version(data: Any) -> None:
    if not isinstance(data, dict):
        raise SchemaError("document must be a JSON object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatVersionError(
            f"unsupported format_version {version!r}, expected {FORMAT_VERSION}",
            found=version,
            expected=FORMAT_VERSION,
        )


def _schema_error(exc: ValidationError) -> ArenaError:
    errors = exc.errors(include_url=False)
    unknown = [".".join(str(part) for part in err["loc"]) for err in errors if err["type"] == "extra_forbidden"]
    if unknown:
        return UnknownKeyError(f"unknown key {unknown[0]}", keys=unknown, format_version=FORMAT_VERSION)
    first = errors[0]
    where = ".".join(str(part) for part in first["loc"])
    return SchemaError(f"{where}: {first['msg']}", errors=[
        {"loc": ".".join(str(part) for part in err["loc"]), "msg": err["msg"]} for err in errors
    ])


def _parse_doc(model: type[BaseModel], text: str) -> Any:
    data = _load_json(text)
    _check_version(data)
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise _schema_error(exc) from exc


def _graph(doc: _GraphDoc) -> Graph:
    try:
        edges = tuple(Edge(edge_id=i, u=u, v=v) for i, u, v in doc.edges)
    except ValidationError as exc:
        raise InvalidGraphError("edge ids and endpoints must be nonnegative") from exc
    return Graph(node_count=doc.nodes, edges=edges)


def _player(doc: _PlayerDoc) -> Player:
    if isinstance(doc.strategies, _AllPathsDoc):
        strategies = AllPaths(max_len=doc.strategies.all_paths)
    elif not doc.strategies:
        raise InvalidPlayerError(f"player {doc.id} has an empty strategy list", player_id=doc.id)
    else:
        strategies = ExplicitPaths(
            paths=tuple(Path(edge_seq=tuple(seq), source=doc.src, destination=doc.dst) for seq in doc.strategies)
        )
    return Player(player_id=doc.id, source=doc.src, destination=doc.dst, strategies=strategies)


def _cost_model(doc: _CostDoc) -> CostModel:
    return CostModel(variant=doc.variant, degree=doc.degree)


def parse_instance(text: str) -> Instance:
    """Parse and fully validate an instance document."""
    doc: InstanceDoc = _parse_doc(InstanceDoc, text)
    players = sorted((_player(p) for p in doc.players), key=lambda p: p.player_id)
    return Instance(graph=_graph(doc.graph), players=tuple(players), cost_model=_cost_model(doc.cost_model))


def instance_document(inst: Instance) -> dict[str, Any]:
    players = []
    for player in inst.players:
        strategies = player.strategies
        if isinstance(strategies, ExplicitPaths):
            encoded: Any = [list(path.edge_seq) for path in strategies.paths]
        else:
            encoded = {"all_paths": strategies.max_len}
        players.append({"id": player.player_id, "src": player.source, "dst": player.destination, "strategies": encoded})
    cost_model: dict[str, Any] = {"variant": inst.cost_model.variant.value}
    if inst.cost_model.degree is not None:
        cost_model["degree"] = inst.cost_model.degree
    return {
        "format_version": FORMAT_VERSION,
        "graph": {
            "nodes": inst.graph.node_count,
            "edges": [[e.edge_id, e.u, e.v] for e in inst.graph.edges],
        },
        "players": players,
        "cost_model": cost_model,
    }


def serialize_instance(inst: Instance) -> str:
    return canonical_json(instance_document(inst))


def instance_digest(inst: Instance) -> str:
    """SHA-256 of the canonical instance text."""
    return digest(serialize_instance(inst))


def parse_routing(text: str, inst: Instance) -> Routing:
    """Parse a routing document against an instance and check every path."""
    doc: RoutingDoc = _parse_doc(RoutingDoc, text)
    if len(doc.paths) != inst.player_count:
        raise InvalidRoutingError(
            f"routing has {len(doc.paths)} paths for {inst.player_count} players",
            paths=len(doc.paths),
            players=inst.player_count,
        )
    routing = Routing(
        choice=tuple(
            Path(edge_seq=tuple(seq), source=player.source, destination=player.destination)
            for seq, player in zip(doc.paths, inst.players)
        )
    )
    check_routing(inst, routing)
    return routing


def serialize_routing(routing: Routing) -> str:
    return canonical_json({"format_version": FORMAT_VERSION, "paths": [list(p.edge_seq) for p in routing.choice]})


def _diagnostic(error: ArenaError) -> dict[str, Any]:
    return error.to_payload()["error"]


def _player_diagnostics(graph: Graph, doc: _PlayerDoc) -> list[dict[str, Any]]:
    found = []
    if not graph.has_node(doc.src) or not graph.has_node(doc.dst):
        found.append(_diagnostic(InvalidPlayerError(f"player {doc.id} has an endpoint outside the graph", player_id=doc.id)))
        return found
    if doc.src == doc.dst:
        found.append(_diagnostic(InvalidPlayerError(f"player {doc.id} has source equal to destination", player_id=doc.id)))
        return found
    if isinstance(doc.strategies, _AllPathsDoc):
        distance = hop_distance(graph, doc.src, doc.dst)
        if distance is None or distance > doc.strategies.all_paths:
            found.append(_diagnostic(InvalidPlayerError(
                f"player {doc.id} has no path of length <= {doc.strategies.all_paths}", player_id=doc.id
            )))
        return found
    if not doc.strategies:
        found.append(_diagnostic(InvalidPlayerError(f"player {doc.id} has an empty strategy list", player_id=doc.id)))
    for position, seq in enumerate(doc.strategies):
        path = Path(edge_seq=tuple(seq), source=doc.src, destination=doc.dst)
        if not validate_path(graph, path):
            found.append(_diagnostic(InvalidPathError(
                f"strategy {position} of player {doc.id} is not a valid path",
                player_id=doc.id,
                strategy=position,
                edge_seq=list(seq),
            )))
    return found


def diagnose_instance(text: str) -> list[dict[str, Any]]:
    """
    Every problem found in an instance document. Document-level problems
    (syntax, version, schema, graph) stop the scan; player problems are
    collected for every player.
    """
    try:
        doc: InstanceDoc = _parse_doc(InstanceDoc, text)
        graph = _graph(doc.graph)
        _cost_model(doc.cost_model)
    except ArenaError as exc:
        return [_diagnostic(exc)]

    found = []
    ids = sorted(player.id for player in doc.players)
    if ids != list(range(len(ids))):
        found.append(_diagnostic(InvalidInstanceError(
            f"player ids must be dense in [0, {len(ids)})", player_ids=ids
        )))
    for player in doc.players:
        found.extend(_player_diagnostics(graph, player))
    if not found:
        try:
            parse_instance(text)
        except ArenaError as exc:
            found.append(_diagnostic(exc))
    logger.info("Validation found %d problems", len(found))
    return found

