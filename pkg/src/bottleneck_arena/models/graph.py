"""Undirected multigraph and path models."""

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..errors import InvalidGraphError


class Edge(BaseModel):
    """One identified edge; parallel edges differ only by edge_id."""

    model_config = ConfigDict(frozen=True)

    edge_id: int = Field(..., ge=0)
    u: int = Field(..., ge=0)
    v: int = Field(..., ge=0)

    def other(self, node: int) -> int | None:
        """Endpoint opposite to `node`, or None if `node` is not an endpoint."""
        if node == self.u:
            return self.v
        if node == self.v:
            return self.u
        return None

    @property
    def endpoints(self) -> frozenset[int]:
        return frozenset((self.u, self.v))


class Graph(BaseModel):
    """
    Undirected multigraph G = (V, E).
    Edges are stored sorted by edge_id; ids must be dense in [0, |E|).
    """

    model_config = ConfigDict(frozen=True)

    node_count: int = Field(..., ge=1)
    edges: tuple[Edge, ...] = Field(default_factory=tuple)

    @field_validator("edges")
    @classmethod
    def _dense_ids(cls, edges: tuple[Edge, ...]) -> tuple[Edge, ...]:
        ordered = tuple(sorted(edges, key=lambda e: e.edge_id))
        for idx, edge in enumerate(ordered):
            if edge.edge_id != idx:
                raise InvalidGraphError(
                    f"edge ids must be unique and dense in [0, {len(ordered)})",
                    edge_id=edge.edge_id,
                )
            if edge.u == edge.v:
                raise InvalidGraphError(f"self-loop on edge {edge.edge_id}", edge_id=edge.edge_id)
        return ordered

    @model_validator(mode="after")
    def _endpoints_in_range(self) -> "Graph":
        for edge in self.edges:
            if edge.u >= self.node_count or edge.v >= self.node_count:
                raise InvalidGraphError(
                    f"edge {edge.edge_id} has endpoint outside [0, {self.node_count})",
                    edge_id=edge.edge_id,
                )
        return self

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_node(self, node: int) -> bool:
        return 0 <= node < self.node_count

    @classmethod
    def from_pairs(cls, node_count: int, pairs: list[tuple[int, int]]) -> "Graph":
        """Build a graph numbering edges in list order."""
        return cls(
            node_count=node_count,
            edges=tuple(Edge(edge_id=i, u=u, v=v) for i, (u, v) in enumerate(pairs)),
        )


class Path(BaseModel):
    """An edge sequence walked from source to destination."""

    model_config = ConfigDict(frozen=True)

    edge_seq: tuple[int, ...] = Field(default_factory=tuple)
    source: int = Field(..., ge=0)
    destination: int = Field(..., ge=0)

    def __len__(self) -> int:
        return len(self.edge_seq)

    @property
    def edge_set(self) -> frozenset[int]:
        return frozenset(self.edge_seq)
