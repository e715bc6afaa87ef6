"""Core network representation: nodes with attribute tables, edges, adjacency.

Node ids are dense (0..N-1) and stable for a graph's lifetime. Attribute
storage is column-wise: one numpy array (or list, for text) per declared
attribute, which keeps whole-population sweeps cache-friendly and lets
models operate on columns directly during their single-writer phase.

Adjacency is CSR with neighbor lists sorted ascending, the deterministic
order every downstream tie-break relies on. A Graph belongs to exactly one
trial; it may be read from parallel workers but mutated only by one.
"""

from __future__ import annotations

import numpy as np

from .attrs import AttrKind, AttributeRange, AttrValue
from .errors import GraphError

Schema = dict[str, AttributeRange]


def _new_column(rng: AttributeRange, n: int):
    kind = rng.attr_kind
    default = rng.default().value
    if kind is AttrKind.BOOL:
        return np.full(n, default, dtype=np.bool_)
    if kind is AttrKind.INT:
        return np.full(n, default, dtype=np.int64)
    if kind is AttrKind.REAL:
        return np.full(n, default, dtype=np.float64)
    return [default] * n


def _wrap(kind: AttrKind, raw) -> AttrValue:
    if kind is AttrKind.BOOL:
        return AttrValue(kind, bool(raw))
    if kind is AttrKind.INT:
        return AttrValue(kind, int(raw))
    if kind is AttrKind.REAL:
        return AttrValue(kind, float(raw))
    return AttrValue(kind, raw)


class Graph:
    """Static-topology graph with typed node/edge attribute columns."""

    def __init__(
        self,
        directed: bool,
        node_count: int,
        node_schema: Schema | None = None,
        edge_schema: Schema | None = None,
    ):
        if node_count < 0:
            raise GraphError("node count must be non-negative")
        self.directed = directed
        self.node_count = node_count
        self.node_schema: Schema = dict(node_schema or {})
        self.edge_schema: Schema = dict(edge_schema or {})
        self._columns = {name: _new_column(r, node_count) for name, r in self.node_schema.items()}
        self._edge_columns: dict[str, object] = {}
        self.x: np.ndarray | None = None
        self.y: np.ndarray | None = None
        self.origins = np.empty(0, dtype=np.int64)
        self.targets = np.empty(0, dtype=np.int64)
        self._indptr = np.zeros(node_count + 1, dtype=np.int64)
        self._adj = np.empty(0, dtype=np.int64)

    # -- topology ------------------------------------------------------

    @property
    def edge_count(self) -> int:
        return len(self.origins)

    def _set_edges(self, origins, targets, allow_self_loops: bool) -> None:
        origins = np.asarray(origins, dtype=np.int64)
        targets = np.asarray(targets, dtype=np.int64)
        n = self.node_count
        if len(origins):
            if origins.min() < 0 or targets.min() < 0 or origins.max() >= n or targets.max() >= n:
                bad = next(
                    (o, t)
                    for o, t in zip(origins, targets)
                    if o < 0 or t < 0 or o >= n or t >= n
                )
                raise GraphError(f"edge {bad} has a dangling endpoint (node count {n})")
        if not allow_self_loops and len(origins) and (origins == targets).any():
            i = int(np.argmax(origins == targets))
            raise GraphError(f"self-loop at node {int(origins[i])}")
        seen: set[tuple[int, int]] = set()
        for o, t in zip(origins.tolist(), targets.tolist()):
            key = (min(o, t), max(o, t)) if not self.directed else (o, t)
            if key in seen:
                raise GraphError(f"duplicate edge ({o},{t})")
            seen.add(key)
        self.origins = origins
        self.targets = targets
        self._edge_columns = {
            name: _new_column(r, len(origins)) for name, r in self.edge_schema.items()
        }
        self._rebuild_adjacency()

    def _rebuild_adjacency(self) -> None:
        if self.directed:
            src, dst = self.origins, self.targets
        else:
            src = np.concatenate([self.origins, self.targets])
            dst = np.concatenate([self.targets, self.origins])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        counts = np.bincount(src, minlength=self.node_count)
        self._indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        np.cumsum(counts, out=self._indptr[1:])
        self._adj = dst

    @property
    def adj_indptr(self) -> np.ndarray:
        """CSR row pointers; read-only contract (models may cache this)."""
        return self._indptr

    @property
    def adj_targets(self) -> np.ndarray:
        """CSR neighbor ids, ascending within each row; read-only contract."""
        return self._adj

    def _check_node(self, node_id: int) -> None:
        if not 0 <= node_id < self.node_count:
            raise GraphError(f"unknown node id {node_id}")

    def neighbors(self, node_id: int) -> list[int]:
        """Neighbor ids in ascending order (out-neighbors when directed)."""
        self._check_node(node_id)
        return self._adj[self._indptr[node_id] : self._indptr[node_id + 1]].tolist()

    def degree(self, node_id: int) -> int:
        self._check_node(node_id)
        return int(self._indptr[node_id + 1] - self._indptr[node_id])

    # -- node attributes -----------------------------------------------

    def _range_of(self, name: str) -> AttributeRange:
        try:
            return self.node_schema[name]
        except KeyError:
            raise GraphError(f"attribute {name!r} is not declared on nodes") from None

    def get_attr(self, node_id: int, name: str) -> AttrValue:
        self._check_node(node_id)
        rng = self._range_of(name)
        return _wrap(rng.attr_kind, self._columns[name][node_id])

    def set_attr(self, node_id: int, name: str, value: AttrValue) -> None:
        self._check_node(node_id)
        rng = self._range_of(name)
        if not rng.validate(value):
            raise GraphError(
                f"value {value!r} invalid for attribute {name!r} ({rng.to_spec()})"
            )
        self._columns[name][node_id] = value.value

    def node_attrs(self, node_id: int) -> dict[str, AttrValue]:
        """Attribute table in schema order."""
        self._check_node(node_id)
        return {name: self.get_attr(node_id, name) for name in self.node_schema}

    def column(self, name: str):
        """Raw attribute column. Mutating it is reserved for the owning
        model's single-writer phase."""
        self._range_of(name)
        return self._columns[name]

    def set_column(self, name: str, values) -> None:
        rng = self._range_of(name)
        col = self._columns[name]
        if isinstance(col, list):
            if len(values) != self.node_count:
                raise GraphError("column length mismatch")
            self._columns[name] = list(values)
        else:
            arr = np.asarray(values, dtype=col.dtype)
            if arr.shape != col.shape:
                raise GraphError("column length mismatch")
            self._columns[name] = arr

    # -- edge attributes -----------------------------------------------

    def _edge_range_of(self, name: str) -> AttributeRange:
        try:
            return self.edge_schema[name]
        except KeyError:
            raise GraphError(f"attribute {name!r} is not declared on edges") from None

    def get_edge_attr(self, edge_id: int, name: str) -> AttrValue:
        if not 0 <= edge_id < self.edge_count:
            raise GraphError(f"unknown edge id {edge_id}")
        rng = self._edge_range_of(name)
        return _wrap(rng.attr_kind, self._edge_columns[name][edge_id])

    def set_edge_attr(self, edge_id: int, name: str, value: AttrValue) -> None:
        if not 0 <= edge_id < self.edge_count:
            raise GraphError(f"unknown edge id {edge_id}")
        rng = self._edge_range_of(name)
        if not rng.validate(value):
            raise GraphError(
                f"value {value!r} invalid for edge attribute {name!r} ({rng.to_spec()})"
            )
        self._edge_columns[name][edge_id] = value.value

    # -- layout ----------------------------------------------------------

    def set_layout(self, x, y) -> None:
        x = np.asarray(x)
        y = np.asarray(y)
        if x.shape != (self.node_count,) or y.shape != (self.node_count,):
            raise GraphError("layout arrays must have one entry per node")
        self.x = x
        self.y = y


def build_graph(
    directed: bool,
    node_count: int,
    edge_pairs,
    node_schema: Schema | None = None,
    edge_schema: Schema | None = None,
    allow_self_loops: bool = False,
) -> Graph:
    """Build a graph from explicit edge pairs; node attrs start at schema
    defaults. Rejects dangling endpoints, duplicate (undirected) pairs and
    self-loops unless explicitly allowed."""
    g = Graph(directed, node_count, node_schema, edge_schema)
    pairs = list(edge_pairs)
    origins = [p[0] for p in pairs]
    targets = [p[1] for p in pairs]
    g._set_edges(origins, targets, allow_self_loops)
    return g


def neighbors(graph: Graph, node_id: int) -> list[int]:
    """Functional form of Graph.neighbors."""
    return graph.neighbors(node_id)
