"""Initial graphs and initial node populations from declarative specs.

Three entry points:

* ``square_grid`` -- lattices with von Neumann or Moore neighborhoods,
  optionally periodic (torus). Nodes are numbered row-major
  (id = row*width + col) with coordinates (x=col, y=row).
* ``graph_from_edge_file`` -- arbitrary topologies from a CSV edge list.
* ``generate_nodes`` -- initial attribute tables from the nodes
  mini-language::

      same(N; attr=value,...)      N identical tables over schema defaults
      random(N; seed)              every attribute drawn from PCG32(seed)
      file(path)                   one row per node from a CSV
      ... | set(id: attr=value)    per-node patches, applied last, in order

All of these are pure functions of their inputs plus an explicit PRNG and
are safe to call from any worker.
"""

from __future__ import annotations

import csv
import enum
import math
import re
from dataclasses import dataclass, field

from .attrs import AttributeRange, AttrValue
from .errors import GeneratorError, GraphError
from .graph import Graph, Schema, build_graph
from .rng import Pcg32

import numpy as np


class Neighborhood(enum.Enum):
    VON_NEUMANN = "vonNeumann"
    MOORE = "moore"


@dataclass(frozen=True)
class GridSpec:
    width: int
    height: int
    periodic: bool = False
    neighborhood: Neighborhood = Neighborhood.VON_NEUMANN

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise GeneratorError("grid dimensions must be at least 1x1")
        if self.periodic and (self.width < 3 or self.height < 3):
            raise GeneratorError(
                "periodic grids need width and height >= 3 "
                "(wrap-around would duplicate edges)"
            )


# Half of each neighborhood's offsets, so every undirected pair is
# produced exactly once when sweeping nodes row-major.
_HALF_OFFSETS = {
    Neighborhood.VON_NEUMANN: ((1, 0), (0, 1)),
    Neighborhood.MOORE: ((1, 0), (0, 1), (1, 1), (-1, 1)),
}


def square_grid(
    spec: GridSpec,
    node_schema: Schema | None = None,
    edge_schema: Schema | None = None,
) -> Graph:
    """Build a width x height lattice; attrs start at schema defaults."""
    w, h = spec.width, spec.height
    pairs: list[tuple[int, int]] = []
    for row in range(h):
        for col in range(w):
            origin = row * w + col
            for dc, dr in _HALF_OFFSETS[spec.neighborhood]:
                c, r = col + dc, row + dr
                if spec.periodic:
                    c, r = c % w, r % h
                elif not (0 <= c < w and 0 <= r < h):
                    continue
                pairs.append((origin, r * w + c))
    g = build_graph(False, w * h, pairs, node_schema, edge_schema)
    cols = np.arange(w * h, dtype=np.int64) % w
    rows = np.arange(w * h, dtype=np.int64) // w
    g.set_layout(cols, rows)
    return g


def _circular_layout(g: Graph) -> None:
    n = max(g.node_count, 1)
    angles = 2.0 * math.pi * np.arange(g.node_count, dtype=np.float64) / n
    g.set_layout(np.cos(angles), np.sin(angles))


def graph_from_edge_file(
    path: str,
    node_count: int,
    node_schema: Schema | None = None,
    edge_schema: Schema | None = None,
) -> Graph:
    """Graph from a CSV edge list.

    Header ``origin,target`` gives an undirected graph. Header
    ``origin,target,directed`` gives a directed graph; a row with a false
    flag contributes both arcs. Nodes get a circular layout (node i at
    angle 2*pi*i/N on the unit circle).
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise GeneratorError(f"cannot read edge file {path!r}: {exc}") from exc
    if not rows:
        raise GeneratorError(f"edge file {path!r} is empty (header required)")
    header = [c.strip() for c in rows[0]]
    if header == ["origin", "target"]:
        directed = False
    elif header == ["origin", "target", "directed"]:
        directed = True
    else:
        raise GeneratorError(
            f"edge file {path!r}: header must be origin,target[,directed], got {header}"
        )

    pairs: list[tuple[int, int]] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or row == [""]:
            continue
        if len(row) != len(header):
            raise GeneratorError(f"edge file {path!r} line {lineno}: wrong column count")
        try:
            o, t = int(row[0]), int(row[1])
        except ValueError:
            raise GeneratorError(
                f"edge file {path!r} line {lineno}: node ids must be integers"
            ) from None
        if directed:
            flag = row[2].strip().lower()
            if flag not in ("true", "false"):
                raise GeneratorError(
                    f"edge file {path!r} line {lineno}: directed flag must be true/false"
                )
            pairs.append((o, t))
            if flag == "false":
                pairs.append((t, o))
        else:
            pairs.append((o, t))

    try:
        g = build_graph(directed, node_count, pairs, node_schema, edge_schema)
    except GraphError as exc:
        raise GeneratorError(f"edge file {path!r}: {exc}") from exc
    _circular_layout(g)
    return g


# -- nodes mini-language -------------------------------------------------

_CLAUSE_RE = re.compile(r"(\w+)\s*\((.*)\)\s*\Z", re.DOTALL)


@dataclass(frozen=True)
class SetPatch:
    node_id: int
    assignments: tuple[tuple[str, str], ...]

    def render(self) -> str:
        body = ", ".join(f"{a}={v}" for a, v in self.assignments)
        return f"set({self.node_id}: {body})"


@dataclass(frozen=True)
class NodesSpec:
    """Parsed form of one nodes-generator command chain."""

    command: str  # same | random | file
    count: int | None = None
    assignments: tuple[tuple[str, str], ...] = ()
    seed: int | None = None
    path: str | None = None
    patches: tuple[SetPatch, ...] = field(default=())

    def render(self) -> str:
        if self.command == "same":
            if self.assignments:
                body = ", ".join(f"{a}={v}" for a, v in self.assignments)
                base = f"same({self.count}; {body})"
            else:
                base = f"same({self.count})"
        elif self.command == "random":
            base = (
                f"random({self.count}; {self.seed})"
                if self.seed is not None
                else f"random({self.count})"
            )
        else:
            base = f"file({self.path})"
        return " | ".join([base] + [p.render() for p in self.patches])


def _parse_assignments(body: str, where: str) -> tuple[tuple[str, str], ...]:
    out = []
    for part in body.split(","):
        part = part.strip()
        if not part:
            raise GeneratorError(f"empty assignment in {where}")
        if "=" not in part:
            raise GeneratorError(f"assignment must be attr=value in {where}: {part!r}")
        name, value = part.split("=", 1)
        name, value = name.strip(), value.strip()
        if not name:
            raise GeneratorError(f"missing attribute name in {where}: {part!r}")
        out.append((name, value))
    return tuple(out)


def parse_nodes_spec(spec_text: str) -> NodesSpec:
    """Parse a nodes command chain; patch targets are checked later, when
    the schema and population size are known."""
    clauses = [c.strip() for c in spec_text.split("|")]
    if not clauses or not clauses[0]:
        raise GeneratorError(f"empty nodes spec {spec_text!r}")

    m = _CLAUSE_RE.match(clauses[0])
    if not m:
        raise GeneratorError(f"malformed nodes command {clauses[0]!r}")
    cmd, body = m.group(1), m.group(2).strip()

    if cmd == "same":
        head, _, rest = body.partition(";")
        try:
            count = int(head.strip())
        except ValueError:
            raise GeneratorError(f"same() needs an integer count, got {head!r}") from None
        if count < 1:
            raise GeneratorError("node count must be at least 1")
        assignments = _parse_assignments(rest, "same()") if rest.strip() else ()
        base = NodesSpec("same", count=count, assignments=assignments)
    elif cmd == "random":
        head, _, rest = body.partition(";")
        try:
            count = int(head.strip())
        except ValueError:
            raise GeneratorError(f"random() needs an integer count, got {head!r}") from None
        if count < 1:
            raise GeneratorError("node count must be at least 1")
        seed = None
        if rest.strip():
            try:
                seed = int(rest.strip())
            except ValueError:
                raise GeneratorError(f"random() seed must be an integer, got {rest!r}") from None
        base = NodesSpec("random", count=count, seed=seed)
    elif cmd == "file":
        if not body:
            raise GeneratorError("file() needs a path")
        base = NodesSpec("file", path=body)
    else:
        raise GeneratorError(f"unknown nodes command {cmd!r}")

    patches = []
    for clause in clauses[1:]:
        m = _CLAUSE_RE.match(clause)
        if not m or m.group(1) != "set":
            raise GeneratorError(f"expected set(...) patch, got {clause!r}")
        body = m.group(2)
        head, sep, rest = body.partition(":")
        if not sep:
            raise GeneratorError(f"set() needs 'id: attr=value', got {clause!r}")
        try:
            node_id = int(head.strip())
        except ValueError:
            raise GeneratorError(f"set() node id must be an integer, got {head!r}") from None
        patches.append(SetPatch(node_id, _parse_assignments(rest, "set()")))

    return NodesSpec(
        base.command,
        count=base.count,
        assignments=base.assignments,
        seed=base.seed,
        path=base.path,
        patches=tuple(patches),
    )


def _schema_range(schema: Schema, name: str) -> AttributeRange:
    try:
        return schema[name]
    except KeyError:
        raise GeneratorError(f"attribute {name!r} is not declared in the schema") from None


def _load_nodes_file(path: str, schema: Schema) -> list[dict]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise GeneratorError(f"cannot read nodes file {path!r}: {exc}") from exc
    if not rows:
        raise GeneratorError(f"nodes file {path!r} is empty (header required)")
    header = [c.strip() for c in rows[0]]
    for name in header:
        if name not in ("x", "y"):
            _schema_range(schema, name)
    tables: list[dict] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or row == [""]:
            continue
        if len(row) != len(header):
            raise GeneratorError(f"nodes file {path!r} line {lineno}: wrong column count")
        table: dict = {name: schema[name].default() for name in schema}
        for name, cell in zip(header, row):
            if name in ("x", "y"):
                try:
                    table[name] = float(cell)
                except ValueError:
                    raise GeneratorError(
                        f"nodes file {path!r} line {lineno}: {name} must be numeric"
                    ) from None
            else:
                table[name] = schema[name].value_from_text(cell)
        tables.append(table)
    if not tables:
        raise GeneratorError(f"nodes file {path!r} has no data rows")
    return tables


def generate_nodes(
    spec: NodesSpec | str,
    schema: Schema,
    rng: Pcg32 | None = None,
) -> list[dict]:
    """Produce one attribute table per node.

    Tables map attribute name -> AttrValue in schema order. Tables loaded
    from a nodes file may additionally carry plain-float ``x``/``y`` keys
    for layout; those are coordinates, not attributes.

    ``random(N; seed)`` draws every attribute per node (schema order) from
    a fresh PCG32 stream of the written seed, so the population is fully
    determined by the project file; the seedless form ``random(N)`` draws
    from the caller's rng instead.
    """
    if isinstance(spec, str):
        spec = parse_nodes_spec(spec)

    if spec.command == "same":
        overrides = {
            name: _schema_range(schema, name).value_from_text(value)
            for name, value in spec.assignments
        }
        base = {name: schema[name].default() for name in schema}
        base.update(overrides)
        tables = [dict(base) for _ in range(spec.count)]
    elif spec.command == "random":
        if spec.seed is not None:
            draw_rng = Pcg32(spec.seed)
        elif rng is not None:
            draw_rng = rng
        else:
            raise GeneratorError("random() without a seed needs an explicit rng")
        tables = []
        for _ in range(spec.count):
            tables.append({name: r.random_value(draw_rng) for name, r in schema.items()})
    else:
        tables = _load_nodes_file(spec.path, schema)

    n = len(tables)
    for patch in spec.patches:
        if not 0 <= patch.node_id < n:
            raise GeneratorError(
                f"set() patch targets node {patch.node_id} but there are {n} nodes"
            )
        for name, value in patch.assignments:
            tables[patch.node_id][name] = _schema_range(schema, name).value_from_text(value)
    return tables


def apply_node_tables(graph: Graph, tables: list[dict]) -> None:
    """Write generated tables onto a graph; x/y keys become layout."""
    if len(tables) != graph.node_count:
        raise GeneratorError(
            f"got {len(tables)} node tables for a graph of {graph.node_count} nodes"
        )
    has_xy = any("x" in t or "y" in t for t in tables)
    if has_xy:
        xs = np.zeros(graph.node_count, dtype=np.float64)
        ys = np.zeros(graph.node_count, dtype=np.float64)
        if graph.x is not None:
            xs[:] = graph.x
            ys[:] = graph.y
    for node_id, table in enumerate(tables):
        for name, value in table.items():
            if name == "x":
                xs[node_id] = value
            elif name == "y":
                ys[node_id] = value
            else:
                if not isinstance(value, AttrValue):
                    raise GeneratorError(f"table value for {name!r} must be an AttrValue")
                graph.set_attr(node_id, name, value)
    if has_xy:
        graph.set_layout(xs, ys)
