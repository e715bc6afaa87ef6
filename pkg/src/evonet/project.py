"""Project tables: one CSV row = one experiment.

Reserved columns: ``id,model,trials,seed,stopAt,nodes,graph,outputs``.
Model parameters and graph parameters ride along in namespaced columns
(``model.<param>``, ``graph.<param>``). Unknown columns are hard errors so
a typo like ``model.temptaton`` cannot silently run a default-parameter
experiment; empty namespaced cells fall back to the declared default.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field

from .attrs import AttrValue, format_value
from .errors import AttrError, GeneratorError, ProjectError
from .generators import (
    GridSpec,
    Neighborhood,
    NodesSpec,
    graph_from_edge_file,
    parse_nodes_spec,
    square_grid,
)
from .graph import Graph
from .models import ModelRegistry, resolve_model

RESERVED_COLUMNS = ("id", "model", "trials", "seed", "stopAt", "nodes", "graph", "outputs")

# Canonical order for serialized graph.* columns.
GRAPH_PARAMS = ("width", "height", "periodic", "neighborhood", "path")

_OUTPUT_RE = re.compile(r"(freq|snapshot)\((\w+)\)(?:@(\d+))?\Z")


@dataclass(frozen=True)
class OutputRequest:
    """One requested output: value frequencies or node/edge snapshots."""

    kind: str  # "freq" | "nodes" | "edges"
    attr: str | None = None  # the counted attribute, for freq
    cadence: int = 1

    def __post_init__(self):
        if self.cadence < 1:
            raise ProjectError("output cadence must be at least 1")

    def render(self) -> str:
        base = f"freq({self.attr})" if self.kind == "freq" else f"snapshot({self.kind})"
        return base if self.cadence == 1 else f"{base}@{self.cadence}"


@dataclass(frozen=True)
class GraphSource:
    """Where an experiment's topology comes from."""

    kind: str  # "squareGrid" | "edgeFile"
    grid: GridSpec | None = None
    path: str | None = None

    def build(self, node_schema, edge_schema, node_count: int | None = None) -> Graph:
        if self.kind == "squareGrid":
            return square_grid(self.grid, node_schema, edge_schema)
        return graph_from_edge_file(self.path, node_count, node_schema, edge_schema)


@dataclass
class ExperimentSpec:
    """A complete parameterization of one experiment (one CSV row)."""

    id: str
    model_id: str
    model_params: dict[str, AttrValue]
    graph: GraphSource
    nodes: NodesSpec
    seed: int
    stop_at: int
    trials: int
    outputs: tuple[OutputRequest, ...] = field(default_factory=tuple)


Project = list[ExperimentSpec]


def _parse_int(cell: str, what: str, row_id: str) -> int:
    try:
        return int(cell.strip())
    except ValueError:
        raise ProjectError(f"experiment {row_id!r}: {what} must be an integer, got {cell!r}") from None


def _parse_outputs(cell: str, row_id: str, node_schema) -> tuple[OutputRequest, ...]:
    cell = cell.strip()
    if not cell:
        return ()
    out = []
    for part in cell.split(";"):
        part = part.strip()
        m = _OUTPUT_RE.match(part)
        if not m:
            raise ProjectError(f"experiment {row_id!r}: bad output request {part!r}")
        head, arg, cadence = m.group(1), m.group(2), int(m.group(3) or 1)
        if head == "freq":
            if arg not in node_schema:
                raise ProjectError(
                    f"experiment {row_id!r}: freq({arg}) references an undeclared node attribute"
                )
            out.append(OutputRequest("freq", attr=arg, cadence=cadence))
        else:
            if arg not in ("nodes", "edges"):
                raise ProjectError(
                    f"experiment {row_id!r}: snapshot target must be nodes or edges, got {arg!r}"
                )
            out.append(OutputRequest(arg, cadence=cadence))
    return tuple(out)


def _parse_graph_source(kind: str, params: dict[str, str], row_id: str) -> GraphSource:
    def take(name: str) -> str | None:
        v = params.pop(name, "")
        return v if v != "" else None

    if kind == "squareGrid":
        width = take("width")
        height = take("height")
        if width is None or height is None:
            raise ProjectError(f"experiment {row_id!r}: squareGrid needs graph.width and graph.height")
        periodic_cell = take("periodic")
        neighborhood_cell = take("neighborhood")
        periodic = False
        if periodic_cell is not None:
            low = periodic_cell.lower()
            if low not in ("true", "false"):
                raise ProjectError(f"experiment {row_id!r}: graph.periodic must be true/false")
            periodic = low == "true"
        neighborhood = Neighborhood.VON_NEUMANN
        if neighborhood_cell is not None:
            try:
                neighborhood = Neighborhood(neighborhood_cell)
            except ValueError:
                raise ProjectError(
                    f"experiment {row_id!r}: graph.neighborhood must be vonNeumann or moore"
                ) from None
        try:
            grid = GridSpec(
                width=_parse_int(width, "graph.width", row_id),
                height=_parse_int(height, "graph.height", row_id),
                periodic=periodic,
                neighborhood=neighborhood,
            )
        except GeneratorError as exc:
            raise ProjectError(f"experiment {row_id!r}: {exc}") from exc
        source = GraphSource("squareGrid", grid=grid)
    elif kind == "edgeFile":
        path = take("path")
        if path is None:
            raise ProjectError(f"experiment {row_id!r}: edgeFile needs graph.path")
        source = GraphSource("edgeFile", path=path)
    else:
        raise ProjectError(f"experiment {row_id!r}: unknown graph kind {kind!r}")

    leftovers = {k: v for k, v in params.items() if v != ""}
    if leftovers:
        raise ProjectError(
            f"experiment {row_id!r}: graph parameter(s) {sorted(leftovers)} "
            f"do not apply to {kind}"
        )
    return source


def parse_project(csv_text: str, registry: ModelRegistry | None = None) -> Project:
    """Parse a project CSV into validated experiment specs."""
    reader = csv.reader(io.StringIO(csv_text))
    rows = [row for row in reader if row and row != [""]]
    if not rows:
        raise ProjectError("project file is empty")
    header = [c.strip() for c in rows[0]]

    missing = [c for c in RESERVED_COLUMNS if c not in header]
    if missing:
        raise ProjectError(f"project header is missing reserved column(s) {missing}")
    seen_cols = set()
    model_cols: list[str] = []
    graph_cols: list[str] = []
    for col in header:
        if col in seen_cols:
            raise ProjectError(f"duplicate column {col!r} in project header")
        seen_cols.add(col)
        if col in RESERVED_COLUMNS:
            continue
        if col.startswith("model."):
            name = col[len("model.") :]
            if not name:
                raise ProjectError("empty model parameter column name")
            model_cols.append(name)
        elif col.startswith("graph."):
            name = col[len("graph.") :]
            if name not in GRAPH_PARAMS:
                raise ProjectError(f"unknown graph parameter column graph.{name}")
            graph_cols.append(name)
        else:
            raise ProjectError(f"unknown column {col!r} in project header")

    idx = {c: i for i, c in enumerate(header)}
    experiments: list[ExperimentSpec] = []
    ids: set[str] = set()
    used_model_cols: set[str] = set()

    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ProjectError(f"line {lineno}: expected {len(header)} cells, got {len(row)}")

        def cell(col: str) -> str:
            return row[idx[col]].strip()

        exp_id = cell("id")
        if not exp_id:
            raise ProjectError(f"line {lineno}: experiment id must be non-empty")
        if exp_id in ids:
            raise ProjectError(f"duplicate experiment id {exp_id!r}")
        ids.add(exp_id)

        plugin = resolve_model(cell("model"), registry)
        meta = plugin.meta

        trials = _parse_int(cell("trials"), "trials", exp_id)
        if trials < 1:
            raise ProjectError(f"experiment {exp_id!r}: trials must be at least 1")
        seed = _parse_int(cell("seed"), "seed", exp_id)
        stop_at = _parse_int(cell("stopAt"), "stopAt", exp_id)
        if stop_at < 0:
            raise ProjectError(f"experiment {exp_id!r}: stopAt must be non-negative")

        try:
            nodes = parse_nodes_spec(cell("nodes"))
        except GeneratorError as exc:
            raise ProjectError(f"experiment {exp_id!r}: {exc}") from exc

        graph_params = {name: row[idx[f"graph.{name}"]].strip() for name in graph_cols}
        source = _parse_graph_source(cell("graph"), graph_params, exp_id)

        params: dict[str, AttrValue] = {}
        for name, rng in meta.params.items():
            params[name] = rng.default()
        for name in model_cols:
            raw = row[idx[f"model.{name}"]].strip()
            if raw == "":
                continue
            used_model_cols.add(name)
            if name not in meta.params:
                raise ProjectError(
                    f"experiment {exp_id!r}: model.{name} is not a declared parameter "
                    f"of {meta.id!r}"
                )
            try:
                params[name] = meta.params[name].value_from_text(raw)
            except AttrError as exc:
                raise ProjectError(f"experiment {exp_id!r}: model.{name}: {exc}") from exc
        used_model_cols.update(n for n in model_cols if n in meta.params)

        outputs = _parse_outputs(cell("outputs"), exp_id, meta.node_attrs)

        if source.kind == "squareGrid" and nodes.count is not None:
            expected = source.grid.width * source.grid.height
            if nodes.count != expected:
                raise ProjectError(
                    f"experiment {exp_id!r}: nodes spec declares {nodes.count} nodes but the "
                    f"{source.grid.width}x{source.grid.height} grid has {expected}"
                )

        experiments.append(
            ExperimentSpec(
                id=exp_id,
                model_id=meta.id,
                model_params=params,
                graph=source,
                nodes=nodes,
                seed=seed,
                stop_at=stop_at,
                trials=trials,
                outputs=outputs,
            )
        )

    ghost = [n for n in model_cols if n not in used_model_cols]
    if ghost:
        raise ProjectError(
            f"model parameter column(s) {sorted('model.' + g for g in ghost)} are not "
            f"declared by any model referenced in this project"
        )
    return experiments


def serialize_project(project: Project) -> str:
    """Render experiments back to the project CSV format; parse_project of
    the result reproduces the project."""
    graph_used = [
        p
        for p in GRAPH_PARAMS
        if any(
            (p in ("width", "height", "periodic", "neighborhood") and e.graph.kind == "squareGrid")
            or (p == "path" and e.graph.kind == "edgeFile")
            for e in project
        )
    ]
    model_used = sorted({name for e in project for name in e.model_params})
    header = (
        list(RESERVED_COLUMNS)
        + [f"graph.{p}" for p in graph_used]
        + [f"model.{p}" for p in model_used]
    )

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for e in project:
        row = [
            e.id,
            e.model_id,
            str(e.trials),
            str(e.seed),
            str(e.stop_at),
            e.nodes.render(),
            e.graph.kind,
            ";".join(o.render() for o in e.outputs),
        ]
        for p in graph_used:
            if e.graph.kind == "squareGrid" and p != "path":
                g = e.graph.grid
                val = {
                    "width": str(g.width),
                    "height": str(g.height),
                    "periodic": "true" if g.periodic else "false",
                    "neighborhood": g.neighborhood.value,
                }[p]
            elif e.graph.kind == "edgeFile" and p == "path":
                val = e.graph.path
            else:
                val = ""
            row.append(val)
        for p in model_used:
            row.append(format_value(e.model_params[p]) if p in e.model_params else "")
        writer.writerow(row)
    return buf.getvalue()
