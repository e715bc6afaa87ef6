"""Trial execution: deterministic runs, the pausable state machine, the
bounded-pool scheduler, statistics and output writers.

Each (experiment, trialIndex) pair is an independent work unit with its
own graph and its own PCG32 stream seeded with ``seed + trialIndex``
(wrapping 64-bit), so results are byte-identical for any worker count.
Control commands (pause/resume/step/stop) and node edits are applied at
step boundaries only; a step is never interrupted midway.
"""

from __future__ import annotations

import enum
import queue
import threading
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .attrs import AttributeRange, AttrValue, RangeKind, format_plain
from .errors import ControlError, EvonetError, GraphError, ModelError
from .generators import apply_node_tables, generate_nodes
from .graph import Graph
from .models import ModelContext, ModelRegistry, resolve_model
from .project import ExperimentSpec, Project
from .rng import Pcg32

_MASK64 = (1 << 64) - 1

# How long a control call waits for the runner to settle at a boundary.
SETTLE_TIMEOUT = 60.0


class TrialStatus(enum.Enum):
    READY = "ready"
    QUEUED = "queued"
    RUNNING = "running"
    PAUSED = "paused"
    FINISHED = "finished"
    FAILED = "failed"


def render_cell(value) -> str:
    """Canonical CSV cell text for a column scalar (numpy or native)."""
    if isinstance(value, (bool, np.bool_)):
        return format_plain(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_plain(float(value))
    return str(value)


def stats_frequency(graph: Graph, attr: str) -> dict:
    """Counts of each distinct value of a node attribute, keys ascending.

    Values that are absent from the population but members of a finite
    declared domain (sets, bool) appear with count 0, which keeps CSV
    columns stable over time.
    """
    rng = graph.node_schema.get(attr)
    if rng is None:
        raise GraphError(f"attribute {attr!r} is not declared on nodes")
    col = graph.column(attr)
    if isinstance(col, list):
        counted = Counter(col)
    else:
        values, counts = np.unique(col, return_counts=True)
        counted = {v.item(): int(c) for v, c in zip(values, counts)}
    if rng.kind in (RangeKind.INT_SET, RangeKind.REAL_SET, RangeKind.TEXT_SET):
        for m in rng.members:
            counted.setdefault(m, 0)
    elif rng.kind is RangeKind.BOOL:
        counted.setdefault(False, 0)
        counted.setdefault(True, 0)
    return {k: counted[k] for k in sorted(counted)}


# -- output rendering ------------------------------------------------------


def freq_csv_text(rows: list[tuple[int, dict]], declared: AttributeRange) -> str:
    """Render a frequency time series; one row per emission, LF endings."""
    if declared.kind in (RangeKind.INT_SET, RangeKind.REAL_SET, RangeKind.TEXT_SET):
        keys = sorted(declared.members)
    elif declared.kind is RangeKind.BOOL:
        keys = [False, True]
    else:
        keys = sorted({k for _, counts in rows for k in counts})
    lines = ["step," + ",".join(render_cell(k) for k in keys)]
    for step, counts in rows:
        lines.append(str(step) + "," + ",".join(str(counts.get(k, 0)) for k in keys))
    return "\n".join(lines) + "\n"


def nodes_snapshot_text(graph: Graph) -> str:
    names = list(graph.node_schema)
    cols = {name: graph.column(name) for name in names}
    xs, ys = graph.x, graph.y
    lines = ["id,x,y" + ("," if names else "") + ",".join(names)]
    for i in range(graph.node_count):
        x = render_cell(xs[i]) if xs is not None else ""
        y = render_cell(ys[i]) if ys is not None else ""
        cells = [str(i), x, y] + [render_cell(cols[n][i]) for n in names]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def edges_snapshot_text(graph: Graph) -> str:
    names = list(graph.edge_schema)
    lines = ["id,origin,target" + ("," if names else "") + ",".join(names)]
    for i in range(graph.edge_count):
        cells = [str(i), str(int(graph.origins[i])), str(int(graph.targets[i]))]
        cells += [render_cell(graph.get_edge_attr(i, n).value) for n in names]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


@dataclass
class TrialResult:
    """Outcome of one trial: series, final state, wall time, exit status."""

    experiment_id: str
    trial_index: int
    status: TrialStatus
    steps_run: int
    wall_time: float
    error: str | None = None
    freq_rows: dict[str, list[tuple[int, dict]]] = field(default_factory=dict)
    snapshot_steps: dict[str, list[int]] = field(default_factory=dict)
    graph: Graph | None = None
    declared: dict[str, AttributeRange] = field(default_factory=dict)

    def serialize(self) -> str:
        """Deterministic text form (excludes wall time); byte-identical
        across reruns of the same spec."""
        parts = [f"# trial {self.experiment_id} t{self.trial_index} "
                 f"status={self.status.value} steps={self.steps_run}\n"]
        for attr in sorted(self.freq_rows):
            parts.append(f"## freq {attr}\n")
            parts.append(freq_csv_text(self.freq_rows[attr], self.declared[attr]))
        if self.graph is not None:
            parts.append("## nodes\n")
            parts.append(nodes_snapshot_text(self.graph))
        return "".join(parts)


class StreamSubscriber:
    """One live consumer of a trial's frames; bounded queue, no drops."""

    def __init__(self, every: int, maxsize: int):
        if every < 1:
            raise ControlError("stream cadence must be at least 1")
        self.every = every
        self.frames: queue.Queue = queue.Queue(maxsize=maxsize)
        self.last_step = -1
        self.closed = False

    def close(self):
        self.closed = True
        try:
            self.frames.put_nowait(None)
        except queue.Full:
            pass

    def next_frame(self, poll: float = 0.5) -> dict | None:
        """Block for the next frame; None once the stream is over."""
        while True:
            try:
                item = self.frames.get(timeout=poll)
            except queue.Empty:
                if self.closed:
                    return None
                continue
            return item


class Trial:
    """One executable trial with a pausable step loop.

    Status transitions only along Ready -> Queued -> Running ->
    (Paused <-> Running) -> Finished, any state -> Failed. The run loop is
    driven by run_loop() on whatever thread the owner chooses.
    """

    def __init__(
        self,
        spec: ExperimentSpec,
        trial_index: int,
        registry: ModelRegistry | None = None,
        outdir: str | Path | None = None,
        stream_buffer: int = 64,
    ):
        self.spec = spec
        self.trial_index = trial_index
        self.registry = registry
        self.outdir = Path(outdir) if outdir is not None else None
        self.stream_buffer = stream_buffer

        self.status = TrialStatus.READY
        self.current_step = 0
        self.graph: Graph | None = None
        self.error: str | None = None
        self.result: TrialResult | None = None

        self._cv = threading.Condition()
        self._mode = "run"  # run | pause | step | stop
        self._step_budget = 0
        self._in_step = False
        self._started = False
        self._emitted_step0 = False
        self._pending_edits: list[tuple[int, dict[str, AttrValue]]] = []
        self._subscribers: list[StreamSubscriber] = []
        self._model = None
        self._ctx: ModelContext | None = None
        self._freq_rows: dict[str, list[tuple[int, dict]]] = {
            o.attr: [] for o in spec.outputs if o.kind == "freq"
        }
        self._snapshot_steps: dict[str, list[int]] = {
            o.kind: [] for o in spec.outputs if o.kind in ("nodes", "edges")
        }

    # -- construction --------------------------------------------------

    def build(self) -> None:
        """Build graph + population and run model init. Serve mode calls
        this eagerly so inspection works before the trial runs."""
        with self._cv:
            self._build_locked()

    def _build_locked(self) -> None:
        if self.graph is not None:
            return
        spec = self.spec
        plugin = resolve_model(spec.model_id, self.registry)
        rng = Pcg32((spec.seed + self.trial_index) & _MASK64)
        tables = generate_nodes(spec.nodes, plugin.meta.node_attrs, rng)
        if spec.graph.kind == "squareGrid":
            g = spec.graph.build(plugin.meta.node_attrs, plugin.meta.edge_attrs)
        else:
            g = spec.graph.build(plugin.meta.node_attrs, plugin.meta.edge_attrs, len(tables))
        apply_node_tables(g, tables)
        self._model = plugin.factory()
        self._ctx = ModelContext(graph=g, params=dict(spec.model_params), rng=rng, step=0)
        if not self._model.init(self._ctx):
            raise ModelError(self._ctx.error or "model init failed")
        self.graph = g

    # -- control ---------------------------------------------------------

    def mark_queued(self, mode: str = "run") -> None:
        with self._cv:
            if self.status is not TrialStatus.READY:
                raise ControlError(f"cannot queue a {self.status.value} trial")
            self.status = TrialStatus.QUEUED
            self._mode = mode

    def wait_status(self, *statuses: TrialStatus, timeout: float = SETTLE_TIMEOUT) -> TrialStatus:
        """Block until the trial reaches one of the given statuses."""
        with self._cv:
            self._cv.wait_for(lambda: self.status in statuses, timeout=timeout)
            return self.status

    def mark_failed(self, message: str) -> None:
        """Record an out-of-band failure (e.g. an eager build error)."""
        with self._cv:
            self.status = TrialStatus.FAILED
            self.error = message
            self._cv.notify_all()

    def pause(self, wait: bool = True) -> TrialStatus:
        with self._cv:
            if self.status not in (TrialStatus.RUNNING, TrialStatus.QUEUED):
                raise ControlError(f"cannot pause a {self.status.value} trial")
            self._mode = "pause"
            self._cv.notify_all()
            if wait:
                self._cv.wait_for(
                    lambda: self.status
                    in (TrialStatus.PAUSED, TrialStatus.FINISHED, TrialStatus.FAILED),
                    timeout=SETTLE_TIMEOUT,
                )
            return self.status

    def resume(self) -> TrialStatus:
        with self._cv:
            parked = self.status is TrialStatus.PAUSED or (
                self.status is TrialStatus.QUEUED and self._mode in ("pause", "step")
            )
            if not parked:
                raise ControlError(f"cannot resume a {self.status.value} trial")
            self._mode = "run"
            self._cv.notify_all()
            self._cv.wait_for(lambda: self.status is not TrialStatus.PAUSED, timeout=5.0)
            return self.status

    def step_n(self, n: int = 1, wait: bool = True) -> TrialStatus:
        if n < 1:
            raise ControlError("step count must be at least 1")
        with self._cv:
            parked = self.status is TrialStatus.PAUSED or (
                self.status is TrialStatus.QUEUED and self._mode in ("pause", "step")
            )
            if not parked:
                raise ControlError(f"cannot step a {self.status.value} trial")
            target = self.current_step + n
            self._mode = "step"
            self._step_budget = n
            self._cv.notify_all()
            if wait:
                self._cv.wait_for(
                    lambda: (
                        self.status
                        in (TrialStatus.PAUSED, TrialStatus.FINISHED, TrialStatus.FAILED)
                        and (self.current_step >= min(target, self.spec.stop_at)
                             or self.status is not TrialStatus.PAUSED)
                    ),
                    timeout=SETTLE_TIMEOUT,
                )
            return self.status

    def stop(self, wait: bool = True) -> TrialStatus:
        with self._cv:
            if self.status not in (TrialStatus.QUEUED, TrialStatus.RUNNING, TrialStatus.PAUSED):
                raise ControlError(f"cannot stop a {self.status.value} trial")
            self._mode = "stop"
            self._cv.notify_all()
            if wait:
                self._cv.wait_for(
                    lambda: self.status in (TrialStatus.FINISHED, TrialStatus.FAILED),
                    timeout=SETTLE_TIMEOUT,
                )
            return self.status

    # -- node edits -------------------------------------------------------

    def queue_edit(self, node_id: int, values: dict[str, AttrValue]) -> dict[str, AttrValue]:
        """Validate an edit and apply it at the next step boundary.

        Parked trials are at a boundary already, so the edit lands
        immediately; running trials get it exactly once, before the next
        model step. Returns the node's attrs with the edit in effect."""
        with self._cv:
            if self.status in (TrialStatus.FINISHED, TrialStatus.FAILED):
                raise ControlError(f"cannot edit a {self.status.value} trial")
            if self.graph is None:
                self._build_locked()
            g = self.graph
            if not 0 <= node_id < g.node_count:
                raise GraphError(f"unknown node id {node_id}")
            for name, value in values.items():
                rng = g.node_schema.get(name)
                if rng is None:
                    raise GraphError(f"attribute {name!r} is not declared on nodes")
                if not rng.validate(value):
                    raise GraphError(
                        f"value {value!r} invalid for attribute {name!r} ({rng.to_spec()})"
                    )
            if self.status is TrialStatus.RUNNING:
                self._pending_edits.append((node_id, dict(values)))
                merged = g.node_attrs(node_id)
                for nid, vals in self._pending_edits:
                    if nid == node_id:
                        merged.update(vals)
                return merged
            for name, value in values.items():
                g.set_attr(node_id, name, value)
            return g.node_attrs(node_id)

    def _apply_edits_locked(self) -> None:
        for node_id, values in self._pending_edits:
            for name, value in values.items():
                self.graph.set_attr(node_id, name, value)
        self._pending_edits.clear()

    # -- streaming --------------------------------------------------------

    def read_node(self, node_id: int) -> dict[str, AttrValue]:
        """Boundary-consistent attribute read (waits out a step in
        progress, at most one step)."""
        with self._cv:
            if self.graph is None:
                self._build_locked()
            self._cv.wait_for(lambda: not self._in_step, timeout=SETTLE_TIMEOUT)
            return self.graph.node_attrs(node_id)

    def subscribe(self, every: int = 1) -> StreamSubscriber:
        with self._cv:
            sub = StreamSubscriber(every, self.stream_buffer)
            if self.graph is None:
                self._build_locked()
            self._cv.wait_for(lambda: not self._in_step, timeout=SETTLE_TIMEOUT)
            frame = self._build_frame_locked()
            sub.last_step = self.current_step
            sub.frames.put_nowait(frame)
            self._subscribers.append(sub)
            return sub

    def unsubscribe(self, sub: StreamSubscriber) -> None:
        with self._cv:
            if sub in self._subscribers:
                self._subscribers.remove(sub)
        sub.close()

    def _build_frame_locked(self) -> dict:
        g = self.graph
        names = list(g.node_schema)
        cols = {}
        for name in names:
            col = g.column(name)
            cols[name] = col.tolist() if hasattr(col, "tolist") else list(col)
        xs = g.x.tolist() if g.x is not None else None
        ys = g.y.tolist() if g.y is not None else None
        nodes = [
            {
                "id": i,
                "x": xs[i] if xs is not None else None,
                "y": ys[i] if ys is not None else None,
                "attrs": {name: cols[name][i] for name in names},
            }
            for i in range(g.node_count)
        ]
        stats = {
            o.attr: {format_plain(k): v for k, v in stats_frequency(g, o.attr).items()}
            for o in self.spec.outputs
            if o.kind == "freq"
        }
        return {
            "experimentId": self.spec.id,
            "trialIndex": self.trial_index,
            "step": self.current_step,
            "status": self.status.value,
            "nodes": nodes,
            "stats": stats,
        }

    def _collect_frames_locked(self, final: bool = False) -> list[tuple[StreamSubscriber, dict]]:
        due = [
            sub
            for sub in self._subscribers
            if not sub.closed
            and self.current_step > sub.last_step
            and (final or self.current_step % sub.every == 0)
        ]
        if not due:
            return []
        frame = self._build_frame_locked()
        out = []
        for sub in due:
            sub.last_step = self.current_step
            out.append((sub, frame))
        return out

    @staticmethod
    def _deliver(pairs: list[tuple[StreamSubscriber, dict]]) -> None:
        # Blocking put = backpressure: a stalled subscriber pauses stepping
        # rather than losing frames; a closed one is skipped.
        for sub, frame in pairs:
            while not sub.closed:
                try:
                    sub.frames.put(frame, timeout=0.1)
                    break
                except queue.Full:
                    continue

    # -- outputs ----------------------------------------------------------

    def _emit_outputs_locked(self) -> None:
        step = self.current_step
        for out in self.spec.outputs:
            if step % out.cadence != 0:
                continue
            if out.kind == "freq":
                self._freq_rows[out.attr].append((step, stats_frequency(self.graph, out.attr)))
            else:
                self._snapshot_steps[out.kind].append(step)
                if self.outdir is not None:
                    text = (
                        nodes_snapshot_text(self.graph)
                        if out.kind == "nodes"
                        else edges_snapshot_text(self.graph)
                    )
                    name = f"{self.spec.id}_t{self.trial_index}_{out.kind}_{step}.csv"
                    self.outdir.mkdir(parents=True, exist_ok=True)
                    (self.outdir / name).write_text(text, encoding="utf-8", newline="")

    def _write_freq_files(self) -> None:
        if self.outdir is None:
            return
        meta = resolve_model(self.spec.model_id, self.registry).meta
        for attr, rows in self._freq_rows.items():
            text = freq_csv_text(rows, meta.node_attrs[attr])
            name = f"{self.spec.id}_t{self.trial_index}_freq_{attr}.csv"
            self.outdir.mkdir(parents=True, exist_ok=True)
            (self.outdir / name).write_text(text, encoding="utf-8", newline="")

    # -- the loop ---------------------------------------------------------

    def run_loop(self) -> TrialResult:
        """Execute the trial on the calling thread until Finished, Failed
        or stopped. Parks at step boundaries while paused."""
        t0 = time.perf_counter()
        try:
            with self._cv:
                if self._started:
                    raise ControlError("trial runner already started")
                self._started = True
                if self.status is TrialStatus.READY:
                    self.status = TrialStatus.QUEUED
                self._build_locked()
                if not self._emitted_step0:
                    self._emit_outputs_locked()
                    self._emitted_step0 = True
            self._main_loop()
            self._finalize(t0)
        except Exception as exc:  # noqa: BLE001 - a trial never kills its siblings
            self._finalize(t0, error=f"{type(exc).__name__}: {exc}")
        return self.result

    def _main_loop(self) -> None:
        # The cv lock is held only at step boundaries; the model step
        # itself runs unlocked (single writer: this thread) so control
        # calls and status reads stay responsive during long steps.
        spec = self.spec
        while True:
            frames: list = []
            done = False
            with self._cv:
                while self._mode == "pause":
                    self.status = TrialStatus.PAUSED
                    self._cv.notify_all()
                    self._cv.wait()
                if self._mode == "stop":
                    done = True
                elif self._mode == "step" and self._step_budget <= 0:
                    self._mode = "pause"
                    continue
                elif self.current_step >= spec.stop_at:
                    done = True
                else:
                    self._apply_edits_locked()
                    self.status = TrialStatus.RUNNING
                    self._in_step = True
                    self._ctx.step = self.current_step
                    self._cv.notify_all()
            if done:
                break

            self._model.step(self._ctx)

            with self._cv:
                self._in_step = False
                self.current_step += 1
                self._ctx.step = self.current_step
                self._emit_outputs_locked()
                if self._mode == "step":
                    self._step_budget -= 1
                done = self.current_step >= spec.stop_at or self._model.converged(self._ctx)
                if done:
                    # Completion is certain; let the final frame say so.
                    # Waiters wake from _finalize, after files are written.
                    self.status = TrialStatus.FINISHED
                else:
                    self._cv.notify_all()
                frames = self._collect_frames_locked()
            self._deliver(frames)
            if done:
                break

    def _finalize(self, t0: float, error: str | None = None) -> None:
        with self._cv:
            if error is None:
                self.status = TrialStatus.FINISHED
                self._write_freq_files()
            else:
                self.status = TrialStatus.FAILED
                self.error = error
            meta = None
            try:
                meta = resolve_model(self.spec.model_id, self.registry).meta
            except ModelError:
                pass
            self.result = TrialResult(
                experiment_id=self.spec.id,
                trial_index=self.trial_index,
                status=self.status,
                steps_run=self.current_step,
                wall_time=time.perf_counter() - t0,
                error=self.error,
                freq_rows=dict(self._freq_rows),
                snapshot_steps=dict(self._snapshot_steps),
                graph=self.graph,
                declared=dict(meta.node_attrs) if meta else {},
            )
            frames = self._collect_frames_locked(final=True)
            subs = list(self._subscribers)
            self._cv.notify_all()
        self._deliver(frames)
        for sub in subs:
            try:
                sub.frames.put_nowait(None)
            except queue.Full:
                pass


def trial_control(trial: Trial, command: str, n: int = 1) -> TrialStatus:
    """Apply a control command; raises ControlError on invalid transitions."""
    if command == "pause":
        return trial.pause()
    if command in ("resume", "run"):
        return trial.resume()
    if command == "step":
        return trial.step_n(n)
    if command == "stop":
        return trial.stop()
    raise ControlError(f"unknown control command {command!r}")


def run_trial(
    spec: ExperimentSpec,
    trial_index: int,
    outdir: str | Path | None = None,
    registry: ModelRegistry | None = None,
) -> TrialResult:
    """Run one trial to completion on the calling thread."""
    trial = Trial(spec, trial_index, registry=registry, outdir=outdir)
    return trial.run_loop()


def schedule(
    project: Project,
    max_workers: int,
    outdir: str | Path | None = None,
    registry: ModelRegistry | None = None,
) -> list[TrialResult]:
    """Run every (experiment, trialIndex) pair on a bounded worker pool.

    Results are ordered by (experiment row order, trialIndex) regardless of
    completion order; one trial failing never aborts its siblings."""
    if max_workers < 1:
        raise EvonetError("need at least one worker")
    units = [(exp, t) for exp in project for t in range(exp.trials)]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = [pool.submit(run_trial, exp, t, outdir, registry) for exp, t in units]
        return [f.result() for f in futures]
