"""HTTP + WebSocket control plane over served trials.

A thin adapter over the engine's trial state machine: every endpoint
delegates to Trial methods, and serving writes disk outputs only through
the same writers as headless runs. Trials are built eagerly at startup so
nodes can be inspected and edited before a trial ever runs.

Endpoints:

    GET   /api/experiments
    POST  /api/experiments/{id}/trials/{t}/control   {"command": ..., "n": k}
    GET   /api/experiments/{id}/trials/{t}/nodes/{nodeId}
    PATCH /api/experiments/{id}/trials/{t}/nodes/{nodeId}   {"<attr>": value}
    WS    /api/stream?exp={id}&trial={t}&every={k}

Control semantics: ``run`` starts a Ready trial or resumes a paused one;
``pause`` on a Ready trial starts its runner parked at step 0 (that is
what makes the pause-edit-step steering flow race-free); ``step`` runs
exactly n steps then pauses; ``stop`` finalizes outputs. Invalid
transitions are 409, unknown ids 404, bad commands or values 400.
"""

from __future__ import annotations

import asyncio
import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket
from pydantic import BaseModel

from .engine import Trial, TrialStatus
from .errors import AttrError, ControlError, GraphError
from .models import ModelRegistry, resolve_model
from .project import Project


class ControlBody(BaseModel):
    command: str
    n: int = 1


class ServedProject:
    """All trials of a loaded project plus the worker pool driving them."""

    def __init__(
        self,
        project: Project,
        registry: ModelRegistry | None = None,
        outdir: str | Path | None = None,
        max_workers: int | None = None,
        stream_buffer: int = 64,
    ):
        self.project = project
        self.registry = registry
        self.executor = ThreadPoolExecutor(max_workers=max_workers or os.cpu_count() or 4)
        self.trials: dict[tuple[str, int], Trial] = {}
        for exp in project:
            for t in range(exp.trials):
                trial = Trial(exp, t, registry=registry, outdir=outdir,
                              stream_buffer=stream_buffer)
                try:
                    trial.build()
                except Exception as exc:  # noqa: BLE001 - surface as Failed status
                    trial.mark_failed(f"{type(exc).__name__}: {exc}")
                self.trials[(exp.id, t)] = trial

    def trial(self, exp_id: str, index: int) -> Trial:
        trial = self.trials.get((exp_id, index))
        if trial is None:
            raise HTTPException(status_code=404, detail=f"unknown trial {exp_id}/{index}")
        return trial

    def start(self, trial: Trial, mode: str) -> None:
        trial.mark_queued(mode)
        self.executor.submit(trial.run_loop)

    def shutdown(self) -> None:
        for trial in self.trials.values():
            if trial.status in (TrialStatus.QUEUED, TrialStatus.RUNNING, TrialStatus.PAUSED):
                try:
                    trial.stop(wait=False)
                except ControlError:
                    pass
        self.executor.shutdown(wait=False)


def _experiment_info(state: ServedProject, exp) -> dict:
    meta = resolve_model(exp.model_id, state.registry).meta
    if exp.graph.kind == "squareGrid":
        g = exp.graph.grid
        graph = {
            "kind": "squareGrid",
            "width": g.width,
            "height": g.height,
            "periodic": g.periodic,
            "neighborhood": g.neighborhood.value,
        }
    else:
        graph = {"kind": "edgeFile", "path": exp.graph.path}
    return {
        "id": exp.id,
        "model": exp.model_id,
        "seed": exp.seed,
        "stopAt": exp.stop_at,
        "outputs": [o.render() for o in exp.outputs],
        "graph": graph,
        "nodeAttrs": {name: r.to_spec() for name, r in meta.node_attrs.items()},
        "params": {name: v.value for name, v in exp.model_params.items()},
        "trials": [
            {
                "index": t,
                "status": state.trial(exp.id, t).status.value,
                "step": state.trial(exp.id, t).current_step,
            }
            for t in range(exp.trials)
        ],
    }


def create_app(
    project: Project,
    registry: ModelRegistry | None = None,
    outdir: str | Path | None = None,
    max_workers: int | None = None,
    stream_buffer: int = 64,
) -> FastAPI:
    state = ServedProject(project, registry, outdir, max_workers, stream_buffer)

    @asynccontextmanager
    async def lifespan(_app):
        yield
        state.shutdown()

    app = FastAPI(title="evonet control plane", lifespan=lifespan)
    app.state.served = state

    @app.get("/api/experiments")
    def list_experiments():
        return [_experiment_info(state, exp) for exp in state.project]

    @app.post("/api/experiments/{exp_id}/trials/{index}/control")
    def control(exp_id: str, index: int, body: ControlBody):
        trial = state.trial(exp_id, index)
        command = body.command
        if command not in ("run", "pause", "step", "stop", "resume"):
            raise HTTPException(status_code=400, detail=f"unknown command {command!r}")
        if command == "step" and body.n < 1:
            raise HTTPException(status_code=400, detail="n must be at least 1")
        try:
            if command in ("run", "resume"):
                if trial.status is TrialStatus.READY:
                    state.start(trial, "run")
                    trial.wait_status(
                        TrialStatus.RUNNING, TrialStatus.PAUSED,
                        TrialStatus.FINISHED, TrialStatus.FAILED, timeout=10.0,
                    )
                else:
                    trial.resume()
            elif command == "pause":
                if trial.status is TrialStatus.READY:
                    state.start(trial, "pause")
                    trial.wait_status(TrialStatus.PAUSED, TrialStatus.FAILED)
                else:
                    trial.pause()
            elif command == "step":
                if trial.status is TrialStatus.READY:
                    state.start(trial, "pause")
                    trial.wait_status(TrialStatus.PAUSED, TrialStatus.FAILED)
                trial.step_n(body.n)
            else:
                trial.stop()
        except ControlError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return {"status": trial.status.value, "step": trial.current_step}

    def _node_or_404(trial: Trial, node_id: int):
        if trial.graph is None:
            raise HTTPException(status_code=409, detail=trial.error or "trial has no graph")
        if not 0 <= node_id < trial.graph.node_count:
            raise HTTPException(status_code=404, detail=f"unknown node id {node_id}")

    def _node_payload(trial: Trial, node_id: int) -> dict:
        g = trial.graph
        return {
            "id": node_id,
            "x": float(g.x[node_id]) if g.x is not None else None,
            "y": float(g.y[node_id]) if g.y is not None else None,
            # read_node is boundary-consistent; layout is static per trial
            "attrs": {name: v.value for name, v in trial.read_node(node_id).items()},
        }

    @app.get("/api/experiments/{exp_id}/trials/{index}/nodes/{node_id}")
    def get_node(exp_id: str, index: int, node_id: int):
        trial = state.trial(exp_id, index)
        _node_or_404(trial, node_id)
        return _node_payload(trial, node_id)

    @app.patch("/api/experiments/{exp_id}/trials/{index}/nodes/{node_id}")
    def patch_node(exp_id: str, index: int, node_id: int, body: dict):
        trial = state.trial(exp_id, index)
        _node_or_404(trial, node_id)
        schema = trial.graph.node_schema
        values = {}
        for name, raw in body.items():
            rng = schema.get(name)
            if rng is None:
                raise HTTPException(status_code=400, detail=f"unknown attribute {name!r}")
            try:
                values[name] = rng.value_from_json(raw)
            except AttrError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
        try:
            echoed = trial.queue_edit(node_id, values)
        except ControlError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except GraphError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"id": node_id, "attrs": {name: v.value for name, v in echoed.items()}}

    @app.websocket("/api/stream")
    async def stream(ws: WebSocket, exp: str, trial: int, every: int = 1):
        served = state.trials.get((exp, trial))
        if served is None or every < 1 or served.graph is None:
            await ws.close(code=4404)
            return
        await ws.accept()
        sub = served.subscribe(every)

        async def sender():
            while True:
                frame = await asyncio.to_thread(sub.next_frame)
                if frame is None:
                    return
                await ws.send_json(frame)

        async def watch_disconnect():
            # receive() raises/returns disconnect when the client goes away
            while True:
                message = await ws.receive()
                if message.get("type") == "websocket.disconnect":
                    return

        send_task = asyncio.ensure_future(sender())
        watch_task = asyncio.ensure_future(watch_disconnect())
        try:
            await asyncio.wait({send_task, watch_task}, return_when=asyncio.FIRST_COMPLETED)
        finally:
            served.unsubscribe(sub)
            for task in (send_task, watch_task):
                task.cancel()
        try:
            await ws.close()
        except RuntimeError:
            pass

    return app
