/**
 * Browser entry point: wires the API client, grid views, playback
 * controls and the node inspector to the DOM. All logic that deserves
 * tests lives in the modules this file composes.
 */

import { parseRange } from "./attrRange.js";
import { ApiClient } from "./client.js";
import { colormapFor } from "./colormap.js";
import { Inspector } from "./inspector.js";
import { renderGrid, type Painter, type ViewConfig } from "./renderer.js";
import { TrialView } from "./view.js";
import type { ExperimentInfo, StreamFrame } from "./types.js";

class CanvasPainter implements Painter {
  private ctx: CanvasRenderingContext2D;
  cellSize = 6;
  cols = 0;
  rows = 0;

  constructor(private canvas: HTMLCanvasElement) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
  }

  clear(cols: number, rows: number): void {
    this.cols = cols;
    this.rows = rows;
    this.cellSize = Math.max(2, Math.floor(600 / Math.max(cols, rows)));
    this.canvas.width = cols * this.cellSize;
    this.canvas.height = rows * this.cellSize;
    this.ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
  }

  fillCell(x: number, y: number, color: string): void {
    this.ctx.fillStyle = color;
    this.ctx.fillRect(x * this.cellSize, y * this.cellSize, this.cellSize, this.cellSize);
  }

  cellAt(pixelX: number, pixelY: number): [number, number] {
    return [Math.floor(pixelX / this.cellSize), Math.floor(pixelY / this.cellSize)];
  }
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(location.search);
  const base = params.get("server") ?? `${location.protocol}//${location.host}`;
  const client = new ApiClient(base);
  const experiments = await client.listExperiments();
  if (experiments.length === 0) {
    el<HTMLDivElement>("status").textContent = "no experiments served";
    return;
  }

  const expSelect = el<HTMLSelectElement>("experiment");
  for (const exp of experiments) {
    const option = document.createElement("option");
    option.value = exp.id;
    option.textContent = `${exp.id} (${exp.model})`;
    expSelect.appendChild(option);
  }

  const trialSelect = el<HTMLSelectElement>("trial");
  const attrSelect = el<HTMLSelectElement>("attribute");
  const statusLine = el<HTMLDivElement>("status");
  const canvas = el<HTMLCanvasElement>("grid");
  const painter = new CanvasPainter(canvas);

  let current: ExperimentInfo = experiments[0];
  let trialIndex = 0;
  let closeStream: (() => void) | null = null;
  let inspector = new Inspector(client, current.nodeAttrs);
  let cfg: ViewConfig = {
    attribute: Object.keys(current.nodeAttrs)[0],
    colormap: colormapFor(parseRange(Object.values(current.nodeAttrs)[0])),
  };
  let lastFrame: StreamFrame | null = null;

  const view = new TrialView((frame) => {
    lastFrame = frame;
    renderGrid(frame, cfg, painter);
    inspector.confirm(frame);
    statusLine.textContent =
      `${frame.experimentId} t${frame.trialIndex} — step ${frame.step} (${frame.status})`;
  });

  function rebuildSelectors(): void {
    trialSelect.innerHTML = "";
    for (const t of current.trials) {
      const option = document.createElement("option");
      option.value = String(t.index);
      option.textContent = `trial ${t.index}`;
      trialSelect.appendChild(option);
    }
    attrSelect.innerHTML = "";
    for (const name of Object.keys(current.nodeAttrs)) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = name;
      attrSelect.appendChild(option);
    }
  }

  function resubscribe(): void {
    closeStream?.();
    inspector = new Inspector(client, current.nodeAttrs);
    cfg = {
      attribute: attrSelect.value || Object.keys(current.nodeAttrs)[0],
      colormap: colormapFor(parseRange(current.nodeAttrs[attrSelect.value] ?? Object.values(current.nodeAttrs)[0])),
    };
    const handle = client.openStream(current.id, trialIndex, 1, (frame) => view.onFrame(frame));
    closeStream = () => handle.close();
  }

  expSelect.onchange = () => {
    current = experiments.find((e) => e.id === expSelect.value) ?? experiments[0];
    trialIndex = 0;
    rebuildSelectors();
    resubscribe();
  };
  trialSelect.onchange = () => {
    trialIndex = Number(trialSelect.value);
    resubscribe();
  };
  attrSelect.onchange = resubscribe;

  for (const command of ["run", "pause", "stop"] as const) {
    el<HTMLButtonElement>(command).onclick = async () => {
      try {
        const result = await client.control(current.id, trialIndex, command);
        statusLine.textContent = `${command}: ${result.status} @ step ${result.step}`;
      } catch (error) {
        statusLine.textContent = String(error);
      }
    };
  }
  el<HTMLButtonElement>("step").onclick = async () => {
    try {
      await client.control(current.id, trialIndex, "step", 1);
    } catch (error) {
      statusLine.textContent = String(error);
    }
  };

  canvas.onclick = async (event) => {
    if (!lastFrame) return;
    const rect = canvas.getBoundingClientRect();
    const [cx, cy] = painter.cellAt(event.clientX - rect.left, event.clientY - rect.top);
    const node = lastFrame.nodes.find(
      (n) => Math.round(n.x ?? -1) === cx && Math.round(n.y ?? -1) === cy,
    );
    if (!node) return;
    const attr = cfg.attribute;
    const input = prompt(
      `node ${node.id} ${attr} = ${node.attrs[attr]} (${current.nodeAttrs[attr]})`,
      String(node.attrs[attr]),
    );
    if (input === null) return;
    const range = parseRange(current.nodeAttrs[attr]);
    const value =
      range.kind === "bool" ? input === "true" :
      range.kind.startsWith("text") ? input : Number(input);
    try {
      await inspector.edit(current.id, trialIndex, node.id, attr, value, lastFrame.step);
      statusLine.textContent = `node ${node.id}: ${attr} -> ${value} (pending)`;
    } catch (error) {
      statusLine.textContent = String(error);
    }
  };

  rebuildSelectors();
  resubscribe();
}

boot().catch((error) => {
  const status = document.getElementById("status");
  if (status) status.textContent = String(error);
});
