/**
 * Grid rendering: one filled cell per node, colored by the display
 * attribute. Painting goes through a Painter so the core stays
 * canvas-free and testable; the browser adapter lives in app.ts.
 */

import { colorFor, type Colormap } from "./colormap.js";
import type { StreamFrame } from "./types.js";

export interface Painter {
  clear(cols: number, rows: number): void;
  fillCell(x: number, y: number, color: string): void;
}

export interface ViewConfig {
  attribute: string;
  colormap: Colormap;
}

/**
 * Paint a frame. Nodes missing coordinates fall back to a circular
 * layout. Returns the number of painted cells (always the node count).
 */
export function renderGrid(frame: StreamFrame, cfg: ViewConfig, painter: Painter): number {
  const nodes = frame.nodes;
  const haveCoords = nodes.every((n) => n.x !== null && n.y !== null);
  let coords: Array<[number, number]>;
  if (haveCoords) {
    coords = nodes.map((n) => [Math.round(n.x as number), Math.round(n.y as number)]);
  } else {
    const n = Math.max(nodes.length, 1);
    const radius = Math.max(1, Math.ceil(n / (2 * Math.PI)));
    coords = nodes.map((_, i) => {
      const angle = (2 * Math.PI * i) / n;
      return [
        Math.round(radius + radius * Math.cos(angle)),
        Math.round(radius + radius * Math.sin(angle)),
      ];
    });
  }
  let cols = 1;
  let rows = 1;
  for (const [x, y] of coords) {
    cols = Math.max(cols, x + 1);
    rows = Math.max(rows, y + 1);
  }
  painter.clear(cols, rows);
  let painted = 0;
  for (let i = 0; i < nodes.length; i++) {
    const [x, y] = coords[i];
    painter.fillCell(x, y, colorFor(cfg.colormap, nodes[i].attrs[cfg.attribute]));
    painted++;
  }
  return painted;
}

/** In-memory painter: the headless twin of the canvas adapter. */
export class BufferPainter implements Painter {
  cols = 0;
  rows = 0;
  cells = new Map<string, string>();

  clear(cols: number, rows: number): void {
    this.cols = cols;
    this.rows = rows;
    this.cells.clear();
  }

  fillCell(x: number, y: number, color: string): void {
    this.cells.set(`${x},${y}`, color);
  }

  at(x: number, y: number): string | undefined {
    return this.cells.get(`${x},${y}`);
  }

  count(): number {
    return this.cells.size;
  }
}
