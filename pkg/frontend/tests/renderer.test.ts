import { describe, expect, it } from "vitest";

import { parseRange } from "../src/attrRange.js";
import { colormapFor, colorFor } from "../src/colormap.js";
import { BufferPainter, renderGrid } from "../src/renderer.js";
import type { StreamFrame } from "../src/types.js";

const STRATEGY_RANGE = parseRange("int{0,1,2,3}");

function gridFrame(width: number, height: number, strategies: number[]): StreamFrame {
  return {
    experimentId: "e",
    trialIndex: 0,
    step: 0,
    status: "paused",
    nodes: strategies.map((s, i) => ({
      id: i,
      x: i % width,
      y: Math.floor(i / width),
      attrs: { strategy: s },
    })),
    stats: {},
  };
}

describe("colormap", () => {
  it("covers all declared PD values with the legend colors", () => {
    const map = colormapFor(STRATEGY_RANGE);
    expect(colorFor(map, 0)).toBe("blue");
    expect(colorFor(map, 1)).toBe("red");
    expect(colorFor(map, 2)).toBe("green");
    expect(colorFor(map, 3)).toBe("yellow");
  });

  it("assigns ascending colors to observed interval values", () => {
    const map = colormapFor(parseRange("int[0,100]"), [7, 3, 7, 50]);
    expect(colorFor(map, 3)).toBe("blue");
    expect(colorFor(map, 7)).toBe("red");
    expect(colorFor(map, 50)).toBe("green");
    expect(colorFor(map, 99)).toBe("gray");
  });
});

describe("renderGrid", () => {
  const cfg = { attribute: "strategy", colormap: colormapFor(STRATEGY_RANGE) };

  it("paints one cell per node at its coordinates", () => {
    const painter = new BufferPainter();
    const painted = renderGrid(gridFrame(3, 2, [0, 1, 2, 3, 0, 0]), cfg, painter);
    expect(painted).toBe(6);
    expect(painter.count()).toBe(6);
    expect(painter.cols).toBe(3);
    expect(painter.rows).toBe(2);
    expect(painter.at(0, 0)).toBe("blue");
    expect(painter.at(1, 0)).toBe("red");
    expect(painter.at(2, 0)).toBe("green");
    expect(painter.at(0, 1)).toBe("yellow");
  });

  it("renders the step-0 Fig. 5 frame as one red cell in a blue field", () => {
    const strategies = Array(9801).fill(0);
    strategies[4900] = 1;
    const painter = new BufferPainter();
    renderGrid(gridFrame(99, 99, strategies), cfg, painter);
    expect(painter.at(49, 49)).toBe("red");
    expect(painter.at(0, 0)).toBe("blue");
    expect(painter.count()).toBe(9801);
    const reds = [...painter.cells.values()].filter((c) => c === "red").length;
    expect(reds).toBe(1);
  });

  it("renders the step-1 cross with red center and yellow arms", () => {
    const strategies = Array(441).fill(0);
    strategies[220] = 1;
    for (const arm of [199, 219, 221, 241]) strategies[arm] = 3;
    const painter = new BufferPainter();
    renderGrid(gridFrame(21, 21, strategies), cfg, painter);
    expect(painter.at(10, 10)).toBe("red");
    for (const [x, y] of [[10, 9], [9, 10], [11, 10], [10, 11]]) {
      expect(painter.at(x, y)).toBe("yellow");
    }
    expect(painter.at(0, 0)).toBe("blue");
  });

  it("falls back to a circular layout when coordinates are missing", () => {
    const frame: StreamFrame = {
      experimentId: "e",
      trialIndex: 0,
      step: 0,
      status: "paused",
      nodes: [0, 1, 2, 3].map((i) => ({ id: i, x: null, y: null, attrs: { strategy: 0 } })),
      stats: {},
    };
    const painter = new BufferPainter();
    const painted = renderGrid(frame, cfg, painter);
    expect(painted).toBe(4);
    expect(painter.count()).toBeGreaterThan(1); // ring positions, not a pile-up
  });

  it("cell count equals frame node count for every frame", () => {
    for (const n of [1, 4, 25, 100]) {
      const width = Math.ceil(Math.sqrt(n));
      const painter = new BufferPainter();
      const strategies = Array(n).fill(0);
      const frame = gridFrame(width, Math.ceil(n / width), strategies);
      expect(renderGrid(frame, cfg, painter)).toBe(n);
    }
  });
});
