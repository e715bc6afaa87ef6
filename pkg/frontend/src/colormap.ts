/**
 * Value -> color assignment, data-driven from the streamed schema. The
 * first four colors follow the PD legend: cooperators blue, defectors
 * red, new cooperators green, new defectors yellow.
 */

import { declaredValues, type RangeSpec } from "./attrRange.js";
import type { AttrScalar } from "./types.js";

export const PD_PALETTE = ["blue", "red", "green", "yellow"];

const EXTENDED_PALETTE = [
  ...PD_PALETTE,
  "purple",
  "orange",
  "cyan",
  "brown",
  "magenta",
  "teal",
];

export const FALLBACK_COLOR = "gray";

export type Colormap = Map<string, string>;

export function colormapKey(value: AttrScalar): string {
  return String(value);
}

/**
 * Build a colormap covering every declared value of a finite range
 * (ascending); interval ranges get colors for the observed values.
 */
export function colormapFor(range: RangeSpec, observed: AttrScalar[] = []): Colormap {
  const values = declaredValues(range) ?? dedupeSorted(observed);
  const map: Colormap = new Map();
  values.forEach((v, i) => {
    map.set(colormapKey(v), EXTENDED_PALETTE[i % EXTENDED_PALETTE.length]);
  });
  return map;
}

export function colorFor(map: Colormap, value: AttrScalar): string {
  return map.get(colormapKey(value)) ?? FALLBACK_COLOR;
}

function dedupeSorted(values: AttrScalar[]): AttrScalar[] {
  const unique = [...new Set(values)];
  unique.sort((a, b) => (a < b ? -1 : a > b ? 1 : 0));
  return unique;
}
