/**
 * Client-side mirror of the attribute range grammar, used to reject bad
 * inspector edits before any request leaves the browser.
 */

import type { AttrScalar } from "./types.js";

export type RangeSpec =
  | { kind: "bool" }
  | { kind: "text" }
  | { kind: "int-interval"; lo: number; hi: number }
  | { kind: "real-interval"; lo: number; hi: number }
  | { kind: "int-set"; members: number[] }
  | { kind: "real-set"; members: number[] }
  | { kind: "text-set"; members: string[] };

const INT_RE = /^[+-]?\d+$/;
const REAL_RE = /^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$/;

function parseNumber(token: string, integer: boolean): number {
  const t = token.trim();
  if (integer ? !INT_RE.test(t) : !REAL_RE.test(t)) {
    throw new Error(`bad ${integer ? "integer" : "real"} literal '${t}'`);
  }
  return Number(t);
}

export function parseRange(spec: string): RangeSpec {
  const s = spec.trim();
  if (s === "bool") return { kind: "bool" };
  if (s === "string") return { kind: "text" };
  const m = s.match(/^(int|double|string)\s*([[{])(.*)([\]}])$/s);
  if (!m) throw new Error(`malformed attribute range '${spec}'`);
  const [, base, opener, body, closer] = m;
  if ((opener === "[") !== (closer === "]")) {
    throw new Error(`mismatched brackets in '${spec}'`);
  }
  if (opener === "[") {
    if (base === "string") throw new Error("string ranges must be sets");
    const parts = body.split(",");
    if (parts.length !== 2) throw new Error(`interval needs two bounds: '${spec}'`);
    const integer = base === "int";
    const lo = parseNumber(parts[0], integer);
    const hi = parseNumber(parts[1], integer);
    if (lo > hi) throw new Error(`interval min ${lo} exceeds max ${hi}`);
    return integer
      ? { kind: "int-interval", lo, hi }
      : { kind: "real-interval", lo, hi };
  }
  const tokens = body.split(",").map((t) => t.trim());
  if (tokens.length === 0 || tokens.some((t) => t === "")) {
    throw new Error(`empty member in set range '${spec}'`);
  }
  if (base === "string") return { kind: "text-set", members: tokens };
  const members = tokens.map((t) => parseNumber(t, base === "int"));
  return base === "int"
    ? { kind: "int-set", members }
    : { kind: "real-set", members };
}

/** Null when the value fits the range; otherwise a human-readable reason. */
export function validateValue(range: RangeSpec, value: AttrScalar): string | null {
  switch (range.kind) {
    case "bool":
      return typeof value === "boolean" ? null : `expected a boolean, got ${value}`;
    case "text":
      return typeof value === "string" ? null : `expected text, got ${value}`;
    case "int-interval":
    case "int-set":
      if (typeof value !== "number" || !Number.isInteger(value)) {
        return `expected an integer, got ${value}`;
      }
      break;
    case "real-interval":
    case "real-set":
      if (typeof value !== "number" || !Number.isFinite(value)) {
        return `expected a finite number, got ${value}`;
      }
      break;
    case "text-set":
      if (typeof value !== "string") return `expected text, got ${value}`;
      break;
  }
  if (range.kind === "int-interval" || range.kind === "real-interval") {
    const v = value as number;
    if (v < range.lo || v > range.hi) {
      return `${v} outside [${range.lo}, ${range.hi}]`;
    }
    return null;
  }
  const members = (range as { members: AttrScalar[] }).members;
  return members.includes(value) ? null : `${value} not in {${members.join(",")}}`;
}

/** Values a colormap must cover, for finite domains; null for intervals. */
export function declaredValues(range: RangeSpec): AttrScalar[] | null {
  switch (range.kind) {
    case "bool":
      return [false, true];
    case "int-set":
    case "real-set":
      return [...range.members].sort((a, b) => a - b);
    case "text-set":
      return [...range.members].sort();
    default:
      return null;
  }
}
