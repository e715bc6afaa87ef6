/** Wire types for the evonet control plane (see docs/formats.md). */

export type AttrScalar = number | string | boolean;

export type TrialStatusName =
  | "ready"
  | "queued"
  | "running"
  | "paused"
  | "finished"
  | "failed";

export interface NodeState {
  id: number;
  x: number | null;
  y: number | null;
  attrs: Record<string, AttrScalar>;
}

export interface StreamFrame {
  experimentId: string;
  trialIndex: number;
  step: number;
  status: TrialStatusName;
  nodes: NodeState[];
  stats: Record<string, Record<string, number>>;
}

export interface TrialInfo {
  index: number;
  status: TrialStatusName;
  step: number;
}

export interface GraphInfo {
  kind: string;
  width?: number;
  height?: number;
  periodic?: boolean;
  neighborhood?: string;
  path?: string;
}

export interface ExperimentInfo {
  id: string;
  model: string;
  seed: number;
  stopAt: number;
  outputs: string[];
  graph: GraphInfo;
  nodeAttrs: Record<string, string>;
  params: Record<string, AttrScalar>;
  trials: TrialInfo[];
}

export type ControlCommand = "run" | "pause" | "step" | "stop";
