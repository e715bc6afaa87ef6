/** HTTP + WebSocket client for the evonet control plane. */

import type {
  AttrScalar,
  ControlCommand,
  ExperimentInfo,
  NodeState,
  StreamFrame,
  TrialStatusName,
} from "./types.js";

/** Server-reported failure; detail is the server's message verbatim. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`${status}: ${detail}`);
    this.name = "ApiError";
  }
}

/** The slice of the WebSocket API the client uses; injectable for tests
 * and non-browser runtimes. */
export interface WebSocketLike {
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: ((event: unknown) => void) | null;
  onerror: ((event: unknown) => void) | null;
  close(): void;
}

export type WebSocketFactory = (url: string) => WebSocketLike;

export interface StreamHandle {
  close(): void;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly wsFactory: WebSocketFactory = (url) =>
      new WebSocket(url) as unknown as WebSocketLike,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const data = (await response.json()) as { detail?: string };
        if (data.detail) detail = data.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  listExperiments(): Promise<ExperimentInfo[]> {
    return this.request("GET", "/api/experiments");
  }

  control(
    expId: string,
    trial: number,
    command: ControlCommand,
    n = 1,
  ): Promise<{ status: TrialStatusName; step: number }> {
    return this.request("POST", `/api/experiments/${expId}/trials/${trial}/control`, {
      command,
      n,
    });
  }

  getNode(expId: string, trial: number, nodeId: number): Promise<NodeState> {
    return this.request("GET", `/api/experiments/${expId}/trials/${trial}/nodes/${nodeId}`);
  }

  patchNode(
    expId: string,
    trial: number,
    nodeId: number,
    edits: Record<string, AttrScalar>,
  ): Promise<{ id: number; attrs: Record<string, AttrScalar> }> {
    return this.request(
      "PATCH",
      `/api/experiments/${expId}/trials/${trial}/nodes/${nodeId}`,
      edits,
    );
  }

  /** Subscribe to a trial's frames; the server sends the current state
   * first, then every `every`-th step, then the final step. */
  openStream(
    expId: string,
    trial: number,
    every: number,
    onFrame: (frame: StreamFrame) => void,
    onClose?: () => void,
  ): StreamHandle {
    const wsBase = this.baseUrl.replace(/^http/, "ws");
    const socket = this.wsFactory(
      `${wsBase}/api/stream?exp=${encodeURIComponent(expId)}&trial=${trial}&every=${every}`,
    );
    socket.onmessage = (event) => {
      const raw = typeof event.data === "string" ? event.data : String(event.data);
      onFrame(JSON.parse(raw) as StreamFrame);
    };
    socket.onclose = () => onClose?.();
    socket.onerror = () => onClose?.();
    return { close: () => socket.close() };
  }
}
