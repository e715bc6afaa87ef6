/**
 * Node inspector: validates edits client-side against the streamed
 * schema, issues the PATCH, and tracks "pending" state until a frame
 * past the edit's boundary confirms it.
 */

import { parseRange, validateValue } from "./attrRange.js";
import type { ApiClient } from "./client.js";
import type { AttrScalar, StreamFrame } from "./types.js";

/** Rejected before any request left the client. */
export class ClientValidationError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ClientValidationError";
  }
}

interface PendingEdit {
  value: AttrScalar;
  editStep: number;
}

export class Inspector {
  private pending = new Map<string, PendingEdit>();

  constructor(
    private readonly client: ApiClient,
    private readonly nodeAttrs: Record<string, string>,
  ) {}

  private key(nodeId: number, attr: string): string {
    return `${nodeId}:${attr}`;
  }

  /**
   * Edit one attribute of one node. Throws ClientValidationError without
   * any request when the value is out of range; ApiError (verbatim server
   * detail) on 400/404/409. On success the node is pending until the
   * first frame whose step exceeds the edit step.
   */
  async edit(
    expId: string,
    trial: number,
    nodeId: number,
    attr: string,
    value: AttrScalar,
    currentStep: number,
  ): Promise<Record<string, AttrScalar>> {
    const spec = this.nodeAttrs[attr];
    if (spec === undefined) {
      throw new ClientValidationError(`unknown attribute '${attr}'`);
    }
    const problem = validateValue(parseRange(spec), value);
    if (problem !== null) {
      throw new ClientValidationError(problem);
    }
    const response = await this.client.patchNode(expId, trial, nodeId, { [attr]: value });
    this.pending.set(this.key(nodeId, attr), { value, editStep: currentStep });
    return response.attrs;
  }

  isPending(nodeId: number, attr: string): boolean {
    return this.pending.has(this.key(nodeId, attr));
  }

  /** Clear pending marks confirmed by a frame past their boundary. */
  confirm(frame: StreamFrame): void {
    for (const [key, edit] of [...this.pending]) {
      if (frame.step > edit.editStep) {
        this.pending.delete(key);
      }
    }
  }
}
