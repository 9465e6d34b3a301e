/** The workbench session: drives a transport, folds responses into the
 * render model, and can export the successful command sequence as a
 * script the batch checker accepts. */

import {
  applyResponse,
  initialModel,
  transportFailure,
  UiSessionModel,
} from "./render.js";
import { SessionResponse } from "./protocol.js";
import { Transport } from "./transport.js";

export interface Recording {
  cmd: string;
  response: SessionResponse;
}

export class WorkbenchSession {
  model: UiSessionModel = initialModel();
  readonly recordings: Recording[] = [];

  constructor(private transport: Transport) {}

  async sendCommand(cmd: string): Promise<SessionResponse> {
    let response: SessionResponse;
    try {
      response = await this.transport.request(cmd);
    } catch (err) {
      this.model = transportFailure(this.model, String(err));
      throw err;
    }
    this.recordings.push({ cmd, response });
    this.model = applyResponse(this.model, cmd, response);
    return response;
  }

  /** Guided unification: propose a term for a postponed existential. */
  proposeFor(name: string, term: string): Promise<SessionResponse> {
    return this.sendCommand(`Instantiate ${name} ${term}.`);
  }

  undo(): Promise<SessionResponse> {
    return this.sendCommand("Undo.");
  }

  /** The successful commands as a script file, Undo pairs cancelled so
   * the export replays to the same final state. */
  exportScript(): string {
    const kept: string[] = [];
    for (const { cmd, response } of this.recordings) {
      if (response.status !== "ok") continue;
      if (cmd.trim() === "Undo.") kept.pop();
      else kept.push(cmd.trim());
    }
    return kept.join("\n") + "\n";
  }

  close(): Promise<void> {
    return this.transport.close();
  }
}

/** Rebuild the render model from a recording alone; the model is a
 * pure function of the response stream. */
export function replay(recordings: Recording[]): UiSessionModel {
  let model = initialModel();
  for (const { cmd, response } of recordings) {
    model = applyResponse(model, cmd, response);
  }
  return model;
}
