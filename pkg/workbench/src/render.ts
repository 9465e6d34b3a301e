/** Pure render model: a fold over the response stream.  Replaying the
 * same recorded responses always reproduces the same model and the
 * same rendered text, byte for byte. */

import { GoalView, SessionResponse } from "./protocol.js";

export interface HistoryEntry {
  cmd: string;
  status: "ok" | "error";
  message: string;
}

export interface UiSessionModel {
  connected: boolean;
  goals: GoalView[];
  context: string[];
  /** Postponed constraints, verbatim from the service. */
  constraints: string[];
  /** Existential names offered an "instantiate" affordance. */
  instantiable: string[];
  history: HistoryEntry[];
  /** How many successful commands an Undo can roll back. */
  undoDepth: number;
  banner: string;
}

export function initialModel(): UiSessionModel {
  return {
    connected: false,
    goals: [],
    context: [],
    constraints: [],
    instantiable: [],
    history: [],
    undoDepth: 0,
    banner: "",
  };
}

/** Existentials are shown by the service as `∃name:type`. */
function existentialsOf(context: string[]): string[] {
  const names: string[] = [];
  for (const item of context) {
    if (item.startsWith("∃")) {
      const colon = item.indexOf(":");
      if (colon > 1) names.push(item.slice(1, colon));
    }
  }
  return names;
}

export function applyResponse(
  model: UiSessionModel,
  cmd: string,
  response: SessionResponse,
): UiSessionModel {
  const entry: HistoryEntry = {
    cmd,
    status: response.status,
    message: response.message,
  };
  const undoDepth =
    response.status !== "ok"
      ? model.undoDepth
      : cmd.trim() === "Undo."
        ? Math.max(0, model.undoDepth - 1)
        : model.undoDepth + 1;
  return {
    connected: true,
    goals: response.goals,
    context: response.context,
    constraints: response.constraints,
    instantiable: response.constraints.length
      ? existentialsOf(response.context)
      : [],
    history: [...model.history, entry],
    undoDepth,
    banner: response.status === "error" ? response.message : "",
  };
}

export function transportFailure(
  model: UiSessionModel,
  reason: string,
): UiSessionModel {
  // the session itself is preserved; only the connection banner changes
  return { ...model, connected: false, banner: `transport failure: ${reason}` };
}

/** One goal card: statement above the bar, hypotheses below. */
function renderGoalCard(goal: GoalView): string[] {
  const lines = [`goal ${goal.index}`, `  ${goal.statement}`, "  ============================"];
  for (const hyp of goal.hypotheses) lines.push(`  ${hyp}`);
  return lines;
}

/** Deterministic plain-text projection of the whole model; the DOM
 * view and the replay tests both consume this. */
export function renderText(model: UiSessionModel): string {
  const lines: string[] = [];
  lines.push(model.connected ? "[connected]" : "[disconnected]");
  if (model.banner) lines.push(`! ${model.banner}`);
  for (const goal of model.goals) lines.push(...renderGoalCard(goal));
  if (model.constraints.length) {
    lines.push("constraints:");
    for (const c of model.constraints) lines.push(`  ${c}`);
    lines.push(`instantiable: ${model.instantiable.join(", ")}`);
  }
  lines.push("context:");
  for (const item of model.context) lines.push(`  ${item}`);
  lines.push(`history (undo depth ${model.undoDepth}):`);
  for (const h of model.history) {
    lines.push(`  ${h.status === "ok" ? "+" : "-"} ${h.cmd}`);
  }
  return lines.join("\n") + "\n";
}
