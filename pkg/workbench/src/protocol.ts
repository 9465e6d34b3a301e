/** The line-delimited JSON session protocol: one request object per
 * line in, one response object per line out.  The workbench never
 * computes typing itself; everything it shows comes from these
 * responses. */

export interface SessionRequest {
  id: number;
  cmd: string;
}

export interface GoalView {
  index: number;
  statement: string;
  hypotheses: string[];
}

export interface SessionResponse {
  id: number | null;
  status: "ok" | "error";
  message: string;
  goals: GoalView[];
  context: string[];
  constraints: string[];
}

function isStringArray(x: unknown): x is string[] {
  return Array.isArray(x) && x.every((e) => typeof e === "string");
}

function isGoalView(x: unknown): x is GoalView {
  if (typeof x !== "object" || x === null) return false;
  const g = x as Record<string, unknown>;
  return (
    typeof g.index === "number" &&
    typeof g.statement === "string" &&
    isStringArray(g.hypotheses)
  );
}

/** Decode one response line; throws on anything malformed so transport
 * errors surface immediately instead of corrupting the render model. */
export function parseResponse(line: string): SessionResponse {
  const x: unknown = JSON.parse(line);
  if (typeof x !== "object" || x === null) {
    throw new Error(`response is not an object: ${line}`);
  }
  const r = x as Record<string, unknown>;
  if (
    (typeof r.id !== "number" && r.id !== null) ||
    (r.status !== "ok" && r.status !== "error") ||
    typeof r.message !== "string" ||
    !Array.isArray(r.goals) ||
    !r.goals.every(isGoalView) ||
    !isStringArray(r.context) ||
    !isStringArray(r.constraints)
  ) {
    throw new Error(`malformed response: ${line}`);
  }
  return {
    id: r.id as number | null,
    status: r.status,
    message: r.message,
    goals: r.goals as GoalView[],
    context: r.context,
    constraints: r.constraints,
  };
}

export function encodeRequest(req: SessionRequest): string {
  return JSON.stringify(req);
}
