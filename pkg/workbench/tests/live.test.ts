import { spawnSync } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { WorkbenchSession } from "../src/session.js";
import { StdioTransport } from "../src/transport.js";

const SIGNATURE = [
  "Parameter T:Prop.",
  "Parameter R:T -> T -> Prop.",
  "Parameter Eq:T -> T -> Prop.",
  "Axiom Antisym:(x:T)(y:T)(R x y) -> (R y x) -> (Eq x y).",
  "Parameter a:T.",
  "Parameter b:T.",
  "Axiom ax1:(R a b).",
  "Axiom ax2:(R b a).",
];

describe("live antisymmetry session", () => {
  let session: WorkbenchSession;

  beforeAll(() => {
    session = new WorkbenchSession(new StdioTransport());
  });

  afterAll(async () => {
    await session.close();
  });

  it("drives the whole proof against the serve endpoint", async () => {
    for (const cmd of SIGNATURE) {
      const r = await session.sendCommand(cmd);
      expect(r.status).toBe("ok");
    }

    const opened = await session.sendCommand("Goal (Eq a b).");
    expect(opened.goals.map((g) => g.statement)).toEqual(["(Eq a b)"]);

    const applied = await session.sendCommand("Apply Antisym.");
    expect(applied.goals.map((g) => g.statement)).toEqual([
      "(R a b)",
      "(R b a)",
    ]);

    // detour and undo: the model and the service stay in step
    const undone = await session.undo();
    expect(undone.goals.map((g) => g.statement)).toEqual(["(Eq a b)"]);
    await session.sendCommand("Apply Antisym.");

    const first = await session.sendCommand("Apply ax1.");
    expect(first.goals.map((g) => g.statement)).toEqual(["(R b a)"]);

    const second = await session.sendCommand("Apply ax2.");
    expect(second.message).toBe("Goal proved!");
    expect(second.goals).toEqual([]);

    const saved = await session.sendCommand("Save th.");
    expect(saved.status).toBe("ok");
    expect(saved.message).toContain("th is saved");
    expect(session.model.context).toContain("th := (Antisym a b ax1 ax2):(Eq a b)");
  }, 20000);

  it("exports a script the batch checker accepts", () => {
    const script = session.exportScript();
    expect(script).not.toContain("Undo.");
    const dir = mkdtempSync(join(tmpdir(), "workbench-"));
    const file = join(dir, "export.v");
    writeFileSync(file, script);
    const run = spawnSync("python3", ["-m", "cocproof.cli", file, "--quiet"], {
      encoding: "utf-8",
    });
    expect(run.stdout + run.stderr).toBe("");
    expect(run.status).toBe(0);
  });

  it("rejects an ill-formed tactic but keeps the session alive", async () => {
    const bad = await session.sendCommand("Apply (.");
    expect(bad.status).toBe("error");
    expect(bad.message).toMatch(/^1:/); // parser position
    const show = await session.sendCommand("Show.");
    expect(show.status).toBe("ok");
  });
});

describe("live guided instantiation", () => {
  it("closes a goal by proposing its proof term", async () => {
    const session = new WorkbenchSession(new StdioTransport());
    try {
      await session.sendCommand("Goal (P:Prop)(P -> P).");
      const goal = session.model.context.find((item) => item.startsWith("∃"));
      expect(goal).toBeDefined();
      const name = goal!.slice(1, goal!.indexOf(":"));
      const solved = await session.proposeFor(name, "[P:Prop][H:P]H");
      expect(solved.status).toBe("ok");
      expect(solved.goals).toEqual([]);
    } finally {
      await session.close();
    }
  }, 20000);
});
