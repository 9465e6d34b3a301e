/** Stdio transport: spawns the session service as a child process and
 * exchanges one JSON line per request/response.  One request is in
 * flight at a time; callers queue behind a promise chain. */

import { ChildProcess, spawn } from "node:child_process";
import { createInterface, Interface } from "node:readline";

import { encodeRequest, parseResponse, SessionResponse } from "./protocol.js";

export interface Transport {
  request(cmd: string): Promise<SessionResponse>;
  close(): Promise<void>;
}

export class StdioTransport implements Transport {
  private child: ChildProcess;
  private lines: Interface;
  private nextId = 1;
  private queue: Promise<unknown> = Promise.resolve();
  private pending: { resolve: (line: string) => void; reject: (err: Error) => void }[] = [];
  private failure: Error | null = null;

  constructor(command = "python3", args = ["-m", "cocproof.cli", "--serve"]) {
    this.child = spawn(command, args, {
      stdio: ["pipe", "pipe", "inherit"],
    });
    this.lines = createInterface({ input: this.child.stdout! });
    this.lines.on("line", (line) => {
      const waiter = this.pending.shift();
      if (waiter) waiter.resolve(line);
    });
    this.child.on("error", (err) => {
      this.failure = err;
      for (const waiter of this.pending.splice(0)) waiter.reject(err);
    });
  }

  request(cmd: string): Promise<SessionResponse> {
    const id = this.nextId++;
    const run = async (): Promise<SessionResponse> => {
      const line = await new Promise<string>((resolve, reject) => {
        if (this.failure) {
          reject(this.failure);
          return;
        }
        this.pending.push({ resolve, reject });
        this.child.stdin!.write(encodeRequest({ id, cmd }) + "\n", (err) => {
          if (err) reject(err);
        });
      });
      const response = parseResponse(line);
      if (response.id !== id) {
        throw new Error(`response id ${response.id} for request ${id}`);
      }
      return response;
    };
    const result = this.queue.then(run);
    this.queue = result.catch(() => undefined);
    return result;
  }

  close(): Promise<void> {
    return new Promise((resolve) => {
      this.child.once("exit", () => resolve());
      this.child.stdin!.end();
    });
  }
}
