import { performance } from "perf_hooks";

import { Program } from "./ast";
import { allocate, inferTensors, outputNames, run } from "./interp";
import { lowerToCuda, lowerToTir } from "./lower";
import { parse } from "./parser";

export interface BridgeRequest {
  cmd: "ping" | "lower" | "time" | "run";
  leir?: string;
  trials?: number;
  inputs?: Record<string, number[]>;
}

export interface BridgeResponse {
  ok: boolean;
  tir?: string;
  cuda?: string;
  mean_ms?: number;
  outputs?: Record<string, number[]>;
  error?: string;
}

// deterministic inputs for timing runs (mulberry32)
function seededInputs(program: Program, seed: number): Record<string, number[]> {
  let state = seed >>> 0;
  const next = (): number => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
  const inputs: Record<string, number[]> = {};
  for (const [name, t] of inferTensors(program)) {
    if (t.role !== "input") continue;
    const size = t.shape.reduce((a, b) => a * b, 1);
    inputs[name] = Array.from({ length: size }, () => next() + 0.25);
  }
  return inputs;
}

export function handle(req: BridgeRequest): BridgeResponse {
  try {
    switch (req.cmd) {
      case "ping":
        return { ok: true };
      case "lower": {
        const program = parse(requireLeir(req));
        return { ok: true, tir: lowerToTir(program), cuda: lowerToCuda(program) };
      }
      case "time": {
        const program = parse(requireLeir(req));
        const trials = req.trials && req.trials > 0 ? req.trials : 3;
        const inputs = seededInputs(program, 1);
        let total = 0;
        for (let t = 0; t < trials; t++) {
          const env = allocate(program, inputs);
          const t0 = performance.now();
          run(program, env);
          total += performance.now() - t0;
        }
        return { ok: true, mean_ms: total / trials };
      }
      case "run": {
        const program = parse(requireLeir(req));
        const env = run(program, allocate(program, req.inputs ?? {}));
        const outputs: Record<string, number[]> = {};
        for (const name of outputNames(program)) {
          outputs[name] = Array.from(env.tensors.get(name)!);
        }
        return { ok: true, outputs };
      }
      default:
        return { ok: false, error: `unknown command '${(req as any).cmd}'` };
    }
  } catch (err) {
    return { ok: false, error: err instanceof Error ? err.message : String(err) };
  }
}

function requireLeir(req: BridgeRequest): string {
  if (!req.leir) throw new Error("missing 'leir' field");
  return req.leir;
}

export function handleLine(line: string): string {
  let req: BridgeRequest;
  try {
    req = JSON.parse(line) as BridgeRequest;
  } catch {
    return JSON.stringify({ ok: false, error: "invalid JSON request" });
  }
  return JSON.stringify(handle(req));
}
