import { describe, expect, it } from "vitest";

import { allocate, inferTensors, outputNames, run } from "../src/interp";
import { lowerToTir } from "../src/lower";
import { parse, ParseError } from "../src/parser";
import { handleLine } from "../src/protocol";

const MM =
  "L^{2}_{i=0}L^{3}_{j=0}L^{4}_{k=0}" +
  "[C^{f32,g}_{i,j}=C^{f32,g}_{i,j}+A^{f32,g}_{i,k}*D^{f32,g}_{k,j};];";

describe("parser", () => {
  it("parses a matmul nest", () => {
    const program = parse(MM);
    expect(program.exprs).toHaveLength(1);
    expect(program.exprs[0].loops.map((l) => l.index)).toEqual(["i", "j", "k"]);
  });

  it("parses nested sub-nests and if_then_else", () => {
    const text =
      "L^{2}_{i=0}L^{3}_{d=0}[R^{f64,g}_{i,d}=" +
      "max(if_then_else(d-1<0,-inf,R^{f64,g}_{i,d-1}),X^{f64,g}_{i,d});" +
      "L^{2}_{g=0}[S^{f64,g}_{i,g,d}=R^{f64,g}_{i,d};];];";
    const program = parse(text);
    expect(program.exprs[0].body).toHaveLength(2);
  });

  it("rejects malformed input", () => {
    expect(() => parse("nonsense")).toThrow(ParseError);
    expect(() => parse("L^{2}_{i=0}[];")).toThrow(ParseError);
  });
});

describe("interpreter", () => {
  it("computes a matmul with implicit accumulator init", () => {
    const program = parse(MM);
    const a = [1, 2, 3, 4, 5, 6, 7, 8]; // 2x4
    const d = Array.from({ length: 12 }, (_, k) => k + 1); // 4x3
    const env = run(program, allocate(program, { A: a, D: d }));
    const c = env.tensors.get("C")!;
    // row 0, col 0: 1*1 + 2*4 + 3*7 + 4*10 = 70
    expect(c[0]).toBe(70);
    expect(env.shapes.get("C")).toEqual([2, 3]);
  });

  it("handles prefix recurrences with guards", () => {
    const text =
      "L^{1}_{i=0}L^{4}_{d=0}[R^{f64,g}_{i,d}=" +
      "max(if_then_else(d-1<0,-inf,R^{f64,g}_{i,d-1}),X^{f64,g}_{i,d});];";
    const program = parse(text);
    const env = run(program, allocate(program, { X: [3, 1, 4, 2] }));
    expect(Array.from(env.tensors.get("R")!)).toEqual([3, 3, 4, 4]);
  });

  it("classifies roles", () => {
    const info = inferTensors(parse(MM));
    expect(info.get("A")!.role).toBe("input");
    expect(info.get("C")!.role).toBe("output");
    expect(outputNames(parse(MM))).toEqual(["C"]);
  });
});

describe("lowering", () => {
  it("produces TIR text larger than the source", () => {
    const tir = lowerToTir(parse(MM));
    expect(tir).toContain("T.prim_func");
    expect(tir).toContain('T.block("C")');
    expect(Buffer.byteLength(tir)).toBeGreaterThan(Buffer.byteLength(MM));
  });
});

describe("protocol", () => {
  it("answers ping", () => {
    expect(JSON.parse(handleLine('{"cmd":"ping"}'))).toEqual({ ok: true });
  });

  it("lowers and times", () => {
    const lowered = JSON.parse(handleLine(JSON.stringify({ cmd: "lower", leir: MM })));
    expect(lowered.ok).toBe(true);
    expect(lowered.tir.length).toBeGreaterThan(MM.length);
    expect(lowered.cuda).toContain("__global__");
    const timed = JSON.parse(handleLine(JSON.stringify({ cmd: "time", leir: MM, trials: 2 })));
    expect(timed.ok).toBe(true);
    expect(timed.mean_ms).toBeGreaterThanOrEqual(0);
  });

  it("runs with explicit inputs", () => {
    const req = {
      cmd: "run",
      leir: "L^{3}_{i=0}[A^{f64,g}_{i}=X^{f64,g}_{i}*2;];",
      inputs: { X: [1, 2, 3] },
    };
    const reply = JSON.parse(handleLine(JSON.stringify(req)));
    expect(reply.ok).toBe(true);
    expect(reply.outputs.A).toEqual([2, 4, 6]);
  });

  it("reports errors without crashing", () => {
    expect(JSON.parse(handleLine("not json")).ok).toBe(false);
    expect(JSON.parse(handleLine('{"cmd":"lower","leir":"???"}')).ok).toBe(false);
    expect(JSON.parse(handleLine('{"cmd":"nope"}')).ok).toBe(false);
  });
});
