import {
  allRefs, BodyItem, Cond, Equation, Index, Loop, Nest, Program, Scalar,
  TensorRef, equations,
} from "./ast";

export interface TensorInfo {
  dtype: string;
  scope: string;
  shape: number[];
  role: "input" | "output" | "intermediate";
}

type Bounds = Map<string, [number, number]>;

function indexBounds(ix: Index, vars: Bounds): [number, number] {
  switch (ix.kind) {
    case "iconst":
      return [ix.value, ix.value];
    case "ivar": {
      const b = vars.get(ix.name);
      if (!b) throw new Error(`unbound index variable '${ix.name}'`);
      return b;
    }
    default: {
      const [alo, ahi] = indexBounds(ix.a, vars);
      const [blo, bhi] = indexBounds(ix.b, vars);
      if (ix.kind === "iadd") return [alo + blo, ahi + bhi];
      if (ix.kind === "isub") return [alo - bhi, ahi - blo];
      const products = [alo * blo, alo * bhi, ahi * blo, ahi * bhi];
      return [Math.min(...products), Math.max(...products)];
    }
  }
}

function* refsWithScope(
  program: Program,
): Generator<{ ref: TensorRef; written: boolean; vars: Bounds; step: number }> {
  let step = 0;
  function* walk(nest: Nest, outer: Bounds): Generator<{
    ref: TensorRef; written: boolean; vars: Bounds; step: number;
  }> {
    const vars = new Map(outer);
    for (const l of nest.loops) vars.set(l.index, [l.start, l.start + l.extent - 1]);
    for (const item of nest.body) {
      if ("eq" in item) {
        yield { ref: item.eq.lhs, written: true, vars, step };
        for (const r of allRefs(item.eq.rhs)) {
          yield { ref: r, written: false, vars, step };
        }
        step += 1;
      } else {
        yield* walk(item.nest, vars);
      }
    }
  }
  for (const nest of program.exprs) yield* walk(nest, new Map());
}

export function inferTensors(program: Program): Map<string, TensorInfo> {
  const info = new Map<string, TensorInfo>();
  const written = new Set<string>();
  const order: { name: string; written: boolean; step: number }[] = [];
  for (const { ref, written: w, vars, step } of refsWithScope(program)) {
    let entry = info.get(ref.name);
    if (!entry) {
      entry = { dtype: ref.dtype, scope: ref.scope, shape: [], role: "input" };
      info.set(ref.name, entry);
    }
    ref.indices.forEach((ix, d) => {
      const [, hi] = indexBounds(ix, vars);
      entry!.shape[d] = Math.max(entry!.shape[d] ?? 1, hi + 1);
    });
    if (ref.indices.length === 0 && entry.shape.length === 0) entry.shape = [1];
    if (w) written.add(ref.name);
    order.push({ name: ref.name, written: w, step });
  }
  for (const [name, entry] of info) {
    if (!written.has(name)) {
      entry.role = "input";
      continue;
    }
    const lastWrite = order
      .filter((o) => o.name === name && o.written)
      .reduce((a, o) => Math.max(a, o.step), -1);
    const readAfter = order.some(
      (o) => o.name === name && !o.written && o.step > lastWrite);
    entry.role = readAfter ? "intermediate" : "output";
  }
  return info;
}

export class Env {
  constructor(
    public readonly tensors: Map<string, Float64Array>,
    public readonly shapes: Map<string, number[]>,
  ) {}
}

function flatIndex(indices: number[], shape: number[]): number {
  let flat = 0;
  for (let d = 0; d < indices.length; d++) {
    const i = indices[d];
    if (i < 0 || i >= shape[d]) {
      throw new Error(`index ${i} out of bounds for extent ${shape[d]}`);
    }
    flat = flat * shape[d] + i;
  }
  return flat;
}

type VarValues = Map<string, number>;

function evalIndex(ix: Index, vars: VarValues): number {
  switch (ix.kind) {
    case "iconst":
      return ix.value;
    case "ivar": {
      const v = vars.get(ix.name);
      if (v === undefined) throw new Error(`unbound index '${ix.name}'`);
      return v;
    }
    case "iadd":
      return evalIndex(ix.a, vars) + evalIndex(ix.b, vars);
    case "isub":
      return evalIndex(ix.a, vars) - evalIndex(ix.b, vars);
    case "imul":
      return evalIndex(ix.a, vars) * evalIndex(ix.b, vars);
  }
}

function evalCond(c: Cond, vars: VarValues): boolean {
  if (c.kind === "and") return evalCond(c.a, vars) && evalCond(c.b, vars);
  const cmp = (op: string, a: number, b: number): boolean => {
    switch (op) {
      case "<": return a < b;
      case "<=": return a <= b;
      case ">": return a > b;
      case ">=": return a >= b;
      case "==": return a === b;
      default: return a !== b;
    }
  };
  if (c.kind === "cmp") return cmp(c.op, evalIndex(c.a, vars), evalIndex(c.b, vars));
  const mid = evalIndex(c.mid, vars);
  return cmp(c.loOp, evalIndex(c.lo, vars), mid)
    && cmp(c.hiOp, mid, evalIndex(c.hi, vars));
}

function readRef(ref: TensorRef, vars: VarValues, env: Env): number {
  const buf = env.tensors.get(ref.name)!;
  const shape = env.shapes.get(ref.name)!;
  const idx = ref.indices.map((ix) => evalIndex(ix, vars));
  return buf[flatIndex(idx.length ? idx : [0], shape)];
}

function evalScalar(e: Scalar, vars: VarValues, env: Env): number {
  switch (e.kind) {
    case "num":
      return e.value;
    case "read":
      return readRef(e.ref, vars, env);
    case "idx":
      return evalIndex(e.index, vars);
    case "neg":
      return -evalScalar(e.a, vars, env);
    case "fn": {
      const a = evalScalar(e.a, vars, env);
      if (e.op === "exp") return Math.exp(a);
      if (e.op === "log") return Math.log(a);
      if (e.op === "sqrt") return Math.sqrt(a);
      return Math.abs(a);
    }
    case "bin": {
      const a = evalScalar(e.a, vars, env);
      const b = evalScalar(e.b, vars, env);
      if (e.op === "+") return a + b;
      if (e.op === "-") return a - b;
      if (e.op === "*") return a * b;
      if (e.op === "/") return a / b;
      return Math.pow(a, b);
    }
    case "minmax": {
      const a = evalScalar(e.a, vars, env);
      const b = evalScalar(e.b, vars, env);
      if (Number.isNaN(a) || Number.isNaN(b)) return NaN;
      return e.op === "max" ? Math.max(a, b) : Math.min(a, b);
    }
    case "ite":
      return evalCond(e.cond, vars)
        ? evalScalar(e.then, vars, env)
        : evalScalar(e.else, vars, env);
  }
}

interface ReductionPlan {
  axes: Loop[];
  identity: number;
}

function sameIndex(a: Index, b: Index): boolean {
  if (a.kind !== b.kind) return false;
  if (a.kind === "iconst") return a.value === (b as typeof a).value;
  if (a.kind === "ivar") return a.name === (b as typeof a).name;
  const bb = b as { a: Index; b: Index };
  return sameIndex(a.a, bb.a) && sameIndex(a.b, bb.b);
}

function selfRead(e: Scalar, lhs: TensorRef): boolean {
  return e.kind === "read" && e.ref.name === lhs.name
    && e.ref.indices.length === lhs.indices.length
    && e.ref.indices.every((ix, d) => sameIndex(ix, lhs.indices[d]));
}

function scalarVars(e: Scalar, out: Set<string>): void {
  const fromIndex = (ix: Index): void => {
    if (ix.kind === "ivar") out.add(ix.name);
    else if (ix.kind !== "iconst") {
      fromIndex(ix.a);
      fromIndex(ix.b);
    }
  };
  const fromCond = (c: Cond): void => {
    if (c.kind === "and") {
      fromCond(c.a);
      fromCond(c.b);
    } else if (c.kind === "cmp") {
      fromIndex(c.a);
      fromIndex(c.b);
    } else {
      fromIndex(c.lo);
      fromIndex(c.mid);
      fromIndex(c.hi);
    }
  };
  switch (e.kind) {
    case "read":
      e.ref.indices.forEach(fromIndex);
      return;
    case "idx":
      fromIndex(e.index);
      return;
    case "neg":
    case "fn":
      scalarVars(e.a, out);
      return;
    case "bin":
    case "minmax":
      scalarVars(e.a, out);
      scalarVars(e.b, out);
      return;
    case "ite":
      fromCond(e.cond);
      scalarVars(e.then, out);
      scalarVars(e.else, out);
      return;
    default:
      return;
  }
}

// A reduction: the top RHS node combines a direct self-read of the LHS at
// identical indices via + * max min; axes are the scope loops read on the
// RHS but absent from the LHS indices. Accumulators start at the combiner
// identity when every reduction axis sits at its start value.
function classifyReduction(eq: Equation, scope: Loop[]): ReductionPlan | null {
  const top = eq.rhs;
  let combiner: "+" | "*" | "max" | "min" | null = null;
  if (top.kind === "bin" && (top.op === "+" || top.op === "*")) {
    if (selfRead(top.a, eq.lhs) || selfRead(top.b, eq.lhs)) combiner = top.op;
  } else if (top.kind === "minmax") {
    if (selfRead(top.a, eq.lhs) || selfRead(top.b, eq.lhs)) combiner = top.op;
  }
  if (!combiner) return null;
  const rhsVars = new Set<string>();
  scalarVars(eq.rhs, rhsVars);
  const lhsVars = new Set<string>();
  for (const ix of eq.lhs.indices) scalarVars({ kind: "idx", index: ix }, lhsVars);
  const axes = scope.filter(
    (l) => rhsVars.has(l.index) && !lhsVars.has(l.index));
  if (axes.length === 0) return null;
  const identity = combiner === "+" ? 0 : combiner === "*" ? 1
    : combiner === "max" ? -Infinity : Infinity;
  return { axes, identity };
}

function execNest(nest: Nest, scope: Loop[], vars: VarValues, env: Env): void {
  const fullScope = scope.concat(nest.loops);
  const runBody = (): void => {
    for (const item of nest.body) {
      if ("nest" in item) {
        execNest(item.nest, fullScope, vars, env);
        continue;
      }
      const eq = item.eq;
      const plan = classifyReduction(eq, fullScope);
      const buf = env.tensors.get(eq.lhs.name)!;
      const shape = env.shapes.get(eq.lhs.name)!;
      const idx = eq.lhs.indices.map((ix) => evalIndex(ix, vars));
      const flat = flatIndex(idx.length ? idx : [0], shape);
      if (plan && plan.axes.every((l) => vars.get(l.index) === l.start)) {
        buf[flat] = plan.identity;
      }
      buf[flat] = evalScalar(eq.rhs, vars, env);
    }
  };
  const loop = (d: number): void => {
    if (d === nest.loops.length) {
      runBody();
      return;
    }
    const l = nest.loops[d];
    for (let v = l.start; v < l.start + l.extent; v++) {
      vars.set(l.index, v);
      loop(d + 1);
    }
    vars.delete(l.index);
  };
  loop(0);
}

export function allocate(
  program: Program,
  inputs: Record<string, number[]> = {},
): Env {
  const info = inferTensors(program);
  const tensors = new Map<string, Float64Array>();
  const shapes = new Map<string, number[]>();
  for (const [name, t] of info) {
    const size = t.shape.reduce((a, b) => a * b, 1);
    const buf = new Float64Array(size);
    const given = inputs[name];
    if (given) {
      if (given.length !== size) {
        throw new Error(
          `tensor '${name}' expects ${size} values, got ${given.length}`);
      }
      buf.set(given);
    }
    tensors.set(name, buf);
    shapes.set(name, t.shape);
  }
  return new Env(tensors, shapes);
}

export function run(program: Program, env: Env): Env {
  for (const nest of program.exprs) {
    execNest(nest, [], new Map(), env);
  }
  return env;
}

export function outputNames(program: Program): string[] {
  const names: string[] = [];
  for (const [name, t] of inferTensors(program)) {
    if (t.role === "output") names.push(name);
  }
  return names;
}

export function equationCount(program: Program): number {
  let n = 0;
  for (const nest of program.exprs) for (const _ of equations(nest)) n += 1;
  return n;
}
