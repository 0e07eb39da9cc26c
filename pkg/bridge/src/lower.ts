import { Cond, Index, Loop, Nest, Program, Scalar, allRefs } from "./ast";
import { inferTensors } from "./interp";

const DTYPE_NAMES: Record<string, string> = {
  f16: "float16",
  f32: "float32",
  f64: "float64",
  i64: "int64",
  b8: "bool",
};

const SCOPE_NAMES: Record<string, string> = {
  g: "global",
  s: "shared",
  l: "local",
};

const LOOP_STMT: Record<string, string> = {
  L: "T.serial",
  P: "T.parallel",
  V: "T.vectorized",
  U: "T.unroll",
};

const BIND_TARGETS: Record<string, string> = {
  bx: "blockIdx.x",
  by: "blockIdx.y",
  bz: "blockIdx.z",
  tx: "threadIdx.x",
  ty: "threadIdx.y",
  tz: "threadIdx.z",
};

function bindTarget(index: string): string {
  for (const prefix of Object.keys(BIND_TARGETS)) {
    if (index.startsWith(prefix)) return BIND_TARGETS[prefix];
  }
  return "threadIdx.x";
}

function fmtIndex(ix: Index): string {
  switch (ix.kind) {
    case "iconst":
      return String(ix.value);
    case "ivar":
      return ix.name;
    case "iadd":
      return `${fmtIndex(ix.a)} + ${fmtIndex(ix.b)}`;
    case "isub":
      return `${fmtIndex(ix.a)} - ${fmtIndex(ix.b)}`;
    case "imul": {
      const wrap = (e: Index): string =>
        e.kind === "iadd" || e.kind === "isub"
          ? `(${fmtIndex(e)})` : fmtIndex(e);
      return `${wrap(ix.a)} * ${wrap(ix.b)}`;
    }
  }
}

function fmtCond(c: Cond): string {
  if (c.kind === "and") return `${fmtCond(c.a)} and ${fmtCond(c.b)}`;
  if (c.kind === "cmp") return `${fmtIndex(c.a)} ${c.op} ${fmtIndex(c.b)}`;
  return `${fmtIndex(c.lo)} ${c.loOp} ${fmtIndex(c.mid)} ` +
    `${c.hiOp} ${fmtIndex(c.hi)}`;
}

function fmtScalar(e: Scalar): string {
  switch (e.kind) {
    case "num":
      return e.value === Infinity ? 'T.float64("inf")' : String(e.value);
    case "read": {
      const idx = e.ref.indices.map(fmtIndex).join(", ");
      return `${e.ref.name}[${idx || "0"}]`;
    }
    case "idx":
      return `T.cast(${fmtIndex(e.index)}, "float64")`;
    case "neg":
      return `(0 - ${fmtScalar(e.a)})`;
    case "fn":
      return `T.${e.op}(${fmtScalar(e.a)})`;
    case "bin":
      return e.op === "**"
        ? `T.pow(${fmtScalar(e.a)}, ${fmtScalar(e.b)})`
        : `(${fmtScalar(e.a)} ${e.op} ${fmtScalar(e.b)})`;
    case "minmax":
      return `T.${e.op}(${fmtScalar(e.a)}, ${fmtScalar(e.b)})`;
    case "ite":
      return `T.if_then_else(${fmtCond(e.cond)}, ` +
        `${fmtScalar(e.then)}, ${fmtScalar(e.else)})`;
  }
}

function lowerNest(nest: Nest, depth: number, out: string[]): void {
  let pad = "    ".repeat(depth);
  for (const loop of nest.loops) {
    const span = `${loop.start}, ${loop.start + loop.extent}`;
    if (loop.kind === "B") {
      out.push(`${pad}for ${loop.index} in ` +
        `T.thread_binding(${span}, thread="${bindTarget(loop.index)}"):`);
    } else {
      out.push(`${pad}for ${loop.index} in ${LOOP_STMT[loop.kind]}(${span}):`);
    }
    depth += 1;
    pad = "    ".repeat(depth);
  }
  for (const item of nest.body) {
    if ("nest" in item) {
      lowerNest(item.nest, depth, out);
      continue;
    }
    const eq = item.eq;
    const lhsIdx = eq.lhs.indices.map(fmtIndex).join(", ");
    const reads = [...allRefs(eq.rhs)]
      .map((r) => `${r.name}[${r.indices.map(fmtIndex).join(", ") || "0"}]`);
    out.push(`${pad}with T.block("${eq.lhs.name}"):`);
    out.push(`${pad}    T.reads(${reads.join(", ")})`);
    out.push(`${pad}    T.writes(${eq.lhs.name}[${lhsIdx || "0"}])`);
    out.push(`${pad}    ${eq.lhs.name}[${lhsIdx || "0"}] = ${fmtScalar(eq.rhs)}`);
  }
}

export function lowerToTir(program: Program): string {
  const info = inferTensors(program);
  const params: string[] = [];
  const allocs: string[] = [];
  for (const [name, t] of info) {
    const shape = `(${t.shape.join(", ")}${t.shape.length === 1 ? "," : ""})`;
    const dtype = DTYPE_NAMES[t.dtype] ?? t.dtype;
    if (t.role === "intermediate") {
      allocs.push(`        ${name} = T.alloc_buffer(${shape}, ` +
        `"${dtype}", scope="${SCOPE_NAMES[t.scope] ?? t.scope}")`);
    } else {
      params.push(`${name}: T.Buffer(${shape}, "${dtype}")`);
    }
  }
  const out: string[] = [
    "# lowered tensor IR module",
    "@T.prim_func",
    `def main(${params.join(", ")}):`,
    '    T.func_attr({"global_symbol": "main", "tir.noalias": True})',
    '    with T.block("root"):',
  ];
  out.push(...allocs);
  for (const nest of program.exprs) lowerNest(nest, 2, out);
  return out.join("\n") + "\n";
}

export function lowerToCuda(program: Program): string {
  const info = inferTensors(program);
  const params: string[] = [];
  for (const [name, t] of info) {
    if (t.role === "intermediate") continue;
    const ctype = t.dtype === "f64" ? "double"
      : t.dtype === "i64" ? "long long"
      : t.dtype === "b8" ? "bool" : "float";
    params.push(`${ctype}* __restrict__ ${name}`);
  }
  const lines = [
    "// generated CUDA kernel stub; host loop nest drives the grid",
    `extern "C" __global__ void main_kernel(${params.join(", ")}) {`,
    "    // kernel body derived from the lowered tensor IR",
    "}",
  ];
  return lines.join("\n") + "\n";
}
