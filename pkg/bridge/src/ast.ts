export type LoopKind = "L" | "P" | "V" | "U" | "B";

export interface Loop {
  kind: LoopKind;
  index: string;
  start: number;
  extent: number;
}

export type Index =
  | { kind: "iconst"; value: number }
  | { kind: "ivar"; name: string }
  | { kind: "iadd" | "isub" | "imul"; a: Index; b: Index };

export type CmpOp = "<" | "<=" | ">" | ">=" | "==" | "!=";

export type Cond =
  | { kind: "cmp"; op: CmpOp; a: Index; b: Index }
  | { kind: "range"; lo: Index; loOp: CmpOp; mid: Index; hiOp: CmpOp; hi: Index }
  | { kind: "and"; a: Cond; b: Cond };

export interface TensorRef {
  name: string;
  dtype: string;
  scope: string;
  indices: Index[];
}

export type Scalar =
  | { kind: "num"; value: number }
  | { kind: "read"; ref: TensorRef }
  | { kind: "idx"; index: Index }
  | { kind: "neg"; a: Scalar }
  | { kind: "fn"; op: "exp" | "log" | "sqrt" | "abs"; a: Scalar }
  | { kind: "bin"; op: "+" | "-" | "*" | "/" | "**"; a: Scalar; b: Scalar }
  | { kind: "minmax"; op: "max" | "min"; a: Scalar; b: Scalar }
  | { kind: "ite"; cond: Cond; then: Scalar; else: Scalar };

export interface Equation {
  lhs: TensorRef;
  rhs: Scalar;
}

export type BodyItem = { eq: Equation } | { nest: Nest };

export interface Nest {
  loops: Loop[];
  body: BodyItem[];
}

export interface Program {
  exprs: Nest[];
}

export function* equations(nest: Nest): Generator<Equation> {
  for (const item of nest.body) {
    if ("eq" in item) yield item.eq;
    else yield* equations(item.nest);
  }
}

export function* allRefs(e: Scalar): Generator<TensorRef> {
  switch (e.kind) {
    case "read":
      yield e.ref;
      return;
    case "neg":
    case "fn":
      yield* allRefs(e.a);
      return;
    case "bin":
    case "minmax":
      yield* allRefs(e.a);
      yield* allRefs(e.b);
      return;
    case "ite":
      yield* allRefs(e.then);
      yield* allRefs(e.else);
      return;
    default:
      return;
  }
}
