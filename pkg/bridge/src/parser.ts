import {
  BodyItem, CmpOp, Cond, Equation, Index, Loop, LoopKind, Nest, Program,
  Scalar, TensorRef,
} from "./ast";

const LOOP_KINDS = new Set(["L", "P", "V", "U", "B"]);
const FUNCS = new Set(["exp", "log", "sqrt", "abs"]);
const NAME_RE = /^[A-Za-z][A-Za-z0-9_]*/;
const NUM_RE = /^(\d+\.\d+([eE][+-]?\d+)?|\d+[eE][+-]?\d+|\d+)/;

export class ParseError extends Error {
  constructor(message: string, public at: number) {
    super(`${message} at byte ${at}`);
  }
}

class Parser {
  private pos = 0;

  constructor(private readonly text: string) {}

  private fail(message: string): never {
    throw new ParseError(message, this.pos);
  }

  private peek(): string {
    return this.text[this.pos] ?? "";
  }

  private eat(literal: string): void {
    if (!this.text.startsWith(literal, this.pos)) {
      this.fail(`expected '${literal}'`);
    }
    this.pos += literal.length;
  }

  private tryEat(literal: string): boolean {
    if (this.text.startsWith(literal, this.pos)) {
      this.pos += literal.length;
      return true;
    }
    return false;
  }

  private skipSpace(): void {
    while (/\s/.test(this.peek())) this.pos += 1;
  }

  private name(): string {
    const m = NAME_RE.exec(this.text.slice(this.pos));
    if (!m) this.fail("expected identifier");
    this.pos += m[0].length;
    return m[0];
  }

  private int(): number {
    const m = /^\d+/.exec(this.text.slice(this.pos));
    if (!m) this.fail("expected integer");
    this.pos += m[0].length;
    return parseInt(m[0], 10);
  }

  program(): Program {
    const exprs: Nest[] = [];
    this.skipSpace();
    while (this.pos < this.text.length) {
      exprs.push(this.nest());
      this.skipSpace();
    }
    if (exprs.length === 0) this.fail("empty program");
    return { exprs };
  }

  private nest(): Nest {
    const loops: Loop[] = [this.loop()];
    while (LOOP_KINDS.has(this.peek()) && this.text[this.pos + 1] === "^") {
      loops.push(this.loop());
    }
    this.eat("[");
    const body: BodyItem[] = [];
    while (!this.tryEat("]")) {
      if (LOOP_KINDS.has(this.peek()) && this.text[this.pos + 1] === "^") {
        body.push({ nest: this.nest() });
      } else {
        const lhs = this.tensorRef();
        this.eat("=");
        const rhs = this.value();
        this.eat(";");
        body.push({ eq: { lhs, rhs } });
      }
    }
    this.eat(";");
    if (body.length === 0) this.fail("empty nest body");
    return { loops, body };
  }

  private loop(): Loop {
    const kind = this.name() as LoopKind;
    if (!LOOP_KINDS.has(kind)) this.fail(`bad loop kind '${kind}'`);
    this.eat("^{");
    const extent = this.int();
    this.eat("}_{");
    const index = this.name();
    this.eat("=");
    const start = this.int();
    this.eat("}");
    return { kind, index, start, extent };
  }

  private tensorRef(): TensorRef {
    const name = this.name();
    this.eat("^{");
    const dtype = this.name();
    this.eat(",");
    const scope = this.name();
    this.eat("}");
    const indices: Index[] = [];
    if (this.tryEat("_{")) {
      indices.push(this.index());
      while (this.tryEat(",")) indices.push(this.index());
      this.eat("}");
    }
    return { name, dtype, scope, indices };
  }

  // index expressions: + - over * over atoms
  private index(): Index {
    let a = this.indexTerm();
    for (;;) {
      if (this.tryEat("+")) a = { kind: "iadd", a, b: this.indexTerm() };
      else if (this.tryEat("-")) a = { kind: "isub", a, b: this.indexTerm() };
      else return a;
    }
  }

  private indexTerm(): Index {
    let a = this.indexAtom();
    while (this.tryEat("*")) a = { kind: "imul", a, b: this.indexAtom() };
    return a;
  }

  private indexAtom(): Index {
    if (this.tryEat("(")) {
      const inner = this.index();
      this.eat(")");
      return inner;
    }
    if (/\d/.test(this.peek())) return { kind: "iconst", value: this.int() };
    return { kind: "ivar", name: this.name() };
  }

  // scalar values: + - over * / over ** over unary
  private value(): Scalar {
    let a = this.valueTerm();
    for (;;) {
      if (this.tryEat("+")) a = { kind: "bin", op: "+", a, b: this.valueTerm() };
      else if (this.tryEat("-")) a = { kind: "bin", op: "-", a, b: this.valueTerm() };
      else return a;
    }
  }

  private valueTerm(): Scalar {
    let a = this.valuePow();
    for (;;) {
      if (this.peek() === "*" && this.text[this.pos + 1] !== "*") {
        this.pos += 1;
        a = { kind: "bin", op: "*", a, b: this.valuePow() };
      } else if (this.tryEat("/")) {
        a = { kind: "bin", op: "/", a, b: this.valuePow() };
      } else {
        return a;
      }
    }
  }

  private valuePow(): Scalar {
    const a = this.valueUnary();
    if (this.tryEat("**")) {
      return { kind: "bin", op: "**", a, b: this.valueUnary() };
    }
    return a;
  }

  private valueUnary(): Scalar {
    if (this.tryEat("-")) return { kind: "neg", a: this.valueUnary() };
    return this.valueAtom();
  }

  private valueAtom(): Scalar {
    if (this.tryEat("(")) {
      const inner = this.value();
      this.eat(")");
      return inner;
    }
    const c = this.peek();
    if (/\d/.test(c)) {
      const m = NUM_RE.exec(this.text.slice(this.pos));
      if (!m) this.fail("bad number");
      this.pos += m[0].length;
      return { kind: "num", value: parseFloat(m[0]) };
    }
    const save = this.pos;
    const word = this.name();
    if (word === "inf") return { kind: "num", value: Infinity };
    if (word === "if_then_else") {
      this.eat("(");
      const cond = this.cond();
      this.eat(",");
      const then = this.value();
      this.eat(",");
      const other = this.value();
      this.eat(")");
      return { kind: "ite", cond, then, else: other };
    }
    if ((word === "max" || word === "min") && this.peek() === "(") {
      this.eat("(");
      const a = this.value();
      this.eat(",");
      const b = this.value();
      this.eat(")");
      return { kind: "minmax", op: word, a, b };
    }
    if (FUNCS.has(word) && this.peek() === "(") {
      this.eat("(");
      const a = this.value();
      this.eat(")");
      return { kind: "fn", op: word as "exp" | "log" | "sqrt" | "abs", a };
    }
    if (this.peek() === "^") {
      this.pos = save;
      return { kind: "read", ref: this.tensorRef() };
    }
    // bare identifier in value position reads the index variable
    return { kind: "idx", index: { kind: "ivar", name: word } };
  }

  private cond(): Cond {
    let a = this.cmpChain();
    while (this.tryEat("&")) a = { kind: "and", a, b: this.cmpChain() };
    return a;
  }

  private cmpOp(): CmpOp {
    for (const op of ["<=", ">=", "==", "!=", "<", ">"] as CmpOp[]) {
      if (this.tryEat(op)) return op;
    }
    this.fail("expected comparison operator");
  }

  private cmpChain(): Cond {
    const a = this.index();
    const op = this.cmpOp();
    const b = this.index();
    const c = this.peek();
    if (c === "<" || c === ">" || c === "=" || c === "!") {
      const op2 = this.cmpOp();
      const hi = this.index();
      return { kind: "range", lo: a, loOp: op, mid: b, hiOp: op2, hi };
    }
    return { kind: "cmp", op, a, b };
  }
}

export function parse(text: string): Program {
  return new Parser(text.trim()).program();
}
