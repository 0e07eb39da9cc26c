import * as readline from "readline";

import { handleLine } from "./protocol";

const rl = readline.createInterface({ input: process.stdin, terminal: false });

rl.on("line", (line: string) => {
  if (!line.trim()) return;
  process.stdout.write(handleLine(line) + "\n");
});
