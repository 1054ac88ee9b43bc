/**
 * render <figure-kind> <csv> -o <out.svg>
 *
 * Figure kinds: spectrum, hydrostatics, tv-decay, hydro-profiles.
 * Exits nonzero on unknown kinds, missing inputs, or schema drift.
 */

import { writeFileSync } from "node:fs";
import { render } from "./figures.js";
import { SchemaError } from "./csv.js";

function main(argv: string[]): number {
  const args = argv.slice(2);
  let out = "";
  const positional: string[] = [];
  for (let i = 0; i < args.length; i++) {
    if (args[i] === "-o" || args[i] === "--out") {
      out = args[++i] ?? "";
    } else {
      positional.push(args[i]);
    }
  }
  if (positional.length !== 2 || !out) {
    console.error("usage: render <figure-kind> <csv> -o <out.svg>");
    return 2;
  }
  const [kind, csvPath] = positional;
  try {
    const svg = render(kind, csvPath);
    writeFileSync(out, svg);
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

process.exit(main(process.argv));
