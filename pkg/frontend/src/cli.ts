#!/usr/bin/env node
/** plot <kind> --in <csv> [--in2 <csv>] --out <img> [--truncate <v>] [--sqrt-ref]
 *
 * kinds: entropy-curves | variance-curve | heatmap
 * Exit codes: 0 success, 1 render/validation error, 2 usage error.
 */

import { main } from "./main.js";

process.exit(main(process.argv.slice(2)));
