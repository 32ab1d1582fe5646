#!/usr/bin/env node
/** verify-fggcd <dir>: structural re-validation of an exported dataset. */

import { VerifyError, verifyDataset } from "./format.js";

function main(): number {
  const args = process.argv.slice(2);
  if (args.length !== 1 || args[0] === "--help" || args[0] === "-h") {
    console.error("usage: verify-fggcd <dataset-dir>");
    return 2;
  }
  try {
    const manifest = verifyDataset(args[0]);
    console.log(
      `pass: ${manifest.dataset} (${manifest.num_nodes} nodes, ${manifest.num_edges} edges, ` +
        `${manifest.num_features} features, ${manifest.num_classes} classes)`
    );
    return 0;
  } catch (err) {
    if (err instanceof VerifyError || err instanceof Error) {
      console.error(`fail: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

process.exit(main());
