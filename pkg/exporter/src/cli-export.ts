#!/usr/bin/env node
/** export-fggcd --dataset <name> --out <dir> [--source <file.npz>]
 *  [--largest-component | --full-graph] */

import { datasetNames } from "./datasets.js";
import { exportDataset } from "./export.js";

function usage(): never {
  console.error(
    "usage: export-fggcd --dataset <name> --out <dir> [--source <file.npz>] " +
      "[--largest-component | --full-graph]\n" +
      `known datasets: ${datasetNames().join(", ")}`
  );
  process.exit(2);
}

async function main(): Promise<number> {
  const args = process.argv.slice(2);
  let dataset = "";
  let outDir = "";
  let sourcePath: string | undefined;
  let largestComponent: boolean | undefined;

  for (let i = 0; i < args.length; i++) {
    switch (args[i]) {
      case "--dataset":
        dataset = args[++i] ?? "";
        break;
      case "--out":
        outDir = args[++i] ?? "";
        break;
      case "--source":
        sourcePath = args[++i];
        break;
      case "--largest-component":
        largestComponent = true;
        break;
      case "--full-graph":
        largestComponent = false;
        break;
      case "--help":
      case "-h":
        usage();
        break;
      default:
        console.error(`unknown argument: ${args[i]}`);
        usage();
    }
  }
  if (!dataset || !outDir) {
    usage();
  }

  const manifest = await exportDataset({ dataset, outDir, sourcePath, largestComponent });
  console.log(
    `exported ${manifest.dataset}: ${manifest.num_nodes} nodes, ${manifest.num_edges} edges, ` +
      `${manifest.num_features} features, ${manifest.num_classes} classes -> ${outDir}`
  );
  console.log(`features.bin sha256 ${manifest.features_sha256}`);
  return 0;
}

main()
  .then((code) => process.exit(code))
  .catch((err) => {
    console.error(`error: ${err.message}`);
    process.exit(1);
  });
