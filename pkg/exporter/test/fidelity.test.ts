/** Real-dataset fidelity: exported Cora and CiteSeer must reproduce the
 *  classically reported statistics exactly, and verification must pass.
 *  Needs network access to the standard distribution; skips offline. */

import assert from "node:assert/strict";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { test } from "node:test";

import { DATASETS } from "../src/datasets.js";
import { exportDataset } from "../src/export.js";
import { verifyDataset } from "../src/format.js";

const OFFLINE_CODES = ["ENOTFOUND", "EAI_AGAIN", "ETIMEDOUT", "ECONNREFUSED", "ECONNRESET"];

function isOffline(err: unknown): boolean {
  const msg = err instanceof Error ? err.message : String(err);
  return OFFLINE_CODES.some((code) => msg.includes(code)) || msg.includes("download failed");
}

for (const name of ["cora", "citeseer"] as const) {
  test(`table fidelity: ${name}`, async (t) => {
    const out = fs.mkdtempSync(path.join(os.tmpdir(), `fggcd-${name}-`));
    let manifest;
    try {
      manifest = await exportDataset({ dataset: name, outDir: out });
    } catch (err) {
      if (isOffline(err)) {
        t.skip(`no network access to the dataset distribution (${(err as Error).message})`);
        return;
      }
      throw err;
    }
    verifyDataset(out);
    const ref = DATASETS[name].reference;
    assert.equal(manifest.num_nodes, ref.nodes);
    assert.equal(manifest.num_features, ref.features);
    assert.equal(manifest.num_classes, ref.classes);
    assert.equal(manifest.num_edges, ref.edges);
  });
}
