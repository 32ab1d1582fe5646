import assert from "node:assert/strict";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { test } from "node:test";

import { canonicalEdges, verifyDataset } from "../src/format.js";
import { exportDataset, largestComponent } from "../src/export.js";
import { fixture } from "./util.js";

function tmpdir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "fggcd-export-"));
}

test("canonical edges: symmetrize, dedup, drop self-loops", () => {
  const records: Array<[number, number]> = [
    [0, 1],
    [1, 0],
    [2, 2],
    [3, 1],
    [1, 3],
    [0, 1],
  ];
  assert.deepEqual(canonicalEdges(records, 4), [
    [0, 1],
    [1, 3],
  ]);
});

test("largest component picks the bigger side", () => {
  const edges: Array<[number, number]> = [
    [0, 1],
    [1, 2],
    [3, 4],
  ];
  assert.deepEqual(largestComponent(5, edges), [0, 1, 2]);
});

test("export from the sparse fixture and verify", async () => {
  const out = tmpdir();
  const manifest = await exportDataset({
    dataset: "fixture-sparse",
    outDir: out,
    sourcePath: fixture("tiny_sparse.npz"),
  });
  assert.equal(manifest.num_nodes, 8);
  assert.equal(manifest.num_edges, 7); // self-loop dropped, both orientations merged
  assert.equal(manifest.num_features, 5);
  assert.equal(manifest.num_classes, 4);

  const verified = verifyDataset(out);
  assert.equal(verified.features_sha256, manifest.features_sha256);

  const meta = JSON.parse(fs.readFileSync(path.join(out, "meta.json"), "utf8"));
  assert.deepEqual(meta.class_names, ["alpha", "beta", "gamma", "delta"]);

  const edgeLines = fs.readFileSync(path.join(out, "edges.csv"), "utf8").trim().split("\n");
  assert.equal(edgeLines[0], "src,dst");
  assert.equal(edgeLines.length, 8);
  assert.ok(!edgeLines.includes("2,2"));
});

test("re-export is byte-identical (deterministic checksum)", async () => {
  const a = tmpdir();
  const b = tmpdir();
  const opts = { dataset: "fixture-sparse", sourcePath: fixture("tiny_sparse.npz") };
  const ma = await exportDataset({ ...opts, outDir: a });
  const mb = await exportDataset({ ...opts, outDir: b });
  assert.equal(ma.features_sha256, mb.features_sha256);
  assert.ok(fs.readFileSync(path.join(a, "features.bin")).equals(fs.readFileSync(path.join(b, "features.bin"))));
  assert.equal(
    fs.readFileSync(path.join(a, "edges.csv"), "utf8"),
    fs.readFileSync(path.join(b, "edges.csv"), "utf8")
  );
});

test("largest-component restriction relabels nodes and classes", async () => {
  const out = tmpdir();
  const manifest = await exportDataset({
    dataset: "fixture-dense",
    outDir: out,
    sourcePath: fixture("tiny_dense.npz"),
    largestComponent: true,
  });
  assert.equal(manifest.num_nodes, 3);
  assert.equal(manifest.num_edges, 2);
  assert.equal(manifest.num_classes, 2);
  verifyDataset(out);

  const labels = fs.readFileSync(path.join(out, "labels.csv"), "utf8").trim().split("\n").slice(1);
  assert.deepEqual(labels, ["0,0", "1,1", "2,0"]);
});

test("full-graph export of the dense fixture keeps both components", async () => {
  const out = tmpdir();
  const manifest = await exportDataset({
    dataset: "fixture-dense",
    outDir: out,
    sourcePath: fixture("tiny_dense.npz"),
    largestComponent: false,
  });
  assert.equal(manifest.num_nodes, 5);
  assert.equal(manifest.num_edges, 3);
  verifyDataset(out);
});

test("unknown dataset without --source fails with the known names", async () => {
  await assert.rejects(
    exportDataset({ dataset: "nope", outDir: tmpdir() }),
    /unknown dataset 'nope'.*cora/s
  );
});
