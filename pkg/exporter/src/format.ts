/** Writer and verifier for the simulator's on-disk dataset format:
 *  meta.json, features.bin (magic + u64 dims + f32 rows), edges.csv,
 *  labels.csv, plus a manifest with the features checksum. */

import { createHash } from "node:crypto";
import * as fs from "node:fs";
import * as path from "node:path";

export const MAGIC = Buffer.from("FGGCD1\x00\x00", "latin1");

export interface DatasetPayload {
  name: string;
  numNodes: number;
  numFeatures: number;
  numClasses: number;
  classNames: string[];
  featureRow(i: number): Float64Array;
  /** undirected, deduplicated, u < v */
  edges: Array<[number, number]>;
  labels: Int32Array;
}

export interface Manifest {
  dataset: string;
  num_nodes: number;
  num_edges: number;
  num_features: number;
  num_classes: number;
  features_sha256: string;
}

export function canonicalEdges(records: Array<[number, number]>, numNodes: number): Array<[number, number]> {
  const seen = new Set<number>();
  const out: Array<[number, number]> = [];
  for (const [a, b] of records) {
    if (a === b) continue;
    if (a < 0 || b < 0 || a >= numNodes || b >= numNodes) {
      throw new Error(`edge endpoint out of range: ${a},${b}`);
    }
    const lo = Math.min(a, b);
    const hi = Math.max(a, b);
    const key = lo * numNodes + hi;
    if (!seen.has(key)) {
      seen.add(key);
      out.push([lo, hi]);
    }
  }
  out.sort((x, y) => (x[0] - y[0]) || (x[1] - y[1]));
  return out;
}

export function writeDataset(outDir: string, payload: DatasetPayload): Manifest {
  fs.mkdirSync(outDir, { recursive: true });

  const meta = {
    name: payload.name,
    num_nodes: payload.numNodes,
    num_features: payload.numFeatures,
    num_classes: payload.numClasses,
    class_names: payload.classNames,
  };
  fs.writeFileSync(path.join(outDir, "meta.json"), JSON.stringify(meta, null, 2) + "\n");

  const hash = createHash("sha256");
  const fd = fs.openSync(path.join(outDir, "features.bin"), "w");
  try {
    const header = Buffer.alloc(24);
    MAGIC.copy(header, 0);
    header.writeBigUInt64LE(BigInt(payload.numNodes), 8);
    header.writeBigUInt64LE(BigInt(payload.numFeatures), 16);
    fs.writeSync(fd, header);
    hash.update(header);
    for (let i = 0; i < payload.numNodes; i++) {
      const row = Float32Array.from(payload.featureRow(i));
      const bytes = Buffer.from(row.buffer, row.byteOffset, row.byteLength);
      fs.writeSync(fd, bytes);
      hash.update(bytes);
    }
  } finally {
    fs.closeSync(fd);
  }

  const edgeLines = ["src,dst"];
  for (const [u, v] of payload.edges) {
    edgeLines.push(`${u},${v}`);
  }
  fs.writeFileSync(path.join(outDir, "edges.csv"), edgeLines.join("\n") + "\n");

  const labelLines = ["node,label"];
  for (let i = 0; i < payload.numNodes; i++) {
    labelLines.push(`${i},${payload.labels[i]}`);
  }
  fs.writeFileSync(path.join(outDir, "labels.csv"), labelLines.join("\n") + "\n");

  const manifest: Manifest = {
    dataset: payload.name,
    num_nodes: payload.numNodes,
    num_edges: payload.edges.length,
    num_features: payload.numFeatures,
    num_classes: payload.numClasses,
    features_sha256: hash.digest("hex"),
  };
  fs.writeFileSync(path.join(outDir, "manifest.json"), JSON.stringify(manifest, null, 2) + "\n");
  return manifest;
}

export class VerifyError extends Error {}

/** Re-read an exported directory and re-check structure, ranges, and the
 *  manifest checksum. Throws VerifyError at the first violation. */
export function verifyDataset(dir: string): Manifest {
  const metaPath = path.join(dir, "meta.json");
  if (!fs.existsSync(metaPath)) {
    throw new VerifyError("missing meta.json");
  }
  const meta = JSON.parse(fs.readFileSync(metaPath, "utf8"));
  for (const key of ["name", "num_nodes", "num_features", "num_classes"]) {
    if (!(key in meta)) {
      throw new VerifyError(`meta.json missing key '${key}'`);
    }
  }

  const features = fs.readFileSync(path.join(dir, "features.bin"));
  if (!features.subarray(0, 8).equals(MAGIC)) {
    throw new VerifyError("features.bin has bad magic bytes");
  }
  const n = Number(features.readBigUInt64LE(8));
  const d = Number(features.readBigUInt64LE(16));
  if (n !== meta.num_nodes || d !== meta.num_features) {
    throw new VerifyError(`features.bin header ${n}x${d} disagrees with meta.json`);
  }
  const expectedBytes = 24 + 4 * n * d;
  if (features.length !== expectedBytes) {
    throw new VerifyError(`features.bin is ${features.length} bytes, expected ${expectedBytes}`);
  }
  for (let i = 0; i < n * d; i++) {
    const v = features.readFloatLE(24 + 4 * i);
    if (!Number.isFinite(v)) {
      throw new VerifyError(`non-finite feature value at flat index ${i}`);
    }
  }

  const edges = readCsv(path.join(dir, "edges.csv"), "src,dst");
  let numEdges = 0;
  for (const [lineNo, [u, v]] of edges.entries()) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw new VerifyError(`edges.csv record ${lineNo + 2}: endpoint out of range`);
    }
    numEdges++;
  }

  const labels = readCsv(path.join(dir, "labels.csv"), "node,label");
  if (labels.length !== n) {
    throw new VerifyError(`labels.csv has ${labels.length} rows, expected ${n}`);
  }
  const covered = new Set<number>();
  for (const [lineNo, [node, label]] of labels.entries()) {
    if (node < 0 || node >= n || covered.has(node)) {
      throw new VerifyError(`labels.csv record ${lineNo + 2}: bad or duplicate node id`);
    }
    covered.add(node);
    if (label < 0 || label >= meta.num_classes) {
      throw new VerifyError(`labels.csv record ${lineNo + 2}: label ${label} out of range`);
    }
  }

  const manifestPath = path.join(dir, "manifest.json");
  if (!fs.existsSync(manifestPath)) {
    throw new VerifyError("missing manifest.json");
  }
  const manifest: Manifest = JSON.parse(fs.readFileSync(manifestPath, "utf8"));
  const checksum = createHash("sha256").update(features).digest("hex");
  if (manifest.features_sha256 !== checksum) {
    throw new VerifyError("manifest checksum does not match features.bin");
  }
  if (
    manifest.num_nodes !== meta.num_nodes ||
    manifest.num_features !== meta.num_features ||
    manifest.num_classes !== meta.num_classes ||
    manifest.num_edges !== numEdges
  ) {
    throw new VerifyError("manifest counts disagree with meta.json / edges.csv");
  }
  return manifest;
}

function readCsv(file: string, header: string): Array<[number, number]> {
  if (!fs.existsSync(file)) {
    throw new VerifyError(`missing ${path.basename(file)}`);
  }
  const lines = fs.readFileSync(file, "utf8").trim().split("\n");
  if (lines[0] !== header) {
    throw new VerifyError(`${path.basename(file)} must start with header '${header}'`);
  }
  return lines.slice(1).map((line, i) => {
    const parts = line.split(",");
    const a = Number(parts[0]);
    const b = Number(parts[1]);
    if (parts.length !== 2 || !Number.isInteger(a) || !Number.isInteger(b)) {
      throw new VerifyError(`${path.basename(file)} record ${i + 2}: malformed line '${line}'`);
    }
    return [a, b];
  });
}
