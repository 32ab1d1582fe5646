/** Export pipeline: fetch or read a source bundle, canonicalize the edge
 *  list, optionally restrict to the largest connected component, and write
 *  the simulator's dataset format plus a manifest. */

import * as fs from "node:fs";
import * as https from "node:https";

import { DATASETS } from "./datasets.js";
import { Manifest, canonicalEdges, writeDataset } from "./format.js";
import { SourceGraph, parseSourceBundle } from "./source.js";

export interface ExportOptions {
  dataset: string;
  outDir: string;
  /** local .npz path; skips the download */
  sourcePath?: string;
  /** override the per-dataset largest-component default */
  largestComponent?: boolean;
}

export async function exportDataset(options: ExportOptions): Promise<Manifest> {
  const spec = DATASETS[options.dataset];
  if (!spec && !options.sourcePath) {
    throw new Error(
      `unknown dataset '${options.dataset}' and no --source given; known: ${Object.keys(DATASETS).join(", ")}`
    );
  }

  const raw = options.sourcePath
    ? fs.readFileSync(options.sourcePath)
    : await download(spec.url);
  const graph = parseSourceBundle(raw);

  let edges = canonicalEdges(graph.edges, graph.numNodes);
  let view = identityView(graph);
  const restrict = options.largestComponent ?? spec?.largestComponent ?? false;
  if (restrict) {
    const keep = largestComponent(graph.numNodes, edges);
    view = restrictView(graph, keep);
    const remap = new Int32Array(graph.numNodes).fill(-1);
    keep.forEach((orig, local) => {
      remap[orig] = local;
    });
    edges = edges
      .filter(([u, v]) => remap[u] >= 0 && remap[v] >= 0)
      .map(([u, v]) => [remap[u], remap[v]] as [number, number]);
  }

  const manifest = writeDataset(options.outDir, {
    name: options.dataset,
    numNodes: view.numNodes,
    numFeatures: graph.numFeatures,
    numClasses: view.numClasses,
    classNames: view.classNames,
    featureRow: view.featureRow,
    edges,
    labels: view.labels,
  });

  if (spec) {
    const ref = spec.reference;
    const got = manifest;
    if (
      ref.nodes !== got.num_nodes ||
      ref.edges !== got.num_edges ||
      ref.features !== got.num_features ||
      ref.classes !== got.num_classes
    ) {
      console.warn(
        `warning: exported counts (${got.num_nodes}/${got.num_edges}/${got.num_features}/${got.num_classes}) ` +
          `differ from the classically reported ${ref.nodes}/${ref.edges}/${ref.features}/${ref.classes}`
      );
    }
  }
  return manifest;
}

interface GraphView {
  numNodes: number;
  numClasses: number;
  classNames: string[];
  labels: Int32Array;
  featureRow(i: number): Float64Array;
}

function identityView(graph: SourceGraph): GraphView {
  const numClasses = graph.labels.length ? Math.max(...Array.from(graph.labels)) + 1 : 0;
  return {
    numNodes: graph.numNodes,
    numClasses,
    classNames: graph.classNames.slice(0, numClasses),
    labels: graph.labels,
    featureRow: graph.featureRow,
  };
}

/** Node ids of the largest connected component, ascending. */
export function largestComponent(numNodes: number, edges: Array<[number, number]>): number[] {
  const adjacency: number[][] = Array.from({ length: numNodes }, () => []);
  for (const [u, v] of edges) {
    adjacency[u].push(v);
    adjacency[v].push(u);
  }
  const component = new Int32Array(numNodes).fill(-1);
  let count = 0;
  const sizes: number[] = [];
  for (let start = 0; start < numNodes; start++) {
    if (component[start] !== -1) continue;
    const id = count++;
    let size = 0;
    const stack = [start];
    component[start] = id;
    while (stack.length) {
      const node = stack.pop()!;
      size++;
      for (const next of adjacency[node]) {
        if (component[next] === -1) {
          component[next] = id;
          stack.push(next);
        }
      }
    }
    sizes.push(size);
  }
  let best = 0;
  for (let i = 1; i < sizes.length; i++) {
    if (sizes[i] > sizes[best]) best = i;
  }
  const keep: number[] = [];
  for (let i = 0; i < numNodes; i++) {
    if (component[i] === best) keep.push(i);
  }
  return keep;
}

function restrictView(graph: SourceGraph, keep: number[]): GraphView {
  const labels = new Int32Array(keep.length);
  const present = new Set<number>();
  keep.forEach((orig, local) => {
    labels[local] = graph.labels[orig];
    present.add(graph.labels[orig]);
  });
  // densify class ids in case the cut dropped whole classes
  const ordered = Array.from(present).sort((a, b) => a - b);
  const classRemap = new Map(ordered.map((cls, i) => [cls, i]));
  for (let i = 0; i < labels.length; i++) {
    labels[i] = classRemap.get(labels[i])!;
  }
  return {
    numNodes: keep.length,
    numClasses: ordered.length,
    classNames: ordered.map((cls) => graph.classNames[cls] ?? `class_${cls}`),
    labels,
    featureRow: (i) => graph.featureRow(keep[i]),
  };
}

function download(url: string, redirects = 5): Promise<Buffer> {
  return new Promise((resolve, reject) => {
    https
      .get(url, (res) => {
        if (res.statusCode && res.statusCode >= 300 && res.statusCode < 400 && res.headers.location) {
          if (redirects === 0) {
            reject(new Error("too many redirects"));
            return;
          }
          res.resume();
          resolve(download(new URL(res.headers.location, url).toString(), redirects - 1));
          return;
        }
        if (res.statusCode !== 200) {
          reject(new Error(`download failed: HTTP ${res.statusCode} for ${url}`));
          return;
        }
        const chunks: Buffer[] = [];
        res.on("data", (c) => chunks.push(c));
        res.on("end", () => resolve(Buffer.concat(chunks)));
        res.on("error", reject);
      })
      .on("error", (err) => reject(new Error(`download failed for ${url}: ${err.message}`)));
  });
}
