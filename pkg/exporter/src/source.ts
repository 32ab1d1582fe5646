/** Interpret a benchmark .npz bundle (CSR adjacency + CSR-or-dense node
 *  attributes + labels + optional class names) as an in-memory graph. */

import { NpyArray } from "./npy.js";
import { readNpz } from "./npz.js";

export interface SourceGraph {
  numNodes: number;
  numFeatures: number;
  /** dense feature row in C order */
  featureRow(i: number): Float64Array;
  /** directed edge records straight from the adjacency matrix */
  edges: Array<[number, number]>;
  labels: Int32Array;
  classNames: string[];
}

function needed(arrays: Map<string, NpyArray>, key: string): NpyArray {
  const arr = arrays.get(key);
  if (!arr) {
    throw new Error(`source bundle is missing array '${key}'`);
  }
  return arr;
}

export function parseSourceBundle(buf: Buffer): SourceGraph {
  const arrays = readNpz(buf);

  const adjShape = needed(arrays, "adj_shape").data;
  const numNodes = adjShape[0];
  const adjIndptr = needed(arrays, "adj_indptr").data;
  const adjIndices = needed(arrays, "adj_indices").data;

  const edges: Array<[number, number]> = [];
  for (let row = 0; row < numNodes; row++) {
    for (let k = adjIndptr[row]; k < adjIndptr[row + 1]; k++) {
      edges.push([row, adjIndices[k]]);
    }
  }

  let numFeatures: number;
  let featureRow: (i: number) => Float64Array;
  if (arrays.has("attr_matrix")) {
    const attr = needed(arrays, "attr_matrix");
    numFeatures = attr.shape[1];
    const data = attr.data;
    featureRow = (i) => data.subarray(i * numFeatures, (i + 1) * numFeatures) as Float64Array;
  } else {
    const shape = needed(arrays, "attr_shape").data;
    numFeatures = shape[1];
    const indptr = needed(arrays, "attr_indptr").data;
    const indices = needed(arrays, "attr_indices").data;
    const values = needed(arrays, "attr_data").data;
    featureRow = (i) => {
      const row = new Float64Array(numFeatures);
      for (let k = indptr[i]; k < indptr[i + 1]; k++) {
        row[indices[k]] = values[k];
      }
      return row;
    };
  }

  const labelsArr = needed(arrays, "labels").data;
  if (labelsArr.length !== numNodes) {
    throw new Error(`labels length ${labelsArr.length} does not match ${numNodes} nodes`);
  }
  const labels = new Int32Array(numNodes);
  for (let i = 0; i < numNodes; i++) {
    labels[i] = labelsArr[i];
  }

  let classNames = arrays.get("class_names")?.strings ?? [];
  const numClasses = labels.length ? Math.max(...labels) + 1 : 0;
  if (classNames.length < numClasses) {
    classNames = Array.from({ length: numClasses }, (_, i) => classNames[i] ?? `class_${i}`);
  }

  return { numNodes, numFeatures, featureRow, edges, labels, classNames };
}
