/** Registry of supported benchmark datasets: download location, whether the
 *  conventional preprocessing restricts to the largest connected component,
 *  and the classically reported statistics (for post-export comparison). */

export interface DatasetSpec {
  url: string;
  largestComponent: boolean;
  reference: { nodes: number; edges: number; features: number; classes: number };
}

const BASE = "https://github.com/shchur/gnn-benchmark/raw/master/data/npz";

export const DATASETS: Record<string, DatasetSpec> = {
  cora: {
    url: `${BASE}/cora.npz`,
    largestComponent: false,
    reference: { nodes: 2708, edges: 5429, features: 1433, classes: 7 },
  },
  citeseer: {
    url: `${BASE}/citeseer.npz`,
    largestComponent: false,
    reference: { nodes: 3327, edges: 4732, features: 3703, classes: 6 },
  },
  "amazon-photo": {
    url: `${BASE}/amazon_electronics_photo.npz`,
    largestComponent: true,
    reference: { nodes: 7487, edges: 119043, features: 745, classes: 8 },
  },
  "amazon-computers": {
    url: `${BASE}/amazon_electronics_computers.npz`,
    largestComponent: true,
    reference: { nodes: 13381, edges: 245778, features: 767, classes: 10 },
  },
  "coauthor-cs": {
    url: `${BASE}/ms_academic_cs.npz`,
    largestComponent: false,
    reference: { nodes: 18333, edges: 81894, features: 6805, classes: 15 },
  },
};

export function datasetNames(): string[] {
  return Object.keys(DATASETS);
}
