import * as path from "node:path";
import { fileURLToPath } from "node:url";

export function fixture(name: string): string {
  // compiled location is dist/test/, fixtures stay at the package root
  return path.join(path.dirname(fileURLToPath(import.meta.url)), "..", "..", "fixtures", name);
}
