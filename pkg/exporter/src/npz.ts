/** Minimal ZIP reader sufficient for .npz bundles (stored or deflated
 *  entries, no zip64). */

import { inflateRawSync } from "node:zlib";

import { NpyArray, parseNpy } from "./npy.js";

const EOCD_SIG = 0x06054b50;
const CENTRAL_SIG = 0x02014b50;
const LOCAL_SIG = 0x04034b50;

export function readZipEntries(buf: Buffer): Map<string, Buffer> {
  const eocd = findEocd(buf);
  const entryCount = buf.readUInt16LE(eocd + 10);
  let pos = buf.readUInt32LE(eocd + 16); // central directory offset

  const entries = new Map<string, Buffer>();
  for (let i = 0; i < entryCount; i++) {
    if (buf.readUInt32LE(pos) !== CENTRAL_SIG) {
      throw new Error("corrupt zip: bad central directory signature");
    }
    const method = buf.readUInt16LE(pos + 10);
    const compressedSize = buf.readUInt32LE(pos + 20);
    const nameLen = buf.readUInt16LE(pos + 28);
    const extraLen = buf.readUInt16LE(pos + 30);
    const commentLen = buf.readUInt16LE(pos + 32);
    const localOffset = buf.readUInt32LE(pos + 42);
    const name = buf.subarray(pos + 46, pos + 46 + nameLen).toString("utf8");

    if (buf.readUInt32LE(localOffset) !== LOCAL_SIG) {
      throw new Error(`corrupt zip: bad local header for ${name}`);
    }
    const localNameLen = buf.readUInt16LE(localOffset + 26);
    const localExtraLen = buf.readUInt16LE(localOffset + 28);
    const dataStart = localOffset + 30 + localNameLen + localExtraLen;
    const raw = buf.subarray(dataStart, dataStart + compressedSize);

    let payload: Buffer;
    if (method === 0) {
      payload = Buffer.from(raw);
    } else if (method === 8) {
      payload = inflateRawSync(raw);
    } else {
      throw new Error(`unsupported zip compression method ${method} for ${name}`);
    }
    entries.set(name, payload);
    pos += 46 + nameLen + extraLen + commentLen;
  }
  return entries;
}

function findEocd(buf: Buffer): number {
  const limit = Math.max(0, buf.length - 22 - 65535);
  for (let pos = buf.length - 22; pos >= limit; pos--) {
    if (buf.readUInt32LE(pos) === EOCD_SIG) {
      return pos;
    }
  }
  throw new Error("not a zip archive (no end-of-central-directory record)");
}

/** Load every array of an .npz bundle, keyed by name without the .npy suffix. */
export function readNpz(buf: Buffer): Map<string, NpyArray> {
  const out = new Map<string, NpyArray>();
  for (const [name, payload] of readZipEntries(buf)) {
    const key = name.endsWith(".npy") ? name.slice(0, -4) : name;
    out.set(key, parseNpy(payload));
  }
  return out;
}
