/** Minimal .npy reader: little-endian numeric dtypes plus fixed-width
 *  unicode/byte strings, versions 1.0-3.0, C or Fortran order. */

export interface NpyArray {
  shape: number[];
  /** numeric payload flattened in C order; empty for string arrays */
  data: Float64Array;
  /** string payload for 'U'/'S' dtypes */
  strings?: string[];
}

const MAGIC = Buffer.from("\x93NUMPY", "latin1");

export function parseNpy(buf: Buffer): NpyArray {
  if (!buf.subarray(0, 6).equals(MAGIC)) {
    throw new Error("not an .npy payload (bad magic)");
  }
  const major = buf[6];
  let headerLen: number;
  let offset: number;
  if (major === 1) {
    headerLen = buf.readUInt16LE(8);
    offset = 10 + headerLen;
  } else {
    headerLen = buf.readUInt32LE(8);
    offset = 12 + headerLen;
  }
  const header = buf.subarray(offset - headerLen, offset).toString("latin1");

  const descrMatch = header.match(/'descr':\s*'([^']+)'/);
  const orderMatch = header.match(/'fortran_order':\s*(True|False)/);
  const shapeMatch = header.match(/'shape':\s*\(([^)]*)\)/);
  if (!descrMatch || !orderMatch || !shapeMatch) {
    throw new Error(`unparseable .npy header: ${header.trim()}`);
  }
  const descr = descrMatch[1];
  const fortran = orderMatch[1] === "True";
  const shape = shapeMatch[1]
    .split(",")
    .map((s) => s.trim())
    .filter((s) => s.length > 0)
    .map((s) => parseInt(s, 10));
  const count = shape.reduce((a, b) => a * b, 1);
  const body = buf.subarray(offset);

  const strings = parseStringDtype(descr, body, count);
  if (strings) {
    return { shape, data: new Float64Array(0), strings };
  }

  let data = readNumeric(descr, body, count);
  if (fortran && shape.length === 2) {
    data = cToFortran(data, shape[0], shape[1]);
  } else if (fortran && shape.length > 2) {
    throw new Error("fortran_order only supported for 2-D arrays");
  }
  return { shape, data };
}

function parseStringDtype(descr: string, body: Buffer, count: number): string[] | undefined {
  const u = descr.match(/^[<>|=]?U(\d+)$/);
  if (u) {
    const width = parseInt(u[1], 10);
    const out: string[] = [];
    for (let i = 0; i < count; i++) {
      const chars: number[] = [];
      for (let j = 0; j < width; j++) {
        const cp = body.readUInt32LE((i * width + j) * 4);
        if (cp === 0) break;
        chars.push(cp);
      }
      out.push(String.fromCodePoint(...chars));
    }
    return out;
  }
  const s = descr.match(/^[<>|=]?S(\d+)$/);
  if (s) {
    const width = parseInt(s[1], 10);
    const out: string[] = [];
    for (let i = 0; i < count; i++) {
      const slice = body.subarray(i * width, (i + 1) * width);
      const end = slice.indexOf(0);
      out.push(slice.subarray(0, end === -1 ? width : end).toString("utf8"));
    }
    return out;
  }
  return undefined;
}

function readNumeric(descr: string, body: Buffer, count: number): Float64Array {
  const out = new Float64Array(count);
  const fill = (get: (i: number) => number) => {
    for (let i = 0; i < count; i++) out[i] = get(i);
    return out;
  };
  switch (descr) {
    case "<f8":
      return fill((i) => body.readDoubleLE(i * 8));
    case "<f4":
      return fill((i) => body.readFloatLE(i * 4));
    case "<i8":
      return fill((i) => Number(body.readBigInt64LE(i * 8)));
    case "<u8":
      return fill((i) => Number(body.readBigUInt64LE(i * 8)));
    case "<i4":
      return fill((i) => body.readInt32LE(i * 4));
    case "<u4":
      return fill((i) => body.readUInt32LE(i * 4));
    case "<i2":
      return fill((i) => body.readInt16LE(i * 2));
    case "<u2":
      return fill((i) => body.readUInt16LE(i * 2));
    case "|i1":
      return fill((i) => body.readInt8(i));
    case "|u1":
    case "<u1":
    case "|b1":
      return fill((i) => body.readUInt8(i));
    default:
      throw new Error(`unsupported dtype ${descr}`);
  }
}

function cToFortran(data: Float64Array, rows: number, cols: number): Float64Array {
  const out = new Float64Array(data.length);
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      out[r * cols + c] = data[c * rows + r];
    }
  }
  return out;
}
