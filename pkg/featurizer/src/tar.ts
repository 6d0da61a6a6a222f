import * as zlib from "zlib";

export interface TarEntry {
  name: string;
  content: Buffer;
}

function octal(field: Buffer): number {
  const text = field.toString("ascii").replace(/\0/g, "").trim();
  return text ? parseInt(text, 8) : 0;
}

/**
 * Minimal ustar reader: enough to iterate regular files in QM9-style
 * archives. Gzip-compressed buffers (magic 1f 8b) are inflated first.
 */
export function readTarEntries(data: Buffer): TarEntry[] {
  if (data.length >= 2 && data[0] === 0x1f && data[1] === 0x8b) {
    data = zlib.gunzipSync(data);
  }
  const entries: TarEntry[] = [];
  let offset = 0;
  while (offset + 512 <= data.length) {
    const header = data.subarray(offset, offset + 512);
    if (header.every((b) => b === 0)) {
      break; // end-of-archive marker
    }
    const name = header.subarray(0, 100).toString("utf-8").replace(/\0.*$/, "");
    const prefix = header.subarray(345, 500).toString("utf-8").replace(/\0.*$/, "");
    const size = octal(header.subarray(124, 136));
    const typeflag = String.fromCharCode(header[156]);
    offset += 512;
    if (typeflag === "0" || typeflag === "\0" || typeflag === "") {
      const content = Buffer.from(data.subarray(offset, offset + size));
      entries.push({ name: prefix ? `${prefix}/${name}` : name, content });
    }
    offset += Math.ceil(size / 512) * 512;
  }
  return entries;
}
