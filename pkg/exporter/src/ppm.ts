/** Binary PPM (P6, maxval 255) reader/writer over packed RGB rasters. */

import { FormatError } from "./errors.js";

export interface Raster {
  width: number;
  height: number;
  /** row-major RGB, 3 bytes per pixel */
  pixels: Uint8Array;
}

export function makeRaster(width: number, height: number, pixels: Uint8Array): Raster {
  if (width <= 0 || height <= 0) {
    throw new FormatError(`raster dims must be positive, got ${width}x${height}`);
  }
  if (pixels.length !== width * height * 3) {
    throw new FormatError(`pixel buffer has ${pixels.length} bytes, expected ${width * height * 3}`);
  }
  return { width, height, pixels };
}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x09 || byte === 0x0a || byte === 0x0d || byte === 0x0b || byte === 0x0c;
}

function readToken(data: Uint8Array, pos: number): [string, number] {
  const n = data.length;
  while (pos < n) {
    if (isSpace(data[pos])) {
      pos += 1;
    } else if (data[pos] === 0x23 /* '#' */) {
      while (pos < n && data[pos] !== 0x0a && data[pos] !== 0x0d) pos += 1;
    } else {
      break;
    }
  }
  const start = pos;
  while (pos < n && !isSpace(data[pos])) pos += 1;
  if (start === pos) throw new FormatError("unexpected end of PPM header");
  return [Buffer.from(data.subarray(start, pos)).toString("ascii"), pos];
}

export function readPpm(data: Uint8Array): Raster {
  if (data.length < 2 || data[0] !== 0x50 /* 'P' */ || data[1] !== 0x36 /* '6' */) {
    throw new FormatError("expected binary PPM magic P6");
  }
  let pos = 2;
  const fields: number[] = [];
  for (let i = 0; i < 3; i++) {
    const [token, next] = readToken(data, pos);
    if (!/^\d+$/.test(token)) throw new FormatError(`non-numeric PPM header field ${token}`);
    fields.push(Number(token));
    pos = next;
  }
  const [width, height, maxval] = fields;
  if (width <= 0 || height <= 0) throw new FormatError(`non-positive dimensions ${width}x${height}`);
  if (maxval !== 255) throw new FormatError(`only maxval 255 supported, got ${maxval}`);
  if (pos >= data.length || !isSpace(data[pos])) throw new FormatError("missing whitespace after maxval");
  pos += 1;
  const expect = width * height * 3;
  if (data.length - pos < expect) {
    throw new FormatError(`truncated pixel data: got ${data.length - pos} bytes, expected ${expect}`);
  }
  return makeRaster(width, height, data.slice(pos, pos + expect));
}

export function writePpm(img: Raster): Uint8Array {
  const header = Buffer.from(`P6\n${img.width} ${img.height}\n255\n`, "ascii");
  return Buffer.concat([header, Buffer.from(img.pixels)]);
}
