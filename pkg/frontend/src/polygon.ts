import type { Vertex } from "./types.js";

/**
 * Even-odd polygon rasterization sampled at pixel centers, mirroring the
 * server rule exactly: pixel (row, col) is inside when a horizontal ray
 * from its center (col + 0.5, row + 0.5) crosses the boundary an odd
 * number of times. Only used for the live coverage preview — the server's
 * mask stays authoritative.
 */
export function rasterizePolygon(
  vertices: Vertex[],
  height: number,
  width: number,
): Uint8Array {
  if (vertices.length < 3) {
    throw new Error("polygon needs at least 3 vertices");
  }
  for (const [x, y] of vertices) {
    if (!(x >= 0 && x <= width && y >= 0 && y <= height)) {
      throw new Error(`vertex (${x},${y}) outside tile bounds ${width}x${height}`);
    }
  }

  const mask = new Uint8Array(height * width);
  const n = vertices.length;
  for (let row = 0; row < height; row++) {
    const cy = row + 0.5;
    for (let col = 0; col < width; col++) {
      const cx = col + 0.5;
      let inside = false;
      for (let i = 0; i < n; i++) {
        const [x1, y1] = vertices[i];
        const [x2, y2] = vertices[(i + 1) % n];
        if (y1 === y2) continue;
        const lo = Math.min(y1, y2);
        const hi = Math.max(y1, y2);
        if (cy > lo && cy <= hi) {
          const xAt = x1 + ((cy - y1) * (x2 - x1)) / (y2 - y1);
          if (cx < xAt) inside = !inside;
        }
      }
      if (inside) mask[row * width + col] = 1;
    }
  }
  return mask;
}

export function polygonCoverage(
  vertices: Vertex[],
  height: number,
  width: number,
): number {
  const mask = rasterizePolygon(vertices, height, width);
  let on = 0;
  for (let i = 0; i < mask.length; i++) on += mask[i];
  return on / mask.length;
}
