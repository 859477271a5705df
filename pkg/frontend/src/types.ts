// Wire types for the inference service JSON API.

export interface TileEntry {
  tile_id: string;
  event: string;
  split: string;
  gsd_m_per_px: number;
}

export interface TileListing {
  total: number;
  offset: number;
  entries: TileEntry[];
}

export type Vertex = [number, number]; // (x, y) in tile pixel coordinates

export type MaskSource = "raster_ref" | "polygon" | "category";

export interface GenerateRequest {
  tile_id: string;
  mask_source: MaskSource;
  payload: string | Vertex[] | number;
  model_tag: string;
}

export interface GenerateResponse {
  image: string; // base64 PNG
  requested_mask_coverage: number;
  consistency_iou: number;
  latency_ms: number;
}

export interface ServiceErrorBody {
  code: string;
  message: string;
}

export class ServiceApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}
