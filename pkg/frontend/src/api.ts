import {
  GenerateRequest,
  GenerateResponse,
  ServiceApiError,
  TileListing,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the inference service JSON/PNG API. */
export class FloodgenClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  async listTiles(dataset: string, limit = 50, offset = 0): Promise<TileListing> {
    const params = new URLSearchParams({
      dataset,
      limit: String(limit),
      offset: String(offset),
    });
    const res = await this.fetchFn(`${this.baseUrl}/v1/tiles?${params}`);
    if (!res.ok) throw await this.toError(res);
    return (await res.json()) as TileListing;
  }

  /** Pre-event image PNG for a tile. */
  preImageUrl(tileId: string): string {
    return `${this.baseUrl}/v1/tiles/${encodeURIComponent(tileId)}/pre`;
  }

  async fetchPreImage(tileId: string): Promise<Blob> {
    const res = await this.fetchFn(this.preImageUrl(tileId));
    if (!res.ok) throw await this.toError(res);
    return res.blob();
  }

  async generate(req: GenerateRequest): Promise<GenerateResponse> {
    const res = await this.fetchFn(`${this.baseUrl}/v1/generate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
    if (!res.ok) throw await this.toError(res);
    return (await res.json()) as GenerateResponse;
  }

  private async toError(res: Response): Promise<ServiceApiError> {
    try {
      const body = await res.json();
      return new ServiceApiError(res.status, body.code ?? "unknown", body.message ?? "");
    } catch {
      return new ServiceApiError(res.status, "unknown", `HTTP ${res.status}`);
    }
  }
}
