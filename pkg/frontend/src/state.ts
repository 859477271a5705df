import { FloodgenClient } from "./api.js";
import { contentDigest } from "./digest.js";
import { polygonCoverage } from "./polygon.js";
import { GenerateRequest, GenerateResponse, Vertex } from "./types.js";

export type MaskMode = "category" | "draw";

export interface HistoryEntry {
  request: GenerateRequest;
  digest: string;
  response: GenerateResponse;
}

/**
 * Session state for the scenario explorer. The UI never computes imagery:
 * every displayed image and score comes from a service response. History
 * is append-only; the drawn polygon is editable only in draw mode.
 */
export class ScenarioState {
  selectedTileId: string | null = null;
  tileSize = 64; // px, updated when a tile is selected
  maskMode: MaskMode = "draw";
  drawnPolygon: Vertex[] = [];
  selectedCategory = 1;
  modelTag = "handcrafted";
  lastResponse: GenerateResponse | null = null;
  private readonly history: HistoryEntry[] = [];
  private inFlight = false;

  selectTile(tileId: string, tileSize: number): void {
    this.selectedTileId = tileId;
    this.tileSize = tileSize;
    this.drawnPolygon = [];
    this.lastResponse = null;
  }

  setMaskMode(mode: MaskMode): void {
    this.maskMode = mode;
    if (mode === "category") this.drawnPolygon = [];
  }

  addVertex(v: Vertex): void {
    if (this.maskMode !== "draw") {
      throw new Error("polygon edits are only allowed in draw mode");
    }
    this.drawnPolygon.push(v);
  }

  clearPolygon(): void {
    this.drawnPolygon = [];
  }

  setCategory(cat: number): void {
    if (!Number.isInteger(cat) || cat < 1 || cat > 5) {
      throw new Error(`category must be an integer 1-5, got ${cat}`);
    }
    this.selectedCategory = cat;
  }

  /** Live preview fraction; mirrors the server's even-odd rasterizer. */
  coveragePreview(): number {
    if (this.maskMode !== "draw" || this.drawnPolygon.length < 3) return 0;
    return polygonCoverage(this.drawnPolygon, this.tileSize, this.tileSize);
  }

  canGenerate(): boolean {
    if (this.inFlight || this.selectedTileId === null) return false;
    if (this.maskMode === "draw") return this.drawnPolygon.length >= 3;
    return true;
  }

  isGenerating(): boolean {
    return this.inFlight;
  }

  buildRequest(): GenerateRequest {
    if (this.selectedTileId === null) throw new Error("no tile selected");
    if (this.maskMode === "draw") {
      if (this.drawnPolygon.length < 3) {
        throw new Error("polygon needs at least 3 vertices");
      }
      return {
        tile_id: this.selectedTileId,
        mask_source: "polygon",
        payload: this.drawnPolygon.map((v) => [...v] as Vertex),
        model_tag: this.modelTag,
      };
    }
    return {
      tile_id: this.selectedTileId,
      mask_source: "category",
      payload: this.selectedCategory,
      model_tag: this.modelTag,
    };
  }

  /** Single in-flight generation per session. */
  async generate(client: FloodgenClient): Promise<GenerateResponse> {
    if (!this.canGenerate()) throw new Error("generation not available");
    const request = this.buildRequest();
    this.inFlight = true;
    try {
      const response = await client.generate(request);
      this.lastResponse = response;
      this.history.push({
        request,
        response,
        digest: contentDigest(JSON.stringify(request), response.image),
      });
      return response;
    } finally {
      this.inFlight = false;
    }
  }

  getHistory(): readonly HistoryEntry[] {
    return this.history;
  }

  /** Restore a past scenario's inputs (the response itself is replayed as-is). */
  loadHistoryEntry(index: number): HistoryEntry {
    const entry = this.history[index];
    if (!entry) throw new Error(`no history entry ${index}`);
    this.selectedTileId = entry.request.tile_id;
    if (entry.request.mask_source === "polygon") {
      this.maskMode = "draw";
      this.drawnPolygon = (entry.request.payload as Vertex[]).map(
        (v) => [...v] as Vertex,
      );
    } else if (entry.request.mask_source === "category") {
      this.maskMode = "category";
      this.selectedCategory = entry.request.payload as number;
    }
    this.lastResponse = entry.response;
    return entry;
  }
}
