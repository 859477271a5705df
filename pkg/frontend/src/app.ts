import { FloodgenClient } from "./api.js";
import { ScenarioState } from "./state.js";
import { ServiceApiError, TileEntry, Vertex } from "./types.js";

const PAGE_SIZE = 12;

/** Wires ScenarioState to the DOM. Kept free of any image math — pixels
 * and scores are shown exactly as the service returned them. */
export class ScenarioApp {
  private readonly state = new ScenarioState();
  private offset = 0;
  private total = 0;

  constructor(
    private readonly client: FloodgenClient,
    private readonly root: Document,
    private readonly dataset: string,
  ) {}

  async start(): Promise<void> {
    this.byId<HTMLButtonElement>("prev").onclick = () => this.page(-PAGE_SIZE);
    this.byId<HTMLButtonElement>("next").onclick = () => this.page(+PAGE_SIZE);
    this.byId<HTMLButtonElement>("generate").onclick = () => void this.generate();
    this.byId<HTMLButtonElement>("clear-polygon").onclick = () => {
      this.state.clearPolygon();
      this.syncControls();
    };
    const modeSel = this.byId<HTMLSelectElement>("mask-mode");
    modeSel.onchange = () => {
      this.state.setMaskMode(modeSel.value as "draw" | "category");
      this.syncControls();
    };
    const catSel = this.byId<HTMLSelectElement>("category");
    catSel.onchange = () => {
      this.state.setCategory(Number(catSel.value));
    };
    const canvas = this.byId<HTMLCanvasElement>("editor");
    canvas.onclick = (ev) => this.onCanvasClick(ev, canvas);
    const slider = this.byId<HTMLInputElement>("compare-slider");
    slider.oninput = () => {
      this.byId<HTMLImageElement>("generated-img").style.opacity =
        String(Number(slider.value) / 100);
    };
    await this.refreshTiles();
  }

  private async page(delta: number): Promise<void> {
    const next = this.offset + delta;
    if (next < 0 || next >= this.total) return;
    this.offset = next;
    await this.refreshTiles();
  }

  private async refreshTiles(): Promise<void> {
    let entries: TileEntry[];
    try {
      const listing = await this.client.listTiles(this.dataset, PAGE_SIZE, this.offset);
      this.total = listing.total;
      entries = listing.entries;
      this.banner(null);
    } catch (err) {
      this.banner(err);
      return;
    }
    const list = this.byId<HTMLUListElement>("tile-list");
    list.replaceChildren();
    for (const entry of entries) {
      const li = this.root.createElement("li");
      li.textContent = `${entry.tile_id} (${entry.event}, ${entry.split})`;
      li.onclick = () => void this.selectTile(entry);
      list.appendChild(li);
    }
  }

  private async selectTile(entry: TileEntry): Promise<void> {
    const canvas = this.byId<HTMLCanvasElement>("editor");
    const img = new Image();
    img.src = this.client.preImageUrl(entry.tile_id);
    await img.decode();
    canvas.width = img.naturalWidth;
    canvas.height = img.naturalHeight;
    this.state.selectTile(entry.tile_id, img.naturalWidth);
    this.redraw(img);
    this.byId<HTMLImageElement>("pre-img").src = img.src;
    this.syncControls();
  }

  private onCanvasClick(ev: MouseEvent, canvas: HTMLCanvasElement): void {
    if (this.state.maskMode !== "draw" || this.state.selectedTileId === null) return;
    const rect = canvas.getBoundingClientRect();
    const x = ((ev.clientX - rect.left) / rect.width) * canvas.width;
    const y = ((ev.clientY - rect.top) / rect.height) * canvas.height;
    this.state.addVertex([x, y] as Vertex);
    this.redraw();
    this.syncControls();
  }

  private redraw(img?: HTMLImageElement): void {
    const canvas = this.byId<HTMLCanvasElement>("editor");
    const ctx = canvas.getContext("2d");
    if (!ctx) return;
    if (img) ctx.drawImage(img, 0, 0);
    const poly = this.state.drawnPolygon;
    if (poly.length === 0) return;
    ctx.strokeStyle = "#ff5533";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(poly[0][0], poly[0][1]);
    for (const [x, y] of poly.slice(1)) ctx.lineTo(x, y);
    ctx.closePath();
    ctx.stroke();
  }

  private syncControls(): void {
    this.byId<HTMLButtonElement>("generate").disabled = !this.state.canGenerate();
    const cov = this.state.coveragePreview();
    this.byId<HTMLSpanElement>("coverage").textContent =
      this.state.maskMode === "draw" ? `coverage ≈ ${cov.toFixed(3)}` : "";
  }

  private async generate(): Promise<void> {
    this.syncControls();
    try {
      const resp = await this.state.generate(this.client);
      this.byId<HTMLImageElement>("generated-img").src =
        `data:image/png;base64,${resp.image}`;
      this.byId<HTMLSpanElement>("iou-badge").textContent =
        `consistency IoU ${resp.consistency_iou}`;
      this.byId<HTMLSpanElement>("server-coverage").textContent =
        `server coverage ${resp.requested_mask_coverage}`;
      this.renderHistory();
      this.banner(null);
    } catch (err) {
      this.banner(err);
    } finally {
      this.syncControls();
    }
  }

  private renderHistory(): void {
    const list = this.byId<HTMLOListElement>("history");
    list.replaceChildren();
    this.state.getHistory().forEach((entry, i) => {
      const li = this.root.createElement("li");
      li.textContent = `${entry.request.tile_id} · ${entry.request.mask_source} · ${entry.digest}`;
      li.onclick = () => {
        const restored = this.state.loadHistoryEntry(i);
        this.byId<HTMLImageElement>("generated-img").src =
          `data:image/png;base64,${restored.response.image}`;
        this.byId<HTMLSpanElement>("iou-badge").textContent =
          `consistency IoU ${restored.response.consistency_iou}`;
        this.syncControls();
      };
      list.appendChild(li);
    });
  }

  private banner(err: unknown): void {
    const el = this.byId<HTMLDivElement>("banner");
    if (err === null) {
      el.textContent = "";
      el.hidden = true;
      return;
    }
    el.hidden = false;
    el.textContent =
      err instanceof ServiceApiError
        ? `${err.code}: ${err.message}`
        : "service unreachable — retry shortly";
  }

  private byId<T extends HTMLElement>(id: string): T {
    const el = this.root.getElementById(id);
    if (!el) throw new Error(`missing element #${id}`);
    return el as T;
  }
}

export function boot(): void {
  const params = new URLSearchParams(window.location.search);
  const app = new ScenarioApp(
    new FloodgenClient(params.get("api") ?? ""),
    document,
    params.get("dataset") ?? "default",
  );
  void app.start();
}
