"""HTTP service: tile browsing and on-demand conditioned generation.

Read-only data plane: manifests and checkpoints are never mutated.
Generation is serialized per loaded model via a lock, so concurrent
identical requests return identical payloads.
"""

from __future__ import annotations

import base64
import io
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from PIL import Image
from pydantic import BaseModel

from floodgen.io_utils import load_image, load_mask, to_uint8
from floodgen.metrics.evaluate import Segmenter
from floodgen.metrics.iou import iou
from floodgen.service.polygon import rasterize_polygon
from floodgen.types import BinaryMask, ImageTile, Manifest

ModelFn = Callable[[ImageTile, BinaryMask], ImageTile]


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class ServiceState:
    datasets: dict[str, Manifest]
    models: dict[str, ModelFn]
    segmenter: Segmenter
    # category (1-5) hazard rasters, pre-registered per tile
    category_masks: dict[str, dict[int, BinaryMask]] = field(default_factory=dict)
    # named mask rasters addressable by raster_ref
    raster_masks: dict[str, BinaryMask] = field(default_factory=dict)
    loading_models: set[str] = field(default_factory=set)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def find_record(self, tile_id: str):
        for m in self.datasets.values():
            try:
                return m.get(tile_id)
            except KeyError:
                continue
        raise ServiceError(404, "tile_not_found", f"unknown tile {tile_id!r}")


class GenerateRequest(BaseModel):
    tile_id: str
    mask_source: Literal["raster_ref", "polygon", "category"]
    payload: str | list[tuple[float, float]] | int
    model_tag: str


class GenerateResponse(BaseModel):
    image: str  # base64 PNG
    requested_mask_coverage: float
    consistency_iou: float
    latency_ms: float


def _png_bytes(pixels: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(to_uint8(pixels), mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="floodgen inference service")

    @app.exception_handler(ServiceError)
    async def _service_error(_req: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    @app.get("/v1/tiles")
    def list_tiles(dataset: str, limit: int = 50, offset: int = 0):
        if dataset not in state.datasets:
            raise ServiceError(404, "dataset_not_found",
                               f"unknown dataset {dataset!r}")
        records = sorted(state.datasets[dataset].records, key=lambda r: r.tile_id)
        page = records[offset:offset + limit]
        return {
            "total": len(records),
            "offset": offset,
            "entries": [{
                "tile_id": r.tile_id, "event": r.event, "split": r.split,
                "gsd_m_per_px": r.gsd_m_per_px,
            } for r in page],
        }

    @app.get("/v1/tiles/{tile_id}/pre")
    def get_pre(tile_id: str):
        rec = state.find_record(tile_id)
        tile = load_image(rec.pre_path, rec.gsd_m_per_px, rec.tile_id, rec.event)
        return Response(content=_png_bytes(tile.pixels), media_type="image/png")

    @app.post("/v1/generate", response_model=GenerateResponse)
    def generate(req: GenerateRequest):
        t0 = time.perf_counter()
        if req.model_tag in state.loading_models:
            raise ServiceError(409, "model_loading",
                               f"model {req.model_tag!r} is loading; retry")
        if req.model_tag not in state.models:
            raise ServiceError(404, "model_not_found",
                               f"unknown model {req.model_tag!r}")
        rec = state.find_record(req.tile_id)
        pre = load_image(rec.pre_path, rec.gsd_m_per_px, rec.tile_id, rec.event)

        mask = _resolve_mask(state, req, rec, pre)
        if mask.values.shape != (pre.height, pre.width):
            from floodgen.data.masks import upsample_mask
            mask = upsample_mask(mask, (pre.height, pre.width))
        if mask.values.sum() == 0:
            raise ServiceError(400, "empty_mask",
                               "requested mask has zero coverage")

        with state._lock:
            generated = state.models[req.model_tag](pre, mask)
        seg = state.segmenter(generated)
        return GenerateResponse(
            image=base64.b64encode(_png_bytes(generated.pixels)).decode(),
            requested_mask_coverage=mask.coverage(),
            consistency_iou=iou(mask, seg),
            latency_ms=(time.perf_counter() - t0) * 1000.0,
        )

    return app


def _resolve_mask(state: ServiceState, req: GenerateRequest, rec,
                  pre: ImageTile) -> BinaryMask:
    from floodgen.types import ValidationError

    if req.mask_source == "polygon":
        if not isinstance(req.payload, list):
            raise ServiceError(400, "invalid_polygon",
                               "polygon payload must be a vertex list")
        try:
            return rasterize_polygon([tuple(v) for v in req.payload],
                                     pre.height, pre.width, pre.gsd_m_per_px)
        except ValidationError as e:
            raise ServiceError(400, "invalid_polygon", str(e))
    if req.mask_source == "category":
        if not isinstance(req.payload, int) or not 1 <= req.payload <= 5:
            raise ServiceError(400, "invalid_category",
                               "category must be an integer 1-5")
        per_tile = state.category_masks.get(req.tile_id, {})
        if req.payload not in per_tile:
            raise ServiceError(404, "category_not_registered",
                               f"no category-{req.payload} raster for tile "
                               f"{req.tile_id!r}")
        return per_tile[req.payload]
    # raster_ref
    if not isinstance(req.payload, str):
        raise ServiceError(400, "invalid_raster_ref",
                           "raster_ref payload must be a raster id string")
    if req.payload in state.raster_masks:
        return state.raster_masks[req.payload]
    if req.payload == "manifest":
        return load_mask(rec.mask_path, rec.gsd_m_per_px)
    raise ServiceError(404, "raster_not_found",
                       f"unknown raster id {req.payload!r}")
