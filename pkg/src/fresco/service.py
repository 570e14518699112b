"""Read-only HTTP API over one loaded archive.

All responses are JSON, mirroring the archive notation; errors come back as
400/404 with a machine-readable reason. The archive is immutable, so any
number of concurrent readers see identical results.
"""

from __future__ import annotations

import os
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .archive import Archive
from .config import EngineConfig
from .errors import FrescoError, UnknownImage, UnknownMeasure
from .scoring import WeightConfig
from .traits import traits_to_dict


class RankRequest(BaseModel):
    reference: str
    weights: dict[str, Any] | None = None
    measure_id: str | None = None
    k: int = 8
    window: str = "top"
    include_unpaired: bool = True


def _weights_from_request(raw: dict[str, Any] | None, fallback: WeightConfig) -> WeightConfig:
    if raw is None:
        return fallback
    return WeightConfig(
        alpha=float(raw.get("alpha", 1.0)),
        beta=float(raw.get("beta", 1.0)),
        gamma=float(raw.get("gamma", 1.0)),
        node_weights={str(k): float(v) for k, v in raw.get("node_weights", {}).items()},
    )


def _headline(archive: Archive, image_id: str) -> dict:
    traits = archive.get(image_id).traits.image
    return {
        "medium": traits["0.1"],
        "brightness": traits["1.2.2"],
        "people": traits["2.2.1.1"],
        "group": traits["2.2.1.1-group"],
        "framing": traits["3.1.3-class"],
    }


def create_app(archive: Archive, config: EngineConfig | None = None, ui_dir: str | None = None) -> FastAPI:
    config = config or EngineConfig()
    app = FastAPI(title="fresco", docs_url=None, redoc_url=None)

    @app.exception_handler(FrescoError)
    async def _fresco_error(_: Request, exc: FrescoError):
        status = 404 if isinstance(exc, (UnknownImage, UnknownMeasure)) else 400
        return JSONResponse(
            status_code=status,
            content={"reason": type(exc).__name__, "message": str(exc)},
        )

    @app.exception_handler(ValueError)
    async def _value_error(_: Request, exc: ValueError):
        return JSONResponse(
            status_code=400,
            content={"reason": "ValueError", "message": str(exc)},
        )

    @app.get("/images")
    def images(offset: int = 0, limit: int = 50):
        ids = archive.ids()
        page = ids[max(offset, 0):max(offset, 0) + max(limit, 0)]
        return {
            "total": len(ids),
            "offset": offset,
            "images": [
                {
                    "image_id": image_id,
                    "image_ref": archive.record(image_id).image_ref,
                    "traits": _headline(archive, image_id),
                }
                for image_id in page
            ],
        }

    @app.get("/images/{image_id}/traits")
    def image_traits(image_id: str):
        prepared = archive.get(image_id)
        return {"image_id": image_id, "traits": traits_to_dict(prepared.traits)}

    @app.get("/score")
    def score(a: str, b: str, alpha: float = 1.0, beta: float = 1.0, gamma: float = 1.0):
        weights = WeightConfig(alpha, beta, gamma)
        return archive.score(a, b, weights).to_json()

    @app.post("/rank")
    def rank(req: RankRequest):
        if req.measure_id is not None:
            ranked = archive.rank_by_measure(
                req.reference, req.measure_id, req.k, req.include_unpaired, req.window
            )
        else:
            weights = _weights_from_request(req.weights, config.weights)
            ranked = archive.rank(req.reference, weights, req.k, req.window)
        return ranked.to_json()

    @app.get("/measures")
    def measures():
        return archive.scorer.registry.to_json()

    @app.get("/distributions/{measure_id}")
    def distributions(measure_id: str, bins: int = 20):
        return archive.distribution(measure_id, bins).to_json()

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve(archive: Archive, config: EngineConfig, ui_dir: str | None = None) -> None:
    import uvicorn

    host, _, port = config.bind.partition(":")
    app = create_app(archive, config, ui_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8765), log_level="warning")
