"""HTTP surface: /v1/embed, /v1/score, /v1/info, /healthz.

Status codes: 400 malformed request, 413 batch larger than the configured
limit, 503 until both models are loaded. Responses are order-preserving with
respect to the request arrays.
"""

from __future__ import annotations

from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .backends import ConditionalScorer, SentenceEmbedder
from .config import ServerConfig


class EmbedRequest(BaseModel):
    texts: list[str] = Field(min_length=1)


class ScorePair(BaseModel):
    context: str
    target: str


class ScoreRequest(BaseModel):
    pairs: list[ScorePair] = Field(min_length=1)


def create_app(config: ServerConfig) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.embedder = SentenceEmbedder(
            config.embed_model,
            device=config.device,
            max_tokens=config.embed_max_tokens,
            infer_batch_size=config.infer_batch_size,
        )
        app.state.scorer = ConditionalScorer(
            config.score_model,
            device=config.device,
            variant=config.score_variant,
            max_tokens=config.score_max_tokens,
            infer_batch_size=config.infer_batch_size,
        )
        yield

    app = FastAPI(title="ldfs model server", lifespan=lifespan)

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request", "detail": exc.errors()})

    def backends():
        embedder = getattr(app.state, "embedder", None)
        scorer = getattr(app.state, "scorer", None)
        return embedder, scorer

    def not_ready():
        return JSONResponse(status_code=503, content={"error": "models not loaded"})

    def too_large(n: int):
        return JSONResponse(
            status_code=413,
            content={"error": f"batch of {n} exceeds max_batch_size {config.max_batch_size}"},
        )

    @app.get("/healthz")
    async def healthz():
        embedder, scorer = backends()
        if embedder is None or scorer is None:
            return not_ready()
        return {"status": "ok"}

    @app.get("/v1/info")
    async def info():
        embedder, scorer = backends()
        if embedder is None or scorer is None:
            return not_ready()
        return {
            "embed": {
                "backend_id": embedder.backend_id,
                "dim": embedder.dim,
                "token_limit": embedder.max_tokens,
            },
            "score": {
                "backend_id": scorer.backend_id,
                "token_limit": scorer.max_tokens,
                "variant": scorer.variant,
            },
            "max_batch_size": config.max_batch_size,
        }

    @app.post("/v1/embed")
    def embed(request: EmbedRequest):
        embedder, _ = backends()
        if embedder is None:
            return not_ready()
        if len(request.texts) > config.max_batch_size:
            return too_large(len(request.texts))
        vectors, truncated = embedder.encode(request.texts)
        return {"vectors": vectors, "dim": embedder.dim, "truncated": truncated}

    @app.post("/v1/score")
    def score(request: ScoreRequest):
        _, scorer = backends()
        if scorer is None:
            return not_ready()
        if len(request.pairs) > config.max_batch_size:
            return too_large(len(request.pairs))
        pairs = [(p.target, p.context) for p in request.pairs]
        scores, truncated = scorer.score(pairs)
        return {"scores": scores, "variant": scorer.variant, "truncated": truncated}

    return app
