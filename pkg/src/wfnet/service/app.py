"""HTTP face of the verification service."""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from . import handlers
from .models import (
    CertifyRequest,
    CertifyResponse,
    CheckRequest,
    CheckResponse,
    ComposeRequest,
    ComposeResponse,
    MorphismCheckRequest,
    MorphismCheckResponse,
    ReachRequest,
    ReachResponse,
    RefineComposeRequest,
    RefineComposeResponse,
    UnfoldRequest,
    UnfoldResponse,
    ValidateRequest,
    ValidateResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(title="wfnet", description="workflow-net composition verifier")

    @app.exception_handler(handlers.ServiceFailure)
    async def service_failure(_, exc: handlers.ServiceFailure):
        return JSONResponse(status_code=400, content={"error": exc.info.model_dump()})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/validate", response_model=ValidateResponse)
    def validate(req: ValidateRequest) -> ValidateResponse:
        return handlers.handle_validate(req)

    @app.post("/check", response_model=CheckResponse)
    def check(req: CheckRequest) -> CheckResponse:
        return handlers.handle_check(req)

    @app.post("/compose", response_model=ComposeResponse)
    def compose(req: ComposeRequest) -> ComposeResponse:
        return handlers.handle_compose(req)

    @app.post("/morphism/check", response_model=MorphismCheckResponse)
    def check_morphism(req: MorphismCheckRequest) -> MorphismCheckResponse:
        return handlers.handle_check_morphism(req)

    @app.post("/unfold", response_model=UnfoldResponse)
    def unfold(req: UnfoldRequest) -> UnfoldResponse:
        return handlers.handle_unfold(req)

    @app.post("/reach", response_model=ReachResponse)
    def reach(req: ReachRequest) -> ReachResponse:
        return handlers.handle_reach(req)

    @app.post("/refine/certify", response_model=CertifyResponse)
    def refine_certify(req: CertifyRequest) -> CertifyResponse:
        return handlers.handle_certify(req)

    @app.post("/refine/compose", response_model=RefineComposeResponse)
    def refine_compose(req: RefineComposeRequest) -> RefineComposeResponse:
        return handlers.handle_refine_compose(req)

    return app
