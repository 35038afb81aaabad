"""FastAPI service wrapping the core package."""

from .models import (  # noqa: F401
    CertifyRequest,
    CertifyResponse,
    CheckRequest,
    CheckResponse,
    ComposeRequest,
    ComposeResponse,
    ErrorInfo,
    MorphismCheckRequest,
    MorphismCheckResponse,
    ReachRequest,
    ReachResponse,
    RefineComposeRequest,
    RefineComposeResponse,
    ScenarioDoc,
    UnfoldRequest,
    UnfoldResponse,
    ValidateRequest,
    ValidateResponse,
)


def create_app():
    from .app import create_app as _create

    return _create()
