"""Request and response models of the verification service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..petri import DEFAULT_CAP, DEFAULT_LIMIT


class ErrorInfo(BaseModel):
    kind: str
    message: str
    line: Optional[int] = None
    clauses: list[str] = Field(default_factory=list)


class ValidateRequest(BaseModel):
    net: str


class ValidateResponse(BaseModel):
    ok: bool
    name: Optional[str] = None
    error: Optional[ErrorInfo] = None


class CheckRequest(BaseModel):
    net: str
    property: Literal["sound", "smd", "safe"]
    cap: int = DEFAULT_CAP
    limit: int = DEFAULT_LIMIT


class CheckResponse(BaseModel):
    verdict: Literal["pass", "fail", "inconclusive"]
    detail: str = ""
    witness: Optional[str] = None


class ComposeRequest(BaseModel):
    net1: str
    net2: str
    name: Optional[str] = None
    p_simplify: bool = False
    auto_prefix: bool = False


class ComposeResponse(BaseModel):
    net: str
    name: str
    smd: bool
    channel_places: list[str]
    sync_transitions: list[str]


class MorphismCheckRequest(BaseModel):
    morphism: str
    source: str
    target: str
    alpha_hat: bool = False
    local: bool = False
    well_marked: bool = False


class LocalConditionInfo(BaseModel):
    place: str
    passed: bool
    uncovered: list[str] = Field(default_factory=list)
    clauses: list[str] = Field(default_factory=list)


class MorphismCheckResponse(BaseModel):
    valid: bool
    failures: list[str] = Field(default_factory=list)
    local_passed: Optional[bool] = None
    local: list[LocalConditionInfo] = Field(default_factory=list)
    well_marked: Optional[bool] = None


class UnfoldRequest(BaseModel):
    net: str
    depth: int = 10_000


class UnfoldResponse(BaseModel):
    partial: bool
    conditions: int
    events: int
    listing: str


class ReachRequest(BaseModel):
    net: str
    cap: int = DEFAULT_CAP
    limit: int = DEFAULT_LIMIT
    dot: bool = False


class ReachResponse(BaseModel):
    vertices: int
    edges: int
    deadlocks: int
    truncated: bool
    unbounded: Optional[str] = None
    dot: Optional[str] = None


class ScenarioDoc(BaseModel):
    r1: str
    r2: str
    n1: str
    n2: str
    phi1: str
    phi2: str


class CertifyRequest(BaseModel):
    scenario: ScenarioDoc
    audit: bool = False
    cap: int = DEFAULT_CAP
    limit: int = DEFAULT_LIMIT


class PremiseInfo(BaseModel):
    name: str
    ok: bool
    detail: str = ""


class CertifyResponse(BaseModel):
    certified: bool
    premises: list[PremiseInfo]
    conclusion: str
    audit: Optional[str] = None
    text: str


class RefineComposeRequest(BaseModel):
    left: ScenarioDoc
    right: ScenarioDoc


class RefineComposeResponse(BaseModel):
    net: str
    name: str
    commutes: bool
    matches_direct: bool
