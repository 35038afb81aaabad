"""Service operations: every verb of the API and the CLI lands here.

Handlers map request models to response models and raise
:class:`ServiceFailure` for client errors (bad documents, unusable inputs),
which the HTTP layer turns into a 400 and the CLI into exit code 2.
"""

from __future__ import annotations

from ..compose import as_compose, canonical_sync_form, p_simplify
from ..errors import (
    ComponentsNotDisjoint,
    IncompleteExploration,
    LabelViolation,
    ParseError,
    StructuralViolation,
    WfnetError,
)
from ..isomorphism import isomorphic
from ..morphisms import check_alpha, check_alpha_hat, check_local_condition, check_well_marked
from ..petri import explore, is_safe
from ..refine import (
    RefinementScenario,
    certify,
    compose_refinements,
    intermediate_refinement,
)
from ..textio import (
    NetDocument,
    parse_morphism,
    parse_net,
    render_dot,
    render_witness,
    serialize_net,
)
from ..unfolding import unfold
from ..workflow import Witness, check_soundness, find_sequential_cover, is_smd
from .models import (
    CertifyRequest,
    CertifyResponse,
    CheckRequest,
    CheckResponse,
    ComposeRequest,
    ComposeResponse,
    ErrorInfo,
    LocalConditionInfo,
    MorphismCheckRequest,
    MorphismCheckResponse,
    PremiseInfo,
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


class ServiceFailure(Exception):
    """Client-side failure; carries structured error info."""

    def __init__(self, info: ErrorInfo):
        super().__init__(info.message)
        self.info = info


def _error_info(exc: Exception) -> ErrorInfo:
    if isinstance(exc, ParseError):
        return ErrorInfo(kind="parse", message=str(exc), line=exc.line)
    if isinstance(exc, StructuralViolation):
        return ErrorInfo(
            kind="structure",
            message=str(exc),
            clauses=sorted({c for c, _ in exc.violations}),
        )
    if isinstance(exc, LabelViolation):
        return ErrorInfo(
            kind="labeling",
            message=str(exc),
            clauses=sorted({c for c, _ in exc.violations}),
        )
    if isinstance(exc, ComponentsNotDisjoint):
        return ErrorInfo(kind="disjointness", message=str(exc))
    return ErrorInfo(kind=type(exc).__name__, message=str(exc))


def _load_net(text: str) -> NetDocument:
    try:
        return parse_net(text)
    except (ParseError, StructuralViolation, LabelViolation, WfnetError) as exc:
        raise ServiceFailure(_error_info(exc)) from exc


def handle_validate(req: ValidateRequest) -> ValidateResponse:
    try:
        doc = parse_net(req.net)
    except ParseError as exc:
        raise ServiceFailure(_error_info(exc)) from exc
    except (StructuralViolation, LabelViolation, WfnetError) as exc:
        return ValidateResponse(ok=False, error=_error_info(exc))
    return ValidateResponse(ok=True, name=doc.name)


def handle_check(req: CheckRequest) -> CheckResponse:
    doc = _load_net(req.net)
    net = doc.net.net
    if req.property == "smd":
        cover = find_sequential_cover(net)
        if cover is None:
            return CheckResponse(
                verdict="fail", detail="no sequential-component cover exists"
            )
        return CheckResponse(
            verdict="pass", detail=f"covered by {len(cover)} sequential components"
        )
    rg = explore(net, cap=req.cap, limit=req.limit)
    if req.property == "safe":
        if rg.unbounded_witness is not None:
            small, big = rg.unbounded_witness
            w = Witness(fire=tuple(rg.path_to(big)), marking=big, cover=(small, big))
            return CheckResponse(
                verdict="fail", detail="unbounded place", witness=render_witness(w)
            )
        if rg.truncated:
            return CheckResponse(verdict="inconclusive", detail="exploration truncated")
        if is_safe(rg):
            return CheckResponse(verdict="pass", detail=f"{len(rg.vertices)} markings")
        offender = next(m for m in rg.vertices if not m.is_set())
        w = Witness(fire=tuple(rg.path_to(offender)), marking=offender)
        return CheckResponse(
            verdict="fail", detail="marking with two tokens in one place",
            witness=render_witness(w),
        )
    try:
        report = check_soundness(doc.net.gwf, cap=req.cap, limit=req.limit, rg=rg)
    except IncompleteExploration as exc:
        return CheckResponse(verdict="inconclusive", detail=str(exc))
    if report.sound:
        return CheckResponse(verdict="pass", detail="sound")
    witness = render_witness(report.witness) if report.witness else None
    return CheckResponse(
        verdict="fail",
        detail=f"unsound, clause {report.violated_clause}",
        witness=witness,
    )


def handle_compose(req: ComposeRequest) -> ComposeResponse:
    d1, d2 = _load_net(req.net1), _load_net(req.net2)
    try:
        comp = as_compose(d1.net, d2.net, auto_prefix=req.auto_prefix)
        if req.p_simplify:
            comp = p_simplify(comp)
    except WfnetError as exc:
        raise ServiceFailure(_error_info(exc)) from exc
    name = req.name or f"{d1.name}*{d2.name}"
    doc = NetDocument(name=name, net=comp.result)
    syncs = sorted(
        node for node, prov in comp.provenance.items() if prov.kind == "sync"
    )
    return ComposeResponse(
        net=serialize_net(doc),
        name=name,
        smd=is_smd(comp.result.net),
        channel_places=list(comp.channel_places()),
        sync_transitions=syncs,
    )


def handle_check_morphism(req: MorphismCheckRequest) -> MorphismCheckResponse:
    src, tgt = _load_net(req.source), _load_net(req.target)
    try:
        morphism = parse_morphism(req.morphism, src, tgt)
    except ParseError as exc:
        raise ServiceFailure(_error_info(exc)) from exc
    report = check_alpha_hat(morphism) if req.alpha_hat else check_alpha(morphism)
    failures = [f"{clause}: {', '.join(nodes)}" for clause, nodes in report.failures]
    resp = MorphismCheckResponse(valid=report.valid, failures=failures)
    if report.valid and req.local:
        local = check_local_condition(morphism, report)
        resp.local_passed = local.passed
        resp.local = [
            LocalConditionInfo(
                place=p,
                passed=e.passed,
                uncovered=list(e.uncovered_transitions),
                clauses=sorted(e.report.clauses()),
            )
            for p, e in sorted(local.entries.items())
        ]
    if report.valid and req.well_marked:
        resp.well_marked = check_well_marked(morphism, report)
    return resp


def handle_unfold(req: UnfoldRequest) -> UnfoldResponse:
    doc = _load_net(req.net)
    try:
        bp = unfold(doc.net.net, depth=req.depth)
    except WfnetError as exc:
        raise ServiceFailure(_error_info(exc)) from exc
    lines = []
    for b in sorted(bp.occ.conditions):
        lines.append(f"condition {b} -> {bp.fold[b]}")
    for e in sorted(bp.occ.events):
        lines.append(f"event {e} -> {bp.fold[e]}")
    for s, d in sorted(bp.occ.flow):
        lines.append(f"arc {s} {d}")
    return UnfoldResponse(
        partial=bp.partial,
        conditions=len(bp.occ.conditions),
        events=len(bp.occ.events),
        listing="\n".join(lines) + "\n",
    )


def handle_reach(req: ReachRequest) -> ReachResponse:
    doc = _load_net(req.net)
    rg = explore(doc.net.net, cap=req.cap, limit=req.limit)
    unbounded = None
    if rg.unbounded_witness is not None:
        small, big = rg.unbounded_witness
        w = Witness(fire=tuple(rg.path_to(big)), marking=big, cover=(small, big))
        unbounded = render_witness(w)
    return ReachResponse(
        vertices=len(rg.vertices),
        edges=len(rg.edges),
        deadlocks=len(rg.deadlocks()),
        truncated=rg.truncated,
        unbounded=unbounded,
        dot=render_dot(rg) if req.dot else None,
    )


def _load_scenario(doc: ScenarioDoc) -> RefinementScenario:
    r1, r2 = _load_net(doc.r1), _load_net(doc.r2)
    n1, n2 = _load_net(doc.n1), _load_net(doc.n2)
    try:
        phi1 = parse_morphism(doc.phi1, r1, n1)
        phi2 = parse_morphism(doc.phi2, r2, n2)
    except ParseError as exc:
        raise ServiceFailure(_error_info(exc)) from exc
    return RefinementScenario(
        r1=r1.net, r2=r2.net, n1=n1.net, n2=n2.net, phi1=phi1, phi2=phi2
    )


def handle_certify(req: CertifyRequest) -> CertifyResponse:
    scenario = _load_scenario(req.scenario)
    cert = certify(scenario, cap=req.cap, limit=req.limit, audit=req.audit)
    return CertifyResponse(
        certified=cert.certified,
        premises=[PremiseInfo(name=p.name, ok=p.ok, detail=p.detail) for p in cert.premises],
        conclusion=cert.conclusion(),
        audit=None if cert.audit is None else cert.audit.verdict,
        text=cert.to_text(),
    )


def handle_refine_compose(req: RefineComposeRequest) -> RefineComposeResponse:
    left_scenario = _load_scenario(req.left)
    right_scenario = _load_scenario(req.right)
    try:
        left = intermediate_refinement(left_scenario, "left")
        right = intermediate_refinement(right_scenario, "right")
        composed = compose_refinements(left, right)
    except WfnetError as exc:
        raise ServiceFailure(_error_info(exc)) from exc
    direct = as_compose(left_scenario.r1, right_scenario.r2)
    flat, _ = canonical_sync_form(composed.net)
    flat_direct, _ = canonical_sync_form(direct.result)
    doc = NetDocument(name="composed", net=composed.net)
    return RefineComposeResponse(
        net=serialize_net(doc),
        name="composed",
        commutes=True,
        matches_direct=isomorphic(flat, flat_direct),
    )
