"""Soundness-by-construction for composed refined components.

Given refined components with label-respecting abstraction morphisms onto
small interface nets, soundness of the composed refined system follows from
checking only: soundness of each component, validity of both morphisms and
their local unfolding conditions, and soundness of the composed interface.
The certificate records those premises; the expensive composed state space
is never explored unless an explicit audit is requested.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from .compose import Composition, as_compose
from .errors import InvalidMorphism, NonCommutingDiagram, WfnetError
from .labeled import AsyncLabel, LgwfNet, validate_lgwf
from .morphisms import (
    LocalConditionReport,
    Morphism,
    MorphismReport,
    check_alpha_hat,
    check_local_condition,
)
from .petri import DEFAULT_CAP, DEFAULT_LIMIT, Marking, PetriNet
from .workflow import SoundnessReport, check_gwf, check_soundness


@dataclass
class RefinementScenario:
    """Two refined components, their abstractions, and the morphisms onto them."""

    r1: LgwfNet
    r2: LgwfNet
    n1: LgwfNet
    n2: LgwfNet
    phi1: Morphism
    phi2: Morphism


@dataclass
class IntermediateRefinement:
    """One component refined inside the composed interface."""

    side: str
    composition: Composition
    interface: Composition
    morphism: Morphism
    report: MorphismReport
    arc_reflection_failures: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.report.valid and not self.arc_reflection_failures


def intermediate_refinement(
    s: RefinementScenario,
    side: str,
    interface: Composition | None = None,
) -> IntermediateRefinement:
    """Compose one refined component with the other abstraction.

    Builds the induced morphism onto the composed interface: the component
    morphism on refined nodes, the identity on the other component, channel
    places onto channel places, and ``(t1,t2)`` pairs mapped factor-wise.
    The result is validated, never assumed.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if interface is None:
        interface = as_compose(s.n1, s.n2)
    if side == "left":
        comp = as_compose(s.r1, s.n2)
        phi, refined_kind = s.phi1, "c1"
    else:
        comp = as_compose(s.n1, s.r2)
        phi, refined_kind = s.phi2, "c2"
    if comp.prefixed or interface.prefixed:
        raise InvalidMorphism("scenario nets must be pairwise node-disjoint")

    phi_map = dict(phi.mapping)
    mapping: dict[str, str] = {}
    for node, prov in comp.provenance.items():
        if prov.kind == "channel":
            mapping[node] = prov.origin[0]
        elif prov.kind == "sync":
            t1, t2 = prov.origin
            if side == "left":
                mapping[node] = f"({phi_map[t1]},{t2})"
            else:
                mapping[node] = f"({t1},{phi_map[t2]})"
        elif prov.kind == refined_kind:
            mapping[node] = phi_map[prov.origin[0]]
        else:
            mapping[node] = prov.origin[0]
    unknown = sorted(set(mapping.values()) - interface.result.net.nodes())
    if unknown:
        raise InvalidMorphism(
            f"induced map leaves the interface (missing nodes: {', '.join(unknown)})"
        )
    induced = Morphism(source=comp.result, target=interface.result, mapping=mapping)
    report = check_alpha_hat(induced)

    arc_failures: list[str] = []
    inet = interface.result.net
    inverse: dict[str, set[str]] = {}
    for x, y in mapping.items():
        inverse.setdefault(y, set()).add(x)
    for p in sorted(interface.result.k):
        for t in inet.postset(p):
            for tr in sorted(inverse.get(t, ())):
                for pr in sorted(inverse.get(p, ())):
                    if (pr, tr) not in comp.result.net.flow:
                        arc_failures.append(f"missing arc ({pr},{tr})")
        for t in inet.preset(p):
            for tr in sorted(inverse.get(t, ())):
                for pr in sorted(inverse.get(p, ())):
                    if (tr, pr) not in comp.result.net.flow:
                        arc_failures.append(f"missing arc ({tr},{pr})")
    return IntermediateRefinement(
        side=side,
        composition=comp,
        interface=interface,
        morphism=induced,
        report=report,
        arc_reflection_failures=arc_failures,
    )


@dataclass
class Premise:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class Certificate:
    """Premise checklist plus the resulting certification verdict.

    ``certified`` means: both refined components may replace their
    abstractions inside the verified interface, and the composed refined
    system is sound without exploring its state space.
    """

    premises: list[Premise]
    component_sound: dict[str, SoundnessReport]
    interface_sound: SoundnessReport | None
    morphism_reports: dict[str, MorphismReport]
    local_condition_reports: dict[str, LocalConditionReport]
    audit: SoundnessReport | None = None

    @property
    def certified(self) -> bool:
        return all(p.ok for p in self.premises)

    def failed_premises(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.premises if not p.ok)

    def conclusion(self) -> str:
        if self.certified:
            return (
                "certified: components are sound, both abstraction morphisms are "
                "valid with passing local conditions, and the composed interface "
                "is sound; therefore the composition of the refined components "
                "is sound by the intermediate-refinement argument applied to "
                "each side."
            )
        names = ", ".join(self.failed_premises())
        return f"not certified: failed premises: {names}"

    def to_dict(self) -> dict:
        return {
            "certified": self.certified,
            "conclusion": self.conclusion(),
            "premises": [
                {"name": p.name, "ok": p.ok, "detail": p.detail} for p in self.premises
            ],
            "audit": None if self.audit is None else self.audit.verdict,
        }

    def to_text(self) -> str:
        lines = []
        for p in self.premises:
            mark = "ok" if p.ok else "FAILED"
            suffix = f" ({p.detail})" if p.detail else ""
            lines.append(f"premise {p.name}: {mark}{suffix}")
        lines.append(self.conclusion())
        if self.audit is not None:
            lines.append(f"audit: composed refined system is {self.audit.verdict}")
        return "\n".join(lines)


def certify(
    s: RefinementScenario,
    cap: int = DEFAULT_CAP,
    limit: int = DEFAULT_LIMIT,
    audit: bool = False,
) -> Certificate:
    """Check every premise of the refinement argument and certify or refuse.

    All premises are evaluated (no short-circuiting) so a refusal names
    everything that is wrong.  With ``audit`` the composed refined system is
    additionally checked explicitly, which the certificate itself never
    needs.
    """
    premises: list[Premise] = []
    component_sound: dict[str, SoundnessReport] = {}
    morphism_reports: dict[str, MorphismReport] = {}
    local_reports: dict[str, LocalConditionReport] = {}
    interface_report: SoundnessReport | None = None

    for name, net in (("r1", s.r1), ("r2", s.r2), ("n1", s.n1), ("n2", s.n2)):
        try:
            rep = check_soundness(net.gwf, cap=cap, limit=limit)
        except WfnetError as exc:
            premises.append(Premise(f"{name}-sound", False, str(exc)))
            continue
        component_sound[name] = rep
        premises.append(
            Premise(
                f"{name}-sound",
                rep.sound,
                "" if rep.sound else f"clause {rep.violated_clause}",
            )
        )

    for name, phi in (("phi1", s.phi1), ("phi2", s.phi2)):
        try:
            rep = check_alpha_hat(phi)
        except WfnetError as exc:
            premises.append(Premise(f"{name}-morphism", False, str(exc)))
            continue
        morphism_reports[name] = rep
        premises.append(
            Premise(
                f"{name}-morphism",
                rep.valid,
                "" if rep.valid else f"clauses {sorted(rep.clauses())}",
            )
        )
        if rep.valid:
            local = check_local_condition(phi, rep)
            local_reports[name] = local
            detail = ""
            if not local.passed:
                bad = {
                    p: e.uncovered_transitions
                    for p, e in local.entries.items()
                    if not e.passed
                }
                detail = f"failing places {bad}"
            premises.append(Premise(f"{name}-local-condition", local.passed, detail))
        else:
            premises.append(
                Premise(f"{name}-local-condition", False, "morphism invalid")
            )

    try:
        interface = as_compose(s.n1, s.n2)
        interface_report = check_soundness(interface.result.gwf, cap=cap, limit=limit)
        premises.append(
            Premise(
                "interface-sound",
                interface_report.sound,
                ""
                if interface_report.sound
                else f"clause {interface_report.violated_clause}",
            )
        )
    except WfnetError as exc:
        premises.append(Premise("interface-sound", False, str(exc)))

    audit_report: SoundnessReport | None = None
    if audit:
        composed = as_compose(s.r1, s.r2)
        audit_report = check_soundness(composed.result.gwf, cap=cap, limit=limit)

    return Certificate(
        premises=premises,
        component_sound=component_sound,
        interface_sound=interface_report,
        morphism_reports=morphism_reports,
        local_condition_reports=local_reports,
        audit=audit_report,
    )


@dataclass
class ComposedRefinements:
    net: LgwfNet
    to_left: Morphism
    to_right: Morphism
    interface: Composition


def compose_refinements(
    left: IntermediateRefinement, right: IntermediateRefinement
) -> ComposedRefinements:
    """Substitute both refinements into the common interface at once.

    Every interface place and transition is replaced by its inverse images;
    inverse images of one synchronized transition are synchronized pairwise.
    The projections of the result onto the two intermediate refinements are
    built alongside, and the square over the interface is checked to commute
    pointwise.
    """
    inet = left.interface.result
    if not inet.net.same_structure(right.interface.result.net):
        raise InvalidMorphism("intermediate refinements target different interfaces")
    lcomp, rcomp = left.composition, right.composition
    lmap, rmap = dict(left.morphism.mapping), dict(right.morphism.mapping)
    linv: dict[str, list[str]] = {}
    for x, y in lmap.items():
        linv.setdefault(y, []).append(x)
    rinv: dict[str, list[str]] = {}
    for x, y in rmap.items():
        rinv.setdefault(y, []).append(x)

    places: set[str] = set()
    transitions: set[str] = set()
    to_left: dict[str, str] = {}
    to_right: dict[str, str] = {}
    h: dict[str, AsyncLabel] = {}
    ell: dict[str, str] = {}
    k: dict[str, str] = {}
    sync_members: dict[str, tuple[str, str, str]] = {}  # node -> (t1r, t2r, interface sync)

    for node, prov in sorted(left.interface.provenance.items()):
        if prov.kind == "channel":
            places.add(node)
            k[node] = prov.origin[0]
            to_left[node] = node
            to_right[node] = node
        elif prov.kind == "c1":
            for x in sorted(linv.get(node, ())):
                _claim(x, lcomp, places, transitions)
                to_left[x] = x
                to_right[x] = node
                _carry_labels(x, lcomp.result, h, ell)
        elif prov.kind == "c2":
            for x in sorted(rinv.get(node, ())):
                _claim(x, rcomp, places, transitions)
                to_left[x] = node
                to_right[x] = x
                _carry_labels(x, rcomp.result, h, ell)
        elif prov.kind == "sync":
            for lx in sorted(linv.get(node, ())):
                lt1, _ = lcomp.provenance[lx].origin
                for rx in sorted(rinv.get(node, ())):
                    _, rt2 = rcomp.provenance[rx].origin
                    name = f"({lt1},{rt2})"
                    transitions.add(name)
                    sync_members[name] = (lx, rx, node)
                    to_left[name] = lx
                    to_right[name] = rx
                    ell[name] = inet.ell[node]

    flow: set[tuple[str, str]] = set()
    # arcs among kept left nodes (component-1 places/transitions and channels)
    kept_left = {x for x in lcomp.result.net.nodes() if x in places or x in transitions}
    for src, dst in lcomp.result.net.flow:
        if src in kept_left and dst in kept_left:
            flow.add((src, dst))
    kept_right = {x for x in rcomp.result.net.nodes() if x in places or x in transitions}
    for src, dst in rcomp.result.net.flow:
        if src in kept_right and dst in kept_right:
            flow.add((src, dst))
    for name, (lx, rx, _) in sync_members.items():
        for p in lcomp.result.net.preset(lx):
            if p in kept_left:
                flow.add((p, name))
        for p in lcomp.result.net.postset(lx):
            if p in kept_left:
                flow.add((name, p))
        for p in rcomp.result.net.preset(rx):
            if p in kept_right:
                flow.add((p, name))
        for p in rcomp.result.net.postset(rx):
            if p in kept_right:
                flow.add((name, p))

    initial = Marking(
        {p: lcomp.result.initial.count(p) for p in lcomp.result.initial.places() if p in places}
        | {p: rcomp.result.initial.count(p) for p in rcomp.result.initial.places() if p in places}
    )
    final = Marking(
        {p: lcomp.result.final.count(p) for p in lcomp.result.final.places() if p in places}
        | {p: rcomp.result.final.count(p) for p in rcomp.result.final.places() if p in places}
    )
    net = PetriNet(places, transitions, flow, initial)
    result = validate_lgwf(check_gwf(net, final), h, ell, k)

    psi_left = Morphism(source=result, target=lcomp.result, mapping=to_left)
    psi_right = Morphism(source=result, target=rcomp.result, mapping=to_right)
    for x in sorted(net.nodes()):
        via_left = lmap[to_left[x]]
        via_right = rmap[to_right[x]]
        if via_left != via_right:
            raise NonCommutingDiagram(x)
    return ComposedRefinements(
        net=result, to_left=psi_left, to_right=psi_right, interface=left.interface
    )


def _claim(x: str, comp: Composition, places: set[str], transitions: set[str]) -> None:
    if x in comp.result.net.places:
        places.add(x)
    else:
        transitions.add(x)


def _carry_labels(
    x: str, net: LgwfNet, h: dict[str, AsyncLabel], ell: dict[str, str]
) -> None:
    if x in net.h:
        h[x] = net.h[x]
    if x in net.ell:
        ell[x] = net.ell[x]
