"""Abstraction/refinement morphisms between safe SMD nets.

A morphism maps a refined net onto an abstract one: transitions map to
transitions with corresponding neighborhoods or collapse into a place
together with their whole neighborhood; the inverse image of an abstract
place is an acyclic subnet whose boundary mimics the abstract place's
choices.  Validation is purely structural; the behavioral supplement is the
per-place local unfolding condition, which unfolds the refining subnet and
requires the folded-and-mapped result to validate again.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import (
    IncompleteExploration,
    InvalidMorphism,
    NotProperlyRefined,
    SourceNotSound,
)
from .labeled import LgwfNet
from .petri import DEFAULT_CAP, DEFAULT_LIMIT, Marking, PetriNet, explore, is_safe
from .unfolding import BranchingProcess, compose_maps, unfold
from .workflow import (
    GwfNet,
    SequentialComponent,
    check_soundness,
    find_component_containing,
    find_sequential_cover,
)

ARTIFICIAL_IN = "⊥in:"
ARTIFICIAL_OUT = "⊥out:"


def _net_of(x) -> PetriNet:
    if isinstance(x, PetriNet):
        return x
    if isinstance(x, GwfNet):
        return x.net
    if isinstance(x, LgwfNet):
        return x.net
    raise TypeError(f"not a net: {x!r}")


def _final_of(x) -> Marking | None:
    if isinstance(x, GwfNet):
        return x.final
    if isinstance(x, LgwfNet):
        return x.final
    return None


@dataclass(frozen=True)
class Morphism:
    """A total node map from a refined net onto an abstract net."""

    source: object
    target: object
    mapping: Mapping[str, str]

    def source_net(self) -> PetriNet:
        return _net_of(self.source)

    def target_net(self) -> PetriNet:
        return _net_of(self.target)

    def preimage(self, node: str) -> frozenset[str]:
        return frozenset(x for x, y in self.mapping.items() if y == node)

    def image_set(self, nodes) -> frozenset[str]:
        return frozenset(self.mapping[x] for x in nodes)

    def apply_marking(self, m: Marking) -> Marking:
        """Set image of a marking (safe nets: counts collapse to one)."""
        return m.image(dict(self.mapping))

    @classmethod
    def identity(cls, net_like) -> "Morphism":
        nodes = _net_of(net_like).nodes()
        return cls(source=net_like, target=net_like, mapping={x: x for x in nodes})


@dataclass
class MorphismReport:
    valid: bool
    failures: list[tuple[str, tuple[str, ...]]] = field(default_factory=list)
    sm_witnesses: dict[str, SequentialComponent] = field(default_factory=dict)

    def clauses(self) -> set[str]:
        return {c for c, _ in self.failures}


def _check_preconditions(m: Morphism, failures: list[tuple[str, tuple[str, ...]]]) -> None:
    for side, net in (("source", m.source_net()), ("target", m.target_net())):
        try:
            if not is_safe(explore(net)):
                failures.append((f"pre-{side}-safe", ()))
        except IncompleteExploration:
            failures.append((f"pre-{side}-safe", ()))
        if find_sequential_cover(net) is None:
            failures.append((f"pre-{side}-smd", ()))


def check_alpha(m: Morphism, preconditions: bool = True) -> MorphismReport:
    """Validate an abstraction morphism clause by clause.

    Failure codes: "total"/"surjective" for the map itself, "1" places onto
    places, "2" initial marking preserved, "3" transition neighborhoods,
    "4" transition collapse, "5a".."5e" per-place subnet conditions,
    "pre-*" for the safe/SMD preconditions on either net.
    """
    src, tgt = m.source_net(), m.target_net()
    failures: list[tuple[str, tuple[str, ...]]] = []
    witnesses: dict[str, SequentialComponent] = {}

    missing = tuple(sorted(src.nodes() - set(m.mapping)))
    if missing:
        failures.append(("total", missing))
        return MorphismReport(valid=False, failures=failures)
    bad_range = tuple(sorted(set(m.mapping.values()) - tgt.nodes()))
    if bad_range:
        failures.append(("total", bad_range))
        return MorphismReport(valid=False, failures=failures)
    unhit = tuple(sorted(tgt.nodes() - set(m.mapping[x] for x in src.nodes())))
    if unhit:
        failures.append(("surjective", unhit))

    if preconditions:
        _check_preconditions(m, failures)

    phi = m.mapping
    place_images = {phi[p] for p in src.places}
    bad = tuple(sorted(p for p in src.places if phi[p] not in tgt.places))
    if bad or place_images != tgt.places:
        failures.append(("1", bad or tuple(sorted(tgt.places - place_images))))

    if m.apply_marking(src.initial) != tgt.initial:
        failures.append(("2", tuple(sorted(src.initial.places()))))

    for t1 in sorted(src.transitions):
        t2 = phi[t1]
        if t2 in tgt.transitions:
            if m.image_set(src.preset(t1)) != tgt.preset(t2) or m.image_set(
                src.postset(t1)
            ) != tgt.postset(t2):
                failures.append(("3", (t1,)))
        else:
            if m.image_set(src.neighborhood(t1)) != {t2}:
                failures.append(("4", (t1,)))

    for p2 in sorted(tgt.places):
        a = m.preimage(p2)
        view = src.subnet(a)
        pure_places = a <= src.places
        if not pure_places and not view.is_acyclic():
            failures.append(("5a", (p2,)))
        in_places = view.inputs & src.places
        out_places = view.outputs & src.places
        for p1 in sorted(in_places):
            if not m.image_set(src.preset(p1)) <= tgt.preset(p2):
                failures.append(("5b", (p2, p1)))
            if tgt.preset(p2) and not src.preset(p1):
                failures.append(("5b", (p2, p1)))
        for p1 in sorted(out_places):
            if m.image_set(src.postset(p1)) != tgt.postset(p2):
                failures.append(("5c", (p2, p1)))
        for p1 in sorted(a & src.places):
            if p1 not in in_places and m.image_set(src.preset(p1)) != {p2}:
                failures.append(("5d", (p2, p1)))
            if p1 not in out_places and m.image_set(src.postset(p1)) != {p2}:
                failures.append(("5d", (p2, p1)))
        required = frozenset().union(
            *(m.preimage(t2) for t2 in tgt.neighborhood(p2))
        ) if tgt.neighborhood(p2) else frozenset()
        for p1 in sorted(a & src.places):
            comp = find_component_containing(src, p1, required)
            if comp is None:
                failures.append(("5e", (p2, p1)))
            else:
                witnesses[p1] = comp

    return MorphismReport(valid=not failures, failures=failures, sm_witnesses=witnesses)


def check_alpha_hat(m: Morphism, preconditions: bool = True) -> MorphismReport:
    """Validate a label-respecting abstraction morphism between labeled nets.

    On top of the plain clauses: "2'" final markings preserved, "3'" labeled
    transitions map to equally labeled transitions.
    """
    if not isinstance(m.source, LgwfNet) or not isinstance(m.target, LgwfNet):
        raise InvalidMorphism("label-respecting check needs labeled workflow nets")
    report = check_alpha(m, preconditions=preconditions)
    failures = report.failures
    src, tgt = m.source, m.target
    f1, f2 = _final_of(src), _final_of(tgt)
    if m.apply_marking(f1) != f2:
        failures.append(("2'", tuple(sorted(f1.places()))))
    phi = m.mapping
    for t1 in sorted(set(src.h) | set(src.ell)):
        t2 = phi[t1]
        if t2 not in tgt.net.transitions:
            failures.append(("3'", (t1,)))
            continue
        if t1 in src.h and tgt.h.get(t2) != src.h[t1]:
            failures.append(("3'", (t1,)))
        if t1 in src.ell and tgt.ell.get(t2) != src.ell[t1]:
            failures.append(("3'", (t1,)))
    return MorphismReport(
        valid=not failures, failures=failures, sm_witnesses=report.sm_witnesses
    )


def _require_valid(m: Morphism, report: MorphismReport | None) -> MorphismReport:
    if report is None:
        report = check_alpha(m)
    if not report.valid:
        raise InvalidMorphism(f"morphism fails clauses {sorted(report.clauses())}")
    return report


def properly_refined_places(m: Morphism, report: MorphismReport | None = None) -> frozenset[str]:
    """Abstract places whose inverse image contains at least one transition."""
    _require_valid(m, report)
    src, tgt = m.source_net(), m.target_net()
    return frozenset(
        p2 for p2 in tgt.places if m.preimage(p2) & src.transitions
    )


def check_well_marked(m: Morphism, report: MorphismReport | None = None) -> bool:
    """Each input place of a subnet refining an initially marked place is marked."""
    _require_valid(m, report)
    src, tgt = m.source_net(), m.target_net()
    for p2 in tgt.initial.places():
        view = src.subnet(m.preimage(p2))
        for p1 in view.inputs & src.places:
            if p1 not in src.initial:
                return False
    return True


@dataclass(frozen=True)
class LocalNetPair:
    """Refining subnet and abstract place, each closed off with artificial
    boundary places so every boundary transition keeps nonempty pre/postsets."""

    s1: PetriNet
    s2: PetriNet
    phi_s: Morphism
    place: str


def build_local_nets(
    m: Morphism, p2: str, report: MorphismReport | None = None
) -> LocalNetPair:
    _require_valid(m, report)
    src, tgt = m.source_net(), m.target_net()
    if not (m.preimage(p2) & src.transitions):
        raise NotProperlyRefined(p2)
    a = m.preimage(p2)
    boundary_in = sorted(frozenset().union(*(m.preimage(t) for t in tgt.preset(p2))) if tgt.preset(p2) else frozenset())
    boundary_out = sorted(frozenset().union(*(m.preimage(t) for t in tgt.postset(p2))) if tgt.postset(p2) else frozenset())
    art_in = ARTIFICIAL_IN + p2
    art_out = ARTIFICIAL_OUT + p2

    nodes1 = set(a) | set(boundary_in) | set(boundary_out)
    places1 = (a & src.places) | ({art_in} if boundary_in else set()) | (
        {art_out} if boundary_out else set()
    )
    trans1 = (a & src.transitions) | set(boundary_in) | set(boundary_out)
    flow1 = {(s, d) for s, d in src.flow if s in nodes1 and d in nodes1}
    flow1 |= {(art_in, t) for t in boundary_in}
    flow1 |= {(t, art_out) for t in boundary_out}
    m0_1 = Marking(
        {p: src.initial.count(p) for p in src.initial.places() if p in a}
        | ({art_in: 1} if boundary_in else {})
    )
    s1 = PetriNet(places1, trans1, flow1, m0_1)

    places2 = {p2} | ({art_in} if tgt.preset(p2) else set()) | (
        {art_out} if tgt.postset(p2) else set()
    )
    trans2 = set(tgt.preset(p2)) | set(tgt.postset(p2))
    flow2 = {(art_in, t) for t in tgt.preset(p2)}
    flow2 |= {(t, p2) for t in tgt.preset(p2)}
    flow2 |= {(p2, t) for t in tgt.postset(p2)}
    flow2 |= {(t, art_out) for t in tgt.postset(p2)}
    m0_2 = Marking(
        ({p2: 1} if p2 in tgt.initial else {})
        | ({art_in: 1} if tgt.preset(p2) else {})
    )
    s2 = PetriNet(places2, trans2, flow2, m0_2)

    restricted = {x: m.mapping[x] for x in s1.nodes() if x in m.mapping}
    if boundary_in:
        restricted[art_in] = art_in
    if boundary_out:
        restricted[art_out] = art_out
    phi_s = Morphism(source=s1, target=s2, mapping=restricted)
    return LocalNetPair(s1=s1, s2=s2, phi_s=phi_s, place=p2)


@dataclass
class LocalConditionEntry:
    place: str
    passed: bool
    report: MorphismReport
    uncovered_transitions: tuple[str, ...]
    process: BranchingProcess


@dataclass
class LocalConditionReport:
    entries: dict[str, LocalConditionEntry] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries.values())

    def failing_places(self) -> tuple[str, ...]:
        return tuple(sorted(p for p, e in self.entries.items() if not e.passed))


def check_local_condition(
    m: Morphism, report: MorphismReport | None = None
) -> LocalConditionReport:
    """Unfold each properly refining subnet and re-validate the composed map.

    For each properly refined abstract place, the unfolding of the local
    refined net is folded back and mapped through the restricted morphism;
    that composition must itself validate.  A boundary transition that never
    occurs in the unfolding surfaces here as an uncovered abstract
    transition (a surjectivity failure).
    """
    report = _require_valid(m, report)
    out = LocalConditionReport()
    for p2 in sorted(properly_refined_places(m, report)):
        pair = build_local_nets(m, p2, report)
        bp = unfold(pair.s1)
        composed = compose_maps(bp, pair.phi_s)
        local_report = check_alpha(composed)
        uncovered = tuple(
            sorted(
                t
                for t in pair.s2.transitions
                if t not in set(composed.mapping.values())
            )
        )
        out.entries[p2] = LocalConditionEntry(
            place=p2,
            passed=local_report.valid,
            report=local_report,
            uncovered_transitions=uncovered,
            process=bp,
        )
    return out


@dataclass
class BehaviorReport:
    holds: bool
    failures: list[str] = field(default_factory=list)


def check_preservation(
    m: Morphism,
    cap: int = DEFAULT_CAP,
    limit: int = DEFAULT_LIMIT,
    report: MorphismReport | None = None,
) -> BehaviorReport:
    """Every reachable source marking and firing projects onto the target.

    A transition collapsed into a place must not change the image marking; a
    transition mapped to a transition must fire its image in the target.
    """
    _require_valid(m, report)
    src, tgt = m.source_net(), m.target_net()
    rg_s = explore(src, cap=cap, limit=limit)
    rg_t = explore(tgt, cap=cap, limit=limit)
    if not rg_s.complete or not rg_t.complete:
        raise IncompleteExploration("preservation check needs complete graphs")
    target_vertices = rg_t.vertex_set()
    failures: list[str] = []
    for m1 in rg_s.vertices:
        if m.apply_marking(m1) not in target_vertices:
            failures.append(f"image of {m1} not reachable")
    for m1, t, m1b in rg_s.edges:
        img, img_b = m.apply_marking(m1), m.apply_marking(m1b)
        t2 = m.mapping[t]
        if t2 in tgt.transitions:
            if not tgt.enabled(img, t2) or tgt.fire(img, t2) != img_b:
                failures.append(f"firing {t} does not project to {t2}")
        else:
            if img != img_b:
                failures.append(f"silent firing {t} moved the image marking")
    return BehaviorReport(holds=not failures, failures=failures)


def check_reflection(
    m: Morphism,
    cap: int = DEFAULT_CAP,
    limit: int = DEFAULT_LIMIT,
    report: MorphismReport | None = None,
) -> BehaviorReport:
    """Every reachable target marking and firing lifts back to the source.

    Requires a sound source workflow net; refuses to run otherwise since the
    property can silently fail on unsound sources.
    """
    _require_valid(m, report)
    final = _final_of(m.source)
    if final is None:
        raise SourceNotSound("source carries no final marking")
    gwf = m.source.gwf if isinstance(m.source, LgwfNet) else m.source
    verdict = check_soundness(gwf, cap=cap, limit=limit)
    if not verdict.sound:
        raise SourceNotSound(f"source is unsound (clause {verdict.violated_clause})")
    src, tgt = m.source_net(), m.target_net()
    rg_s = explore(src, cap=cap, limit=limit)
    rg_t = explore(tgt, cap=cap, limit=limit)
    if not rg_s.complete or not rg_t.complete:
        raise IncompleteExploration("reflection check needs complete graphs")
    by_image: dict[Marking, list[Marking]] = {}
    for m1 in rg_s.vertices:
        by_image.setdefault(m.apply_marking(m1), []).append(m1)
    failures: list[str] = []
    for m2 in rg_t.vertices:
        if m2 not in by_image:
            failures.append(f"{m2} has no reachable preimage")
            continue
        for t2, _ in rg_t.successors(m2):
            for t1 in sorted(m.preimage(t2) & src.transitions):
                if not any(src.enabled(m1, t1) for m1 in by_image[m2]):
                    failures.append(f"firing of {t2} at {m2} does not lift to {t1}")
    return BehaviorReport(holds=not failures, failures=failures)
