"""Generalized workflow nets: structure validation, soundness, SMD covers.

A workflow net fixes an initial place set (no inputs) and a final place set
(no outputs); every node lies on a path between them.  Soundness is the
threefold property: the final marking stays reachable, nothing strictly
covers it, and no transition is dead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import IncompleteExploration, StructuralViolation
from .petri import DEFAULT_CAP, DEFAULT_LIMIT, Marking, PetriNet, ReachabilityGraph, explore


@dataclass(frozen=True)
class GwfNet:
    """A validated workflow net: ``net.initial`` is m0, ``final`` is m_f."""

    net: PetriNet
    final: Marking

    @property
    def initial(self) -> Marking:
        return self.net.initial


def check_gwf(net: PetriNet, final: Marking) -> GwfNet:
    """Validate workflow-net structure, raising with all violated clauses.

    Clause 1: the initial marking is a nonempty place set with empty preset.
    Clause 2: the final marking is a nonempty place set with empty postset.
    Clause 3: every node lies on a path from an initial to a final place.
    """
    violations: list[tuple[str, tuple[str, ...]]] = []
    m0 = net.initial
    if not m0:
        violations.append(("1", ()))
    else:
        bad = tuple(sorted(p for p in m0.places() if m0.count(p) > 1))
        if bad:
            violations.append(("1", bad))
        with_inputs = tuple(sorted(p for p in m0.places() if net.preset(p)))
        if with_inputs:
            violations.append(("1", with_inputs))
    final_ok = True
    if not final:
        violations.append(("2", ()))
        final_ok = False
    else:
        unknown = tuple(sorted(p for p in final.places() if p not in net.places))
        if unknown:
            violations.append(("2", unknown))
            final_ok = False
        else:
            bad = tuple(sorted(p for p in final.places() if final.count(p) > 1))
            if bad:
                violations.append(("2", bad))
            with_outputs = tuple(sorted(p for p in final.places() if net.postset(p)))
            if with_outputs:
                violations.append(("2", with_outputs))
    if m0 and final_ok:
        fwd = _forward_reach(net, m0.places())
        bwd = _backward_reach(net, final.places())
        off_path = tuple(sorted(net.nodes() - (fwd & bwd)))
        if off_path:
            violations.append(("3", off_path))
    if violations:
        raise StructuralViolation(violations)
    return GwfNet(net=net, final=final)


def _forward_reach(net: PetriNet, seeds: Iterable[str]) -> set[str]:
    seen = set(seeds)
    stack = list(seen)
    while stack:
        x = stack.pop()
        for y in net.postset(x):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def _backward_reach(net: PetriNet, seeds: Iterable[str]) -> set[str]:
    seen = set(seeds)
    stack = list(seen)
    while stack:
        x = stack.pop()
        for y in net.preset(x):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


@dataclass(frozen=True)
class Witness:
    """Replayable evidence for an unsoundness verdict.

    ``fire`` replays from the initial marking to ``marking``.  For a dead
    transition there is no sequence; ``transition`` names it instead.  For
    unboundedness ``cover`` carries the strictly growing marking pair.
    """

    fire: tuple[str, ...] = ()
    marking: Marking | None = None
    transition: str | None = None
    cover: tuple[Marking, Marking] | None = None


@dataclass(frozen=True)
class SoundnessReport:
    verdict: str  # "sound" | "unsound"
    violated_clause: str | None = None  # "1" | "2" | "3"
    witness: Witness | None = None

    @property
    def sound(self) -> bool:
        return self.verdict == "sound"


def check_soundness(
    g: GwfNet,
    cap: int = DEFAULT_CAP,
    limit: int = DEFAULT_LIMIT,
    rg: ReachabilityGraph | None = None,
) -> SoundnessReport:
    """Decide soundness on the explored state space.

    Clause 1 is checked by one backward closure from the final marking over
    the forward graph; a branch that outgrows an ancestor marking is a
    definite clause-1 violation (the final marking can never drain the
    surplus).  Clause 2 scans for strict covers of the final marking and
    clause 3 for transitions missing from all edges.
    """
    if rg is None:
        rg = explore(g.net, cap=cap, limit=limit)
    if rg.unbounded_witness is not None:
        small, big = rg.unbounded_witness
        return SoundnessReport(
            verdict="unsound",
            violated_clause="1",
            witness=Witness(fire=tuple(rg.path_to(big)), marking=big, cover=(small, big)),
        )
    if rg.truncated:
        raise IncompleteExploration("state space exceeds exploration bounds")
    m_f = g.final
    co_reach = _backward_closure(rg, m_f)
    stuck = [m for m in rg.vertices if m not in co_reach]
    if stuck:
        dead_ends = [m for m in stuck if not rg.successors(m)]
        pick = min(
            dead_ends or stuck,
            key=lambda m: (len(rg.path_to(m)), str(m)),
        )
        return SoundnessReport(
            verdict="unsound",
            violated_clause="1",
            witness=Witness(fire=tuple(rg.path_to(pick)), marking=pick),
        )
    for m in rg.vertices:
        if m.includes(m_f) and m != m_f:
            return SoundnessReport(
                verdict="unsound",
                violated_clause="2",
                witness=Witness(fire=tuple(rg.path_to(m)), marking=m),
            )
    fired = {t for _, t, _ in rg.edges}
    dead = sorted(g.net.transitions - fired)
    if dead:
        return SoundnessReport(
            verdict="unsound",
            violated_clause="3",
            witness=Witness(transition=dead[0]),
        )
    return SoundnessReport(verdict="sound")


def _backward_closure(rg: ReachabilityGraph, target: Marking) -> set[Marking]:
    pred: dict[Marking, list[Marking]] = {}
    for m, _, m2 in rg.edges:
        pred.setdefault(m2, []).append(m)
    if target not in rg.vertex_set():
        return set()
    seen = {target}
    stack = [target]
    while stack:
        m = stack.pop()
        for p in pred.get(m, ()):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


@dataclass(frozen=True)
class SequentialComponent:
    """A token-carrying state-machine subnet generated by a place set.

    Every transition adjacent to ``places`` has exactly one input and one
    output place inside the component, and exactly one initial token lies
    on the component.
    """

    places: frozenset[str]
    transitions: frozenset[str]


def _component_transitions(net: PetriNet, places: frozenset[str]) -> frozenset[str]:
    out: set[str] = set()
    for p in places:
        out |= net.preset(p) | net.postset(p)
    return frozenset(out)


def _component_defects(net: PetriNet, places: frozenset[str]) -> tuple[str | None, bool]:
    """First deficient transition (missing an inside input/output) if any,
    and whether some transition already has two inside inputs or outputs."""
    deficient: str | None = None
    for t in sorted(_component_transitions(net, places)):
        ins = len(net.preset(t) & places)
        outs = len(net.postset(t) & places)
        if ins > 1 or outs > 1:
            return t, True
        if ins == 0 or outs == 0:
            if deficient is None:
                deficient = t
    return deficient, False


def _find_component_through(
    net: PetriNet,
    seed: str,
    required: frozenset[str] = frozenset(),
) -> SequentialComponent | None:
    """Depth-first search for a sequential component containing ``seed``.

    Grows place sets by repairing one deficient transition at a time, so
    every candidate stays connected; prunes sets with a doubled inside arc
    or more than one initial token.  When ``required`` is given, only
    components whose transition set includes it are returned.
    """
    start = frozenset([seed])
    seen: set[frozenset[str]] = {start}
    stack: list[frozenset[str]] = [start]
    while stack:
        places = stack.pop()
        if sum(net.initial.count(p) for p in places) > 1:
            continue
        defect, broken = _component_defects(net, places)
        if broken:
            continue
        if defect is None:
            if sum(net.initial.count(p) for p in places) != 1:
                continue
            trans = _component_transitions(net, places)
            if required <= trans:
                return SequentialComponent(places=places, transitions=trans)
            continue
        ins = net.preset(defect) & places
        side = net.preset(defect) if not ins else net.postset(defect)
        for p in sorted(side - places):
            grown = places | {p}
            if grown not in seen:
                seen.add(grown)
                stack.append(grown)
    return None


def find_sequential_cover(net: PetriNet) -> list[SequentialComponent] | None:
    """Exact cover of all places by sequential components, or None.

    A cover exists iff every place lies on some component, so one search per
    uncovered place suffices.  Worst case exponential; nets are desk scale.
    """
    cover: list[SequentialComponent] = []
    covered: set[str] = set()
    for p in sorted(net.places):
        if p in covered:
            continue
        comp = _find_component_through(net, p)
        if comp is None:
            return None
        cover.append(comp)
        covered |= comp.places
    return cover


def is_smd(net: PetriNet) -> bool:
    """True when the net is covered by sequential components."""
    return find_sequential_cover(net) is not None


def find_component_containing(
    net: PetriNet,
    place: str,
    required_transitions: Iterable[str],
) -> SequentialComponent | None:
    """First sequential component through ``place`` whose transitions include
    all of ``required_transitions``; deterministic search order."""
    return _find_component_through(net, place, frozenset(required_transitions))


def is_sequential_component(net: PetriNet, places: Iterable[str]) -> bool:
    """Check the defining conditions for a given place set directly."""
    place_set = frozenset(places)
    if not place_set or not place_set <= net.places:
        return False
    defect, broken = _component_defects(net, place_set)
    if broken or defect is not None:
        return False
    if sum(net.initial.count(p) for p in place_set) != 1:
        return False
    # connectedness of the induced subnet
    trans = _component_transitions(net, place_set)
    seen = {next(iter(sorted(place_set)))}
    frontier = list(seen)
    while frontier:
        x = frontier.pop()
        steps = (net.preset(x) | net.postset(x)) & (place_set | trans)
        for y in steps:
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return place_set | trans <= seen
