"""Occurrence nets and branching processes of safe nets.

The unfolding is built by the possible-extensions construction: an event is
added for every transition whose input places are matched by a pairwise
concurrent set of conditions, deduplicated by (preset, image).  For acyclic
nets the construction terminates on its own and yields the full unfolding;
for cyclic nets it stops at the event budget and marks the process partial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping

from .errors import MapMismatch, UnsafeNet
from .petri import Marking, PetriNet


@dataclass(frozen=True)
class OccurrenceNet:
    """Acyclic conflict-structured net: conditions, events, and their flow."""

    conditions: frozenset[str]
    events: frozenset[str]
    flow: frozenset[tuple[str, str]]
    min: frozenset[str]


@dataclass
class BranchingProcess:
    """An occurrence net plus the fold map back to the source net."""

    occ: OccurrenceNet
    fold: dict[str, str]
    source: PetriNet
    partial: bool = False
    _pre: dict[str, frozenset[str]] = field(repr=False, default_factory=dict)
    _post: dict[str, frozenset[str]] = field(repr=False, default_factory=dict)

    def as_petri_net(self) -> PetriNet:
        """The occurrence net as a marked net; tokens on the minimal conditions."""
        return PetriNet(
            self.occ.conditions,
            self.occ.events,
            self.occ.flow,
            Marking.of(*self.occ.min),
        )

    def folding_surjective(self) -> bool:
        hit = set(self.fold.values())
        return self.source.nodes() <= hit

    def uncovered(self) -> frozenset[str]:
        """Source nodes with no occurrence in the process."""
        return self.source.nodes() - set(self.fold.values())


def unfold(net: PetriNet, depth: int = 10_000) -> BranchingProcess:
    """Maximal branching process of a safe marked net, up to ``depth`` events.

    Raises :class:`UnsafeNet` when two concurrent conditions share a place
    image, which certifies the source is not safe.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    acyclic = net.is_acyclic()

    cond_image: dict[str, str] = {}
    event_image: dict[str, str] = {}
    pre: dict[str, frozenset[str]] = {}
    post: dict[str, set[str]] = {}
    ancestors: dict[str, frozenset[str]] = {}  # ancestor events, self included for events
    by_place: dict[str, list[str]] = {}
    flow: set[tuple[str, str]] = set()
    mins: list[str] = []

    def add_condition(place: str, producer: str | None) -> str:
        cid = f"b{len(cond_image)}:{place}"
        cond_image[cid] = place
        pre[cid] = frozenset() if producer is None else frozenset([producer])
        post[cid] = set()
        ancestors[cid] = frozenset() if producer is None else ancestors[producer]
        for other in by_place.get(place, ()):
            if _concurrent(cid, other, ancestors, pre):
                raise UnsafeNet(place)
        by_place.setdefault(place, []).append(cid)
        if producer is not None:
            flow.add((producer, cid))
            post[producer].add(cid)
        return cid

    for place in net.initial.places():
        for _ in range(net.initial.count(place)):
            mins.append(add_condition(place, None))

    partial = False
    while True:
        candidates = _possible_extensions(net, cond_image, event_image, pre, ancestors, by_place)
        if not candidates:
            break
        for t, coset in candidates:
            if not acyclic and len(event_image) >= depth:
                partial = True
                break
            eid = f"e{len(event_image)}:{t}"
            event_image[eid] = t
            pre[eid] = coset
            post[eid] = set()
            anc: set[str] = {eid}
            for b in coset:
                anc |= ancestors[b]
                flow.add((b, eid))
                post[b].add(eid)
            ancestors[eid] = frozenset(anc)
            for place in sorted(net.postset(t)):
                add_condition(place, eid)
        if partial:
            break

    occ = OccurrenceNet(
        conditions=frozenset(cond_image),
        events=frozenset(event_image),
        flow=frozenset(flow),
        min=frozenset(mins),
    )
    return BranchingProcess(
        occ=occ,
        fold={**cond_image, **event_image},
        source=net,
        partial=partial,
        _pre=dict(pre),
        _post={x: frozenset(s) for x, s in post.items()},
    )


def _concurrent(
    a: str,
    b: str,
    ancestors: Mapping[str, frozenset[str]],
    pre: Mapping[str, frozenset[str]],
) -> bool:
    if _causally_ordered(a, b, ancestors, pre) or _causally_ordered(b, a, ancestors, pre):
        return False
    for ea in ancestors[a]:
        for eb in ancestors[b]:
            if ea != eb and (pre[ea] & pre[eb]):
                return False
    return True


def _causally_ordered(
    x: str,
    y: str,
    ancestors: Mapping[str, frozenset[str]],
    pre: Mapping[str, frozenset[str]],
) -> bool:
    """x ≤ y, decided through y's ancestor events."""
    if x == y:
        return True
    if x in ancestors[y]:
        return True
    # x is a condition: x ≤ y iff some consumer of x is an ancestor of y,
    # i.e. x is in the preset of an ancestor event of y.
    for e in ancestors[y]:
        if x in pre[e]:
            return True
    return False


def _possible_extensions(
    net: PetriNet,
    cond_image: Mapping[str, str],
    event_image: Mapping[str, str],
    pre: Mapping[str, frozenset[str]],
    ancestors: Mapping[str, frozenset[str]],
    by_place: Mapping[str, list[str]],
) -> list[tuple[str, frozenset[str]]]:
    existing = {(pre[e], event_image[e]) for e in event_image}
    found: list[tuple[str, frozenset[str]]] = []
    for t in sorted(net.transitions):
        places = sorted(net.preset(t))
        pools = [by_place.get(p, []) for p in places]
        if any(not pool for pool in pools):
            continue
        for combo in product(*pools):
            coset = frozenset(combo)
            if len(coset) != len(places):
                continue
            if (coset, t) in existing:
                continue
            if _pairwise_concurrent(sorted(coset), ancestors, pre):
                found.append((t, coset))
    found.sort(key=lambda ct: (ct[0], tuple(sorted(ct[1]))))
    return found


def _pairwise_concurrent(
    conds: list[str],
    ancestors: Mapping[str, frozenset[str]],
    pre: Mapping[str, frozenset[str]],
) -> bool:
    for i in range(len(conds)):
        for j in range(i + 1, len(conds)):
            if not _concurrent(conds[i], conds[j], ancestors, pre):
                return False
    return True


def folding(bp: BranchingProcess) -> dict[str, str]:
    """The fold map from process nodes to source nodes."""
    return dict(bp.fold)


def compose_maps(bp: BranchingProcess, phi) -> "object":
    """Compose the fold map with a morphism on its source net.

    Returns a candidate morphism from the occurrence net (as a marked net)
    to the morphism's target.
    """
    from .morphisms import Morphism

    if not isinstance(phi, Morphism):
        raise MapMismatch("second argument must be a Morphism")
    if not bp.source.nodes() <= set(phi.mapping):
        raise MapMismatch("fold range does not match morphism domain")
    if set(phi.mapping.values()) - phi.target_net().nodes():
        raise MapMismatch("morphism range does not match its target")
    composed = {x: phi.mapping[img] for x, img in bp.fold.items()}
    return Morphism(source=bp.as_petri_net(), target=phi.target, mapping=composed)


def check_occurrence_axioms(occ: OccurrenceNet) -> list[str]:
    """Violated occurrence-net axioms, empty when the net is one.

    Codes: "1" condition with two producers, "2" cyclic flow, "3" infinite
    past (cannot occur in finite nets, checked via "2"), "4" self-conflict.
    """
    failures: list[str] = []
    pre: dict[str, set[str]] = {x: set() for x in occ.conditions | occ.events}
    post: dict[str, set[str]] = {x: set() for x in occ.conditions | occ.events}
    for s, d in occ.flow:
        pre[d].add(s)
        post[s].add(d)
    if any(len(pre[b]) > 1 for b in occ.conditions):
        failures.append("1")
    order: list[str] = []
    indeg = {x: len(pre[x]) for x in pre}
    stack = [x for x, d in indeg.items() if d == 0]
    while stack:
        x = stack.pop()
        order.append(x)
        for y in post[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                stack.append(y)
    if len(order) != len(pre):
        failures.append("2")
        return failures
    anc: dict[str, frozenset[str]] = {}
    for x in order:
        acc: set[str] = set()
        for y in pre[x]:
            acc |= anc[y]
            acc.add(y)
        anc[x] = frozenset(acc)
    for x in pre:
        events_before = {e for e in (anc[x] | {x}) if e in occ.events}
        for e1 in events_before:
            for e2 in events_before:
                if e1 != e2 and pre[e1] & pre[e2]:
                    failures.append("4")
                    return failures
    if occ.min != frozenset(x for x in pre if not pre[x]) or not occ.min <= occ.conditions:
        failures.append("min")
    return failures


def check_process_axioms(bp: BranchingProcess) -> list[str]:
    """Violated branching-process axioms relative to the source net."""
    failures: list[str] = []
    net = bp.source
    occ = bp.occ
    if not all(bp.fold[b] in net.places for b in occ.conditions) or not all(
        bp.fold[e] in net.transitions for e in occ.events
    ):
        failures.append("1")
    min_images = [bp.fold[b] for b in occ.min]
    if sorted(min_images) != sorted(net.initial.places()) or not net.initial.is_set():
        failures.append("2")
    pre: dict[str, set[str]] = {x: set() for x in occ.conditions | occ.events}
    post: dict[str, set[str]] = {x: set() for x in occ.conditions | occ.events}
    for s, d in occ.flow:
        pre[d].add(s)
        post[s].add(d)
    for e in occ.events:
        t = bp.fold[e]
        if sorted(bp.fold[b] for b in pre[e]) != sorted(net.preset(t)):
            failures.append("3")
            break
        if sorted(bp.fold[b] for b in post[e]) != sorted(net.postset(t)):
            failures.append("3")
            break
    seen: set[tuple[frozenset[str], str]] = set()
    for e in occ.events:
        key = (frozenset(pre[e]), bp.fold[e])
        if key in seen:
            failures.append("4")
            break
        seen.add(key)
    return failures
