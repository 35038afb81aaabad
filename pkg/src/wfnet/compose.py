"""Composition of labeled workflow nets over channels and shared activities.

Composing two nets drops their channel places, recreates one channel place
per channel that has complementary send/receive labels in the union, and
merges transitions that carry the same synchronous activity label into
pairs named ``(t1,t2)``.  Activity-labeled transitions without a partner
are kept with their label so that later compositions can still match them;
with fully matched labels this coincides with the pairwise construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    ChannelNameCollision,
    ComponentsNotDisjoint,
    NotReachable,
)
from .labeled import AsyncLabel, LgwfNet, validate_lgwf
from .petri import DEFAULT_CAP, DEFAULT_LIMIT, Marking, PetriNet, ReachabilityGraph, explore
from .workflow import check_gwf


@dataclass(frozen=True)
class Provenance:
    """Origin of one node of a composition.

    kind "c1"/"c2": node inherited from the first/second component, origin
    holds its original name.  kind "channel": created channel place, origin
    holds the channel.  kind "sync": merged transition pair, origin holds the
    two component names.  kind "merge": place produced by p-simplification,
    origin holds the merged member provenances.
    """

    kind: str
    origin: tuple

    def component_origins(self, side: str) -> tuple[str, ...]:
        """Original component-side names of this node (side is "c1" or "c2")."""
        if self.kind == side:
            return (self.origin[0],)
        if self.kind == "sync":
            return (self.origin[0],) if side == "c1" else (self.origin[1],)
        if self.kind == "merge":
            out: list[str] = []
            for sub in self.origin:
                out.extend(sub.component_origins(side))
            return tuple(out)
        return ()


@dataclass(frozen=True)
class Composition:
    result: LgwfNet
    provenance: Mapping[str, Provenance]
    prefixed: bool = False

    def channel_places(self) -> tuple[str, ...]:
        return tuple(sorted(self.result.k))


def as_compose(n1: LgwfNet, n2: LgwfNet, auto_prefix: bool = False) -> Composition:
    """Compose two disjoint labeled workflow nets.

    When node names collide, either raise (default) or, with
    ``auto_prefix``, rename the components with ``1:``/``2:`` prefixes and
    record original names in the provenance.
    """
    shared = n1.net.nodes() & n2.net.nodes()
    prefixed = False
    pre1: dict[str, str] = {}
    pre2: dict[str, str] = {}
    if shared:
        if not auto_prefix:
            raise ComponentsNotDisjoint(tuple(sorted(shared)))
        prefixed = True
        pre1 = {x: f"1:{x}" for x in n1.net.nodes()}
        pre2 = {x: f"2:{x}" for x in n2.net.nodes()}

    def name1(x: str) -> str:
        return pre1.get(x, x)

    def name2(x: str) -> str:
        return pre2.get(x, x)

    # Transitions that find a synchronization partner are replaced by pairs.
    pairs: list[tuple[str, str]] = []
    for t1 in sorted(n1.ell):
        for t2 in sorted(n2.ell):
            if n1.ell[t1] == n2.ell[t2]:
                pairs.append((t1, t2))
    synced1 = {t1 for t1, _ in pairs}
    synced2 = {t2 for _, t2 in pairs}
    kept1 = sorted(n1.net.transitions - synced1)
    kept2 = sorted(n2.net.transitions - synced2)

    h: dict[str, AsyncLabel] = {}
    ell: dict[str, str] = {}
    for t in kept1:
        if t in n1.h:
            h[name1(t)] = n1.h[t]
        if t in n1.ell:
            ell[name1(t)] = n1.ell[t]
    for t in kept2:
        if t in n2.h:
            h[name2(t)] = n2.h[t]
        if t in n2.ell:
            ell[name2(t)] = n2.ell[t]

    provenance: dict[str, Provenance] = {}
    transitions: list[str] = []
    for t in kept1:
        transitions.append(name1(t))
        provenance[name1(t)] = Provenance("c1", (t,))
    for t in kept2:
        transitions.append(name2(t))
        provenance[name2(t)] = Provenance("c2", (t,))
    for t1, t2 in pairs:
        name = f"({name1(t1)},{name2(t2)})"
        transitions.append(name)
        provenance[name] = Provenance("sync", (t1, t2))
        ell[name] = n1.ell[t1]

    # One place per channel with both directions present among kept labels.
    sending = {lbl.channel for lbl in h.values() if lbl.is_send}
    receiving = {lbl.channel for lbl in h.values() if not lbl.is_send}
    channels = sorted(sending & receiving)

    places1 = sorted(n1.net.places - set(n1.k))
    places2 = sorted(n2.net.places - set(n2.k))
    places = [name1(p) for p in places1] + [name2(p) for p in places2]
    for p in places1:
        provenance[name1(p)] = Provenance("c1", (p,))
    for p in places2:
        provenance[name2(p)] = Provenance("c2", (p,))
    collisions = tuple(c for c in channels if c in provenance)
    if collisions:
        raise ChannelNameCollision(collisions)
    k: dict[str, str] = {}
    for c in channels:
        places.append(c)
        provenance[c] = Provenance("channel", (c,))
        k[c] = c

    flow: set[tuple[str, str]] = set()
    for src, dst in n1.net.flow:
        if src in n1.k or dst in n1.k or src in synced1 or dst in synced1:
            continue
        flow.add((name1(src), name1(dst)))
    for src, dst in n2.net.flow:
        if src in n2.k or dst in n2.k or src in synced2 or dst in synced2:
            continue
        flow.add((name2(src), name2(dst)))
    # A transition synchronized in several pairs contributes its arcs to each.
    for t1, t2 in pairs:
        pair = f"({name1(t1)},{name2(t2)})"
        for p in n1.net.preset(t1):
            if p not in n1.k:
                flow.add((name1(p), pair))
        for p in n1.net.postset(t1):
            if p not in n1.k:
                flow.add((pair, name1(p)))
        for p in n2.net.preset(t2):
            if p not in n2.k:
                flow.add((name2(p), pair))
        for p in n2.net.postset(t2):
            if p not in n2.k:
                flow.add((pair, name2(p)))
    for t, lbl in h.items():
        if lbl.channel in k:
            flow.add((t, lbl.channel) if lbl.is_send else (lbl.channel, t))

    initial = Marking(
        {name1(p): n1.initial.count(p) for p in n1.initial.places()}
        | {name2(p): n2.initial.count(p) for p in n2.initial.places()}
    )
    final = Marking(
        {name1(p): n1.final.count(p) for p in n1.final.places()}
        | {name2(p): n2.final.count(p) for p in n2.final.places()}
    )

    net = PetriNet(places, transitions, flow, initial)
    result = validate_lgwf(check_gwf(net, final), h, ell, k)
    return Composition(result=result, provenance=provenance, prefixed=prefixed)


def p_simplify(c: Composition) -> Composition:
    """Merge unlabeled places with equal neighborhoods, presets with postsets.

    Only places that also agree on initial token count and final-marking
    membership are merged, so firing behavior is unchanged.  Channel places
    never merge.  Repeats until a fixpoint.
    """
    net = c.result.net
    final = c.result.final
    k = dict(c.result.k)
    provenance = dict(c.provenance)
    flow = set(net.flow)
    places = set(net.places)
    initial = net.initial

    changed = True
    while changed:
        changed = False
        pre: dict[str, frozenset[str]] = {p: frozenset() for p in places}
        post: dict[str, frozenset[str]] = {p: frozenset() for p in places}
        for s, d in flow:
            if d in places:
                pre[d] = pre[d] | {s}
            if s in places:
                post[s] = post[s] | {d}
        groups: dict[tuple, list[str]] = {}
        for p in sorted(places):
            if p in k:
                continue
            key = (pre[p], post[p], initial.count(p), p in final)
            groups.setdefault(key, []).append(p)
        for key, members in sorted(groups.items(), key=lambda kv: kv[1]):
            if len(members) < 2:
                continue
            keep, *drop = members
            merged_prov = Provenance(
                "merge", tuple(provenance[m] for m in members)
            )
            for gone in drop:
                places.discard(gone)
                flow = {
                    (keep if s == gone else s, keep if d == gone else d)
                    for s, d in flow
                }
                provenance.pop(gone, None)
            provenance[keep] = merged_prov
            initial = Marking(
                {p: initial.count(p) for p in initial.places() if p in places}
            )
            final = Marking(
                {p: final.count(p) for p in final.places() if p in places}
            )
            changed = True
            break

    net2 = PetriNet(places, net.transitions, flow, initial)
    result = validate_lgwf(check_gwf(net2, final), c.result.h, c.result.ell, k)
    return Composition(result=result, provenance=provenance, prefixed=c.prefixed)


def decompose_marking(
    c: Composition,
    m: Marking,
    verify: bool = False,
    rg: ReachabilityGraph | None = None,
    n1: LgwfNet | None = None,
    n2: LgwfNet | None = None,
    cap: int = DEFAULT_CAP,
    limit: int = DEFAULT_LIMIT,
) -> tuple[Marking, Marking, Marking]:
    """Split a composition marking into component projections plus channels.

    The projections use component place names.  In verified mode the firing
    sequence reaching ``m`` is projected on each component and replayed
    there, which confirms that both projections extend to reachable
    component markings; this needs the component nets.
    """
    counts1: dict[str, int] = {}
    counts2: dict[str, int] = {}
    counts_c: dict[str, int] = {}
    for place in m.places():
        prov = c.provenance.get(place)
        if prov is None:
            raise NotReachable(f"marking uses unknown place {place}")
        n = m.count(place)
        if prov.kind == "channel":
            counts_c[place] = n
            continue
        for origin in prov.component_origins("c1"):
            counts1[origin] = n
        for origin in prov.component_origins("c2"):
            counts2[origin] = n
    m1, m2, mc = Marking(counts1), Marking(counts2), Marking(counts_c)

    if verify:
        if n1 is None or n2 is None:
            raise ValueError("verified decomposition needs both component nets")
        if rg is None:
            rg = explore(c.result.net, cap=cap, limit=limit)
        if m not in rg.vertex_set():
            raise NotReachable(str(m))
        seq = rg.path_to(m)
        replay1 = project_sequence(c, seq, "c1")
        replay2 = project_sequence(c, seq, "c2")
        full1 = n1.net.fire_sequence(replay1)
        full2 = n2.net.fire_sequence(replay2)
        assert full1.restrict(n1.net.places - set(n1.k)) == m1
        assert full2.restrict(n2.net.places - set(n2.k)) == m2
    return m1, m2, mc


def project_sequence(c: Composition, seq: Iterable[str], side: str) -> list[str]:
    """Project a composition firing sequence on one component's transitions."""
    out: list[str] = []
    for t in seq:
        prov = c.provenance[t]
        out.extend(prov.component_origins(side))
    return out


_TUPLE_RE = re.compile(r"^\(.+\)$")


def _flatten_name(name: str) -> str:
    if not _TUPLE_RE.match(name):
        return name
    parts = _split_tuple(name[1:-1])
    if parts is None:
        return name
    flat: list[str] = []
    for part in parts:
        inner = _flatten_name(part)
        if _TUPLE_RE.match(inner):
            flat.extend(_split_tuple(inner[1:-1]) or [inner])
        else:
            flat.append(inner)
    return "(" + ",".join(flat) + ")"


def _split_tuple(body: str) -> list[str] | None:
    parts: list[str] = []
    depth = 0
    current = []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                return None
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return parts if len(parts) >= 2 else None


def canonical_sync_form(n: LgwfNet) -> tuple[LgwfNet, bool]:
    """Flatten nested synchronization tuples in transition names.

    Returns the renamed net and whether any name actually changed, which
    signals a label shared by three or more components.
    """
    mapping = {t: _flatten_name(t) for t in n.net.transitions}
    changed = any(old != new for old, new in mapping.items())
    if not changed:
        return n, False
    net = n.net.renamed(mapping)
    gwf = check_gwf(net, n.final)
    h = {mapping.get(t, t): lbl for t, lbl in n.h.items()}
    ell = {mapping.get(t, t): s for t, s in n.ell.items()}
    return validate_lgwf(gwf, h, ell, dict(n.k)), True
