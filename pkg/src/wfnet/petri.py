"""Plain place/transition nets: structure, markings, firing, reachability.

Nets are immutable after construction and safe to share between threads.
Construction enforces the modeled net class: bipartite flow, no isolated
nodes, no self-loops, and transitions with at least one input and one
output place.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import (
    IncompleteExploration,
    InvalidNet,
    NodeNotFound,
    NotEnabled,
)

DEFAULT_CAP = 8
DEFAULT_LIMIT = 200_000

_NAME_RE = re.compile(r"^\S+$")
_COMPOSITE_RE = re.compile(r"^\(.+,.+\)$")
_RESERVED_PREFIXES = ("⊥in:", "⊥out:")


def is_valid_name(
    name: str, *, allow_composite: bool = False, allow_artificial: bool = True
) -> bool:
    """Node ids are nonempty whitespace-free tokens.

    The composite form ``(a,b)`` is reserved for synchronized transitions and
    the prefixes ``⊥in:`` / ``⊥out:`` for artificial places in local nets;
    parsers exclude both from user documents.
    """
    if not name or not _NAME_RE.match(name):
        return False
    if not allow_artificial and name.startswith(_RESERVED_PREFIXES):
        return False
    if not allow_composite and _COMPOSITE_RE.match(name):
        return False
    return True


class Marking:
    """Immutable multiset of tokens over place names.

    Places with count zero are never stored, so equal markings compare and
    hash equal. Iteration and string form are in sorted place order.
    """

    __slots__ = ("_items",)

    def __init__(self, counts: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        if isinstance(counts, Mapping):
            pairs = counts.items()
        else:
            pairs = counts
        clean = {}
        for place, n in pairs:
            if n < 0:
                raise ValueError(f"negative token count for {place}")
            if n:
                clean[place] = clean.get(place, 0) + n
        self._items: tuple[tuple[str, int], ...] = tuple(sorted(clean.items()))

    @classmethod
    def of(cls, *places: str) -> "Marking":
        """Set-valued marking with one token on each given place."""
        return cls({p: 1 for p in places})

    def count(self, place: str) -> int:
        for p, n in self._items:
            if p == place:
                return n
        return 0

    def places(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self._items)

    def items(self) -> tuple[tuple[str, int], ...]:
        return self._items

    def total(self) -> int:
        return sum(n for _, n in self._items)

    def is_set(self) -> bool:
        return all(n == 1 for _, n in self._items)

    def add(self, places: Iterable[str]) -> "Marking":
        counts = dict(self._items)
        for p in places:
            counts[p] = counts.get(p, 0) + 1
        return Marking(counts)

    def remove(self, places: Iterable[str]) -> "Marking":
        counts = dict(self._items)
        for p in places:
            counts[p] = counts.get(p, 0) - 1
        return Marking(counts)

    def covers_set(self, places: Iterable[str]) -> bool:
        """True when every given place carries at least one token."""
        counts = dict(self._items)
        return all(counts.get(p, 0) >= 1 for p in places)

    def includes(self, other: "Marking") -> bool:
        """Multiset inclusion: other ⊆ self."""
        counts = dict(self._items)
        return all(counts.get(p, 0) >= n for p, n in other._items)

    def strictly_covers(self, other: "Marking") -> bool:
        return self.includes(other) and self._items != other._items

    def restrict(self, places: Iterable[str]) -> "Marking":
        keep = set(places)
        return Marking({p: n for p, n in self._items if p in keep})

    def rename(self, mapping: Mapping[str, str]) -> "Marking":
        return Marking({mapping.get(p, p): n for p, n in self._items})

    def image(self, mapping: Mapping[str, str]) -> "Marking":
        """Set image under a node map (counts collapse to 1)."""
        return Marking({mapping[p]: 1 for p, _ in self._items})

    def __contains__(self, place: str) -> bool:
        return self.count(place) > 0

    def __iter__(self) -> Iterator[str]:
        return iter(self.places())

    def __len__(self) -> int:
        return len(self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Marking) and self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __repr__(self) -> str:
        return f"Marking({dict(self._items)!r})"

    def __str__(self) -> str:
        inner = ",".join(f"{p}:{n}" for p, n in self._items)
        return "{" + inner + "}"


class PetriNet:
    """A net ``(P, T, F)`` with an initial marking.

    ``flow`` pairs must connect a place to a transition or vice versa.
    """

    __slots__ = ("places", "transitions", "flow", "initial", "_pre", "_post")

    def __init__(
        self,
        places: Iterable[str],
        transitions: Iterable[str],
        flow: Iterable[tuple[str, str]],
        initial: Marking | Mapping[str, int] = (),
    ):
        self.places = frozenset(places)
        self.transitions = frozenset(transitions)
        self.flow = frozenset(flow)
        self.initial = initial if isinstance(initial, Marking) else Marking(initial)
        self._pre: dict[str, frozenset[str]] = {}
        self._post: dict[str, frozenset[str]] = {}
        self._validate()
        pre: dict[str, set[str]] = {x: set() for x in self.nodes()}
        post: dict[str, set[str]] = {x: set() for x in self.nodes()}
        for src, dst in self.flow:
            post[src].add(dst)
            pre[dst].add(src)
        self._pre = {x: frozenset(s) for x, s in pre.items()}
        self._post = {x: frozenset(s) for x, s in post.items()}

    def _validate(self) -> None:
        overlap = self.places & self.transitions
        if overlap:
            raise InvalidNet(f"places and transitions overlap: {sorted(overlap)}")
        for name in self.places:
            if not is_valid_name(name):
                raise InvalidNet(f"bad place id: {name!r}")
        for name in self.transitions:
            if not is_valid_name(name, allow_composite=True):
                raise InvalidNet(f"bad transition id: {name!r}")
        nodes = self.places | self.transitions
        degree: dict[str, int] = {x: 0 for x in nodes}
        pre_count = {t: 0 for t in self.transitions}
        post_count = {t: 0 for t in self.transitions}
        for src, dst in self.flow:
            if src not in nodes or dst not in nodes:
                missing = src if src not in nodes else dst
                raise InvalidNet(f"arc references unknown node: {missing}")
            place_to_trans = src in self.places and dst in self.transitions
            trans_to_place = src in self.transitions and dst in self.places
            if not (place_to_trans or trans_to_place):
                raise InvalidNet(f"arc must connect place and transition: {src} -> {dst}")
            if (dst, src) in self.flow:
                pair = (src, dst) if place_to_trans else (dst, src)
                raise InvalidNet(f"self-loop between {pair[0]} and {pair[1]}")
            degree[src] += 1
            degree[dst] += 1
            if place_to_trans:
                pre_count[dst] += 1
            else:
                post_count[src] += 1
        isolated = sorted(x for x, d in degree.items() if d == 0)
        if isolated:
            raise InvalidNet(f"isolated nodes: {isolated}")
        for t in self.transitions:
            if pre_count[t] == 0 or post_count[t] == 0:
                raise InvalidNet(f"transition {t} needs an input and an output place")
        for p in self.initial.places():
            if p not in self.places:
                raise InvalidNet(f"initial marking uses unknown place: {p}")

    def nodes(self) -> frozenset[str]:
        return self.places | self.transitions

    def _require(self, x: str) -> None:
        if x not in self._pre:
            raise NodeNotFound(x)

    def kind(self, x: str) -> str:
        self._require(x)
        return "place" if x in self.places else "transition"

    def preset(self, x: str) -> frozenset[str]:
        self._require(x)
        return self._pre[x]

    def postset(self, x: str) -> frozenset[str]:
        self._require(x)
        return self._post[x]

    def preset_of(self, xs: Iterable[str]) -> frozenset[str]:
        out: set[str] = set()
        for x in xs:
            out |= self.preset(x)
        return frozenset(out)

    def postset_of(self, xs: Iterable[str]) -> frozenset[str]:
        out: set[str] = set()
        for x in xs:
            out |= self.postset(x)
        return frozenset(out)

    def neighborhood(self, x: str) -> frozenset[str]:
        return self.preset(x) | self.postset(x)

    def subnet(self, a: Iterable[str]) -> "SubnetView":
        """Fragment generated by ``a`` plus its input/output elements."""
        keep = frozenset(a)
        for x in keep:
            self._require(x)
        flow = frozenset((s, d) for s, d in self.flow if s in keep and d in keep)
        inputs = frozenset(
            y for y in keep
            if not self._pre[y] or (self._pre[y] - keep)
        )
        outputs = frozenset(
            y for y in keep
            if not self._post[y] or (self._post[y] - keep)
        )
        return SubnetView(
            places=self.places & keep,
            transitions=self.transitions & keep,
            flow=flow,
            inputs=inputs,
            outputs=outputs,
        )

    def enabled(self, m: Marking, t: str) -> bool:
        self._require(t)
        if t not in self.transitions:
            raise NodeNotFound(t)
        return m.covers_set(self._pre[t])

    def fire(self, m: Marking, t: str) -> Marking:
        if not self.enabled(m, t):
            raise NotEnabled(t, str(m))
        return m.remove(self._pre[t]).add(self._post[t])

    def fire_sequence(self, seq: Iterable[str], start: Marking | None = None) -> Marking:
        m = self.initial if start is None else start
        for t in seq:
            m = self.fire(m, t)
        return m

    def is_p_simple(self) -> bool:
        """No two distinct places share both preset and postset."""
        seen: dict[tuple[frozenset[str], frozenset[str]], str] = {}
        for p in self.places:
            key = (self._pre[p], self._post[p])
            if key in seen:
                return False
            seen[key] = p
        return True

    def causal_closure(self) -> dict[str, frozenset[str]]:
        """For each node, the set of nodes reachable from it (including itself)."""
        out: dict[str, frozenset[str]] = {}
        for x in self.nodes():
            seen = {x}
            stack = [x]
            while stack:
                y = stack.pop()
                for z in self._post[y]:
                    if z not in seen:
                        seen.add(z)
                        stack.append(z)
            out[x] = frozenset(seen)
        return out

    def causal(self, x: str, y: str) -> bool:
        """True when ``(x, y)`` is in the reflexive transitive closure of the flow."""
        self._require(x)
        self._require(y)
        if x == y:
            return True
        seen = {x}
        stack = [x]
        while stack:
            z = stack.pop()
            for w in self._post[z]:
                if w == y:
                    return True
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    def conflict(self, x: str, y: str) -> bool:
        """True when distinct transitions sharing an input place precede x and y."""
        self._require(x)
        self._require(y)
        before_x = [t for t in self.transitions if self.causal(t, x)]
        before_y = [t for t in self.transitions if self.causal(t, y)]
        for tx in before_x:
            for ty in before_y:
                if tx != ty and (self._pre[tx] & self._pre[ty]):
                    return True
        return False

    def is_acyclic(self) -> bool:
        indeg = {x: len(self._pre[x]) for x in self.nodes()}
        queue = deque(x for x, d in indeg.items() if d == 0)
        seen = 0
        while queue:
            x = queue.popleft()
            seen += 1
            for y in self._post[x]:
                indeg[y] -= 1
                if indeg[y] == 0:
                    queue.append(y)
        return seen == len(indeg)

    def with_initial(self, initial: Marking) -> "PetriNet":
        return PetriNet(self.places, self.transitions, self.flow, initial)

    def renamed(self, mapping: Mapping[str, str]) -> "PetriNet":
        ren = lambda x: mapping.get(x, x)
        return PetriNet(
            (ren(p) for p in self.places),
            (ren(t) for t in self.transitions),
            ((ren(s), ren(d)) for s, d in self.flow),
            self.initial.rename(mapping),
        )

    def same_structure(self, other: "PetriNet") -> bool:
        return (
            self.places == other.places
            and self.transitions == other.transitions
            and self.flow == other.flow
            and self.initial == other.initial
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PetriNet) and self.same_structure(other)

    def __hash__(self) -> int:
        return hash((self.places, self.transitions, self.flow, self.initial))

    def __repr__(self) -> str:
        return (
            f"PetriNet(|P|={len(self.places)}, |T|={len(self.transitions)}, "
            f"|F|={len(self.flow)}, m0={self.initial})"
        )


@dataclass(frozen=True)
class SubnetView:
    """Fragment of a net generated by a node set, with its boundary elements."""

    places: frozenset[str]
    transitions: frozenset[str]
    flow: frozenset[tuple[str, str]]
    inputs: frozenset[str]
    outputs: frozenset[str]

    def nodes(self) -> frozenset[str]:
        return self.places | self.transitions

    def is_acyclic(self) -> bool:
        post: dict[str, set[str]] = {x: set() for x in self.nodes()}
        indeg: dict[str, int] = {x: 0 for x in self.nodes()}
        for s, d in self.flow:
            post[s].add(d)
            indeg[d] += 1
        queue = deque(x for x, d in indeg.items() if d == 0)
        seen = 0
        while queue:
            x = queue.popleft()
            seen += 1
            for y in post[x]:
                indeg[y] -= 1
                if indeg[y] == 0:
                    queue.append(y)
        return seen == len(indeg)


@dataclass
class ReachabilityGraph:
    """Explicit reachability graph with bounded exploration bookkeeping.

    ``vertices`` and ``edges`` are in deterministic discovery order.  When a
    marking strictly covering one of its own ancestors is produced, that
    branch stops and the pair is recorded in ``unbounded_witness``; the graph
    is then partial but the verdict "unbounded" is definite.  ``truncated``
    is set when the vertex limit or the per-place token cap stopped
    exploration without such a witness.
    """

    root: Marking
    vertices: tuple[Marking, ...]
    edges: tuple[tuple[Marking, str, Marking], ...]
    truncated: bool
    unbounded_witness: tuple[Marking, Marking] | None
    _parent: dict[Marking, tuple[Marking, str] | None] = field(repr=False, default_factory=dict)
    _succ: dict[Marking, tuple[tuple[str, Marking], ...]] = field(repr=False, default_factory=dict)

    @property
    def complete(self) -> bool:
        return not self.truncated and self.unbounded_witness is None

    def vertex_set(self) -> frozenset[Marking]:
        return frozenset(self.vertices)

    def successors(self, m: Marking) -> tuple[tuple[str, Marking], ...]:
        return self._succ.get(m, ())

    def path_to(self, m: Marking) -> list[str]:
        """Firing sequence from the root to a vertex of the graph."""
        if m not in self._parent:
            raise NodeNotFound(str(m))
        seq: list[str] = []
        cur = m
        while True:
            link = self._parent[cur]
            if link is None:
                break
            prev, t = link
            seq.append(t)
            cur = prev
        seq.reverse()
        return seq

    def deadlocks(self) -> tuple[Marking, ...]:
        return tuple(m for m in self.vertices if not self._succ.get(m))


def explore(
    net: PetriNet,
    cap: int = DEFAULT_CAP,
    limit: int = DEFAULT_LIMIT,
) -> ReachabilityGraph:
    """Breadth-first closure of the initial marking under the firing rule.

    Deterministic for equal inputs: transitions are tried in sorted order and
    vertices are kept in discovery order.
    """
    if cap < 1 or limit < 1:
        raise ValueError("cap and limit must be at least 1")
    order = sorted(net.transitions)
    root = net.initial
    parent: dict[Marking, tuple[Marking, str] | None] = {root: None}
    succ: dict[Marking, list[tuple[str, Marking]]] = {}
    vertices: list[Marking] = [root]
    edges: list[tuple[Marking, str, Marking]] = []
    truncated = False
    witness: tuple[Marking, Marking] | None = None
    over_cap = {root} if any(n > cap for _, n in root.items()) else set()
    queue = deque([root])
    while queue:
        m = queue.popleft()
        if m in over_cap:
            truncated = True
            continue
        succs: list[tuple[str, Marking]] = []
        for t in order:
            if not net.enabled(m, t):
                continue
            m2 = net.fire(m, t)
            is_new = m2 not in parent
            if is_new:
                parent[m2] = (m, t)
                vertices.append(m2)
            edges.append((m, t, m2))
            succs.append((t, m2))
            if not is_new:
                continue
            covered = _covered_ancestor(parent, m2)
            if covered is not None:
                if witness is None:
                    witness = (covered, m2)
                continue
            if any(n > cap for _, n in m2.items()):
                over_cap.add(m2)
                queue.append(m2)
                continue
            if len(vertices) >= limit:
                truncated = True
                continue
            queue.append(m2)
        succ[m] = succs
    return ReachabilityGraph(
        root=root,
        vertices=tuple(vertices),
        edges=tuple(edges),
        truncated=truncated and witness is None,
        unbounded_witness=witness,
        _parent=parent,
        _succ={m: tuple(s) for m, s in succ.items()},
    )


def _covered_ancestor(
    parent: dict[Marking, tuple[Marking, str] | None],
    m: Marking,
) -> Marking | None:
    link = parent[m]
    while link is not None:
        anc, _ = link
        if m.strictly_covers(anc):
            return anc
        link = parent[anc]
    return None


def is_safe(rg: ReachabilityGraph) -> bool:
    """Every reachable marking carries at most one token per place."""
    if not rg.complete:
        raise IncompleteExploration("cannot decide safety on a partial graph")
    return all(m.is_set() for m in rg.vertices)
