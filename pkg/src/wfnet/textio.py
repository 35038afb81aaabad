"""Line-oriented net and morphism documents.

One declaration per line, ``#`` starts a comment, and every file opens with
the version line ``# wfnet v1``.  The serializer emits declarations sorted,
so serializing a parsed document is byte-stable and parse/serialize
round-trips exactly.

    net <name>
    place <id> [init] [final] [chan=<c>]
    trans <id> [async=<c>! | async=<c>?] [sync=<s>]
    arc <src> <dst>

Morphism documents name their nets and map every source node:

    morphism <source-net> -> <target-net>
    map <source-node> <target-node>
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .errors import ParseError
from .labeled import AsyncLabel, LgwfNet, validate_lgwf
from .morphisms import Morphism
from .petri import Marking, PetriNet, explore, is_valid_name
from .workflow import Witness, check_gwf

VERSION_LINE = "# wfnet v1"


@dataclass(frozen=True)
class NetDocument:
    name: str
    net: LgwfNet


@dataclass(frozen=True)
class MorphismDocument:
    source_name: str
    target_name: str
    mapping: Mapping[str, str]


def _lines(text: str) -> list[tuple[int, str]]:
    raw = text.splitlines()
    if not raw or raw[0].strip() != VERSION_LINE:
        raise ParseError(1, f"first line must be '{VERSION_LINE}'")
    out = []
    for i, line in enumerate(raw[1:], start=2):
        body = line.split("#", 1)[0].strip()
        if body:
            out.append((i, body))
    return out


def parse_net(text: str) -> NetDocument:
    """Parse and fully validate a net document.

    Parse errors carry line numbers; structural and labeling violations are
    raised from the validators and carry the violated clause.
    """
    name: str | None = None
    places: dict[str, int] = {}
    transitions: dict[str, int] = {}
    init: list[str] = []
    final: list[str] = []
    chan: dict[str, str] = {}
    h: dict[str, AsyncLabel] = {}
    ell: dict[str, str] = {}
    arcs: list[tuple[int, str, str]] = []

    for lineno, body in _lines(text):
        fields = body.split()
        kind, args = fields[0], fields[1:]
        if kind == "net":
            if name is not None:
                raise ParseError(lineno, "duplicate net declaration")
            if len(args) != 1:
                raise ParseError(lineno, "usage: net <name>")
            name = args[0]
        elif kind == "place":
            if not args:
                raise ParseError(lineno, "usage: place <id> [init] [final] [chan=<c>]")
            pid, *attrs = args
            if not is_valid_name(pid, allow_artificial=False):
                raise ParseError(lineno, f"bad place id {pid!r}")
            if pid in places or pid in transitions:
                raise ParseError(lineno, f"duplicate node {pid}")
            places[pid] = lineno
            for attr in attrs:
                if attr == "init":
                    init.append(pid)
                elif attr == "final":
                    final.append(pid)
                elif attr.startswith("chan="):
                    chan[pid] = attr[5:]
                else:
                    raise ParseError(lineno, f"unknown place attribute {attr!r}")
        elif kind == "trans":
            if not args:
                raise ParseError(lineno, "usage: trans <id> [async=...] [sync=...]")
            tid, *attrs = args
            if not is_valid_name(tid, allow_composite=True, allow_artificial=False):
                raise ParseError(lineno, f"bad transition id {tid!r}")
            if tid in places or tid in transitions:
                raise ParseError(lineno, f"duplicate node {tid}")
            transitions[tid] = lineno
            for attr in attrs:
                if attr.startswith("async="):
                    try:
                        h[tid] = AsyncLabel.parse(attr[6:])
                    except ValueError as exc:
                        raise ParseError(lineno, str(exc)) from None
                elif attr.startswith("sync="):
                    if not attr[5:]:
                        raise ParseError(lineno, "empty sync label")
                    ell[tid] = attr[5:]
                else:
                    raise ParseError(lineno, f"unknown transition attribute {attr!r}")
        elif kind == "arc":
            if len(args) != 2:
                raise ParseError(lineno, "usage: arc <src> <dst>")
            arcs.append((lineno, args[0], args[1]))
        else:
            raise ParseError(lineno, f"unknown declaration {kind!r}")

    if name is None:
        raise ParseError(1, "missing net declaration")
    # arcs may reference declarations appearing later in the file
    for lineno, src, dst in arcs:
        for node in (src, dst):
            if node not in places and node not in transitions:
                raise ParseError(lineno, f"arc references undeclared node {node}")
    # created channel places are named by their channel, so a channel name may
    # only ever be used by its own labeled place
    channel_names = {lbl.channel for lbl in h.values()} | set(chan.values())
    for c in sorted(channel_names):
        for node, lineno in list(places.items()) + list(transitions.items()):
            if node == c and chan.get(node) != c:
                raise ParseError(lineno, f"node {node} collides with channel name {c}")

    net = PetriNet(
        places, transitions, [(src, dst) for _, src, dst in arcs], Marking.of(*init)
    )
    gwf = check_gwf(net, Marking.of(*final))
    return NetDocument(name=name, net=validate_lgwf(gwf, h, ell, chan))


def serialize_net(doc: NetDocument) -> str:
    """Canonical byte-stable form: places, transitions, arcs, each sorted."""
    n = doc.net
    lines = [VERSION_LINE, f"net {doc.name}"]
    for p in sorted(n.net.places):
        attrs = []
        if p in n.initial:
            attrs.append("init")
        if p in n.final:
            attrs.append("final")
        if p in n.k:
            attrs.append(f"chan={n.k[p]}")
        lines.append(" ".join(["place", p] + attrs))
    for t in sorted(n.net.transitions):
        attrs = []
        if t in n.h:
            attrs.append(f"async={n.h[t]}")
        if t in n.ell:
            attrs.append(f"sync={n.ell[t]}")
        lines.append(" ".join(["trans", t] + attrs))
    for src, dst in sorted(n.net.flow):
        lines.append(f"arc {src} {dst}")
    return "\n".join(lines) + "\n"


def parse_morphism_document(text: str) -> MorphismDocument:
    header: tuple[str, str] | None = None
    mapping: dict[str, str] = {}
    for lineno, body in _lines(text):
        fields = body.split()
        if fields[0] == "morphism":
            if header is not None:
                raise ParseError(lineno, "duplicate morphism declaration")
            if len(fields) != 4 or fields[2] != "->":
                raise ParseError(lineno, "usage: morphism <source> -> <target>")
            header = (fields[1], fields[3])
        elif fields[0] == "map":
            if len(fields) != 3:
                raise ParseError(lineno, "usage: map <source-node> <target-node>")
            if fields[1] in mapping:
                raise ParseError(lineno, f"duplicate map entry for {fields[1]}")
            mapping[fields[1]] = fields[2]
        else:
            raise ParseError(lineno, f"unknown declaration {fields[0]!r}")
    if header is None:
        raise ParseError(1, "missing morphism declaration")
    return MorphismDocument(source_name=header[0], target_name=header[1], mapping=mapping)


def bind_morphism(
    doc: MorphismDocument,
    source: NetDocument,
    target: NetDocument,
) -> Morphism:
    """Attach a parsed morphism to its nets, checking names and totality."""
    if doc.source_name != source.name:
        raise ParseError(1, f"morphism source {doc.source_name} is not {source.name}")
    if doc.target_name != target.name:
        raise ParseError(1, f"morphism target {doc.target_name} is not {target.name}")
    src_nodes = source.net.net.nodes()
    tgt_nodes = target.net.net.nodes()
    unknown_src = sorted(set(doc.mapping) - src_nodes)
    if unknown_src:
        raise ParseError(1, f"map uses unknown source nodes: {', '.join(unknown_src)}")
    unknown_tgt = sorted(set(doc.mapping.values()) - tgt_nodes)
    if unknown_tgt:
        raise ParseError(1, f"map uses unknown target nodes: {', '.join(unknown_tgt)}")
    unmapped = sorted(src_nodes - set(doc.mapping))
    if unmapped:
        raise ParseError(1, f"map is not total, missing: {', '.join(unmapped)}")
    return Morphism(source=source.net, target=target.net, mapping=dict(doc.mapping))


def parse_morphism(text: str, source: NetDocument, target: NetDocument) -> Morphism:
    return bind_morphism(parse_morphism_document(text), source, target)


def serialize_morphism(doc: MorphismDocument) -> str:
    lines = [VERSION_LINE, f"morphism {doc.source_name} -> {doc.target_name}"]
    for src in sorted(doc.mapping):
        lines.append(f"map {src} {doc.mapping[src]}")
    return "\n".join(lines) + "\n"


SCENARIO_KEYS = ("r1", "r2", "n1", "n2", "phi1", "phi2")


def parse_scenario_manifest(text: str) -> dict[str, str]:
    """Paths of the six scenario inputs, keyed r1/r2/n1/n2/phi1/phi2."""
    seen: dict[str, str] = {}
    header = False
    for lineno, body in _lines(text):
        fields = body.split()
        if fields[0] == "scenario":
            header = True
            continue
        if fields[0] not in SCENARIO_KEYS:
            raise ParseError(lineno, f"unknown scenario key {fields[0]!r}")
        if len(fields) != 2:
            raise ParseError(lineno, f"usage: {fields[0]} <path>")
        if fields[0] in seen:
            raise ParseError(lineno, f"duplicate key {fields[0]}")
        seen[fields[0]] = fields[1]
    if not header:
        raise ParseError(1, "missing scenario declaration")
    missing = [key for key in SCENARIO_KEYS if key not in seen]
    if missing:
        raise ParseError(1, f"scenario is missing: {', '.join(missing)}")
    return seen


def load_scenario_files(manifest_path: str | Path) -> dict[str, str]:
    """Read the manifest and return the six input texts keyed like the manifest."""
    path = Path(manifest_path)
    entries = parse_scenario_manifest(path.read_text(encoding="utf-8"))
    out: dict[str, str] = {}
    for key, rel in entries.items():
        out[key] = (path.parent / rel).read_text(encoding="utf-8")
    return out


def render_witness(w: Witness) -> str:
    """Replayable witness text: a firing line and the marking it reaches."""
    if w.transition is not None:
        return f"dead {w.transition}\n"
    lines = ["fire " + " ".join(w.fire)]
    if w.marking is not None:
        lines.append(f"marking {w.marking}")
    if w.cover is not None:
        lines.append(f"covers {w.cover[0]}")
    return "\n".join(lines) + "\n"


def parse_marking(text: str) -> Marking:
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ParseError(1, f"bad marking text {text!r}")
    inner = body[1:-1].strip()
    counts: dict[str, int] = {}
    if inner:
        for part in inner.split(","):
            if ":" not in part:
                raise ParseError(1, f"bad marking entry {part!r}")
            place, _, num = part.rpartition(":")
            counts[place.strip()] = int(num)
    return Marking(counts)


def replay_witness(doc: NetDocument, witness_text: str) -> bool:
    """Re-run a printed witness against the net it came from."""
    net = doc.net.net
    lines = [ln.strip() for ln in witness_text.strip().splitlines() if ln.strip()]
    if not lines:
        return False
    if lines[0].startswith("dead "):
        t = lines[0].split()[1]
        rg = explore(net)
        return t in net.transitions and all(e[1] != t for e in rg.edges)
    if not lines[0].startswith("fire"):
        return False
    seq = lines[0].split()[1:]
    reached = net.fire_sequence(seq)
    for line in lines[1:]:
        if line.startswith("marking "):
            if parse_marking(line[len("marking "):]) != reached:
                return False
        elif line.startswith("covers "):
            if not reached.strictly_covers(parse_marking(line[len("covers "):])):
                return False
    return True


def render_dot(rg) -> str:
    """Graph-description text of a reachability graph."""
    lines = ["digraph reachability {"]
    index = {m: i for i, m in enumerate(rg.vertices)}
    for m, i in index.items():
        shape = "doublecircle" if m == rg.root else "circle"
        lines.append(f'  n{i} [label="{m}" shape={shape}];')
    for m, t, m2 in rg.edges:
        lines.append(f'  n{index[m]} -> n{index[m2]} [label="{t}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
