"""Workflow nets with interaction labels.

Transitions may carry either an asynchronous label (send ``c!`` or receive
``c?`` on a channel) or a synchronous activity label, never both.  A place
may be labeled with a channel name; such a place wires every sender of the
channel to every receiver and is unique per channel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import LabelViolation, NodeNotFound
from .petri import Marking
from .workflow import GwfNet

SEND = "!"
RECEIVE = "?"


@dataclass(frozen=True)
class AsyncLabel:
    """A send (``c!``) or receive (``c?``) action on channel ``c``."""

    channel: str
    direction: str  # SEND or RECEIVE

    def __post_init__(self):
        if not self.channel or any(ch.isspace() for ch in self.channel):
            raise ValueError(f"bad channel name: {self.channel!r}")
        if self.direction not in (SEND, RECEIVE):
            raise ValueError(f"bad direction: {self.direction!r}")

    @classmethod
    def parse(cls, text: str) -> "AsyncLabel":
        if len(text) < 2 or text[-1] not in (SEND, RECEIVE):
            raise ValueError(f"bad async label: {text!r}")
        return cls(channel=text[:-1], direction=text[-1])

    @property
    def is_send(self) -> bool:
        return self.direction == SEND

    def complement(self) -> "AsyncLabel":
        flipped = RECEIVE if self.direction == SEND else SEND
        return AsyncLabel(self.channel, flipped)

    def __str__(self) -> str:
        return f"{self.channel}{self.direction}"


def channel_of(label: AsyncLabel) -> str:
    return label.channel


def complement(label: AsyncLabel) -> AsyncLabel:
    return label.complement()


@dataclass(frozen=True)
class LgwfNet:
    """A labeled workflow net.

    ``h`` maps transitions to async labels, ``ell`` to sync activities, and
    ``k`` places to channel names.  Construct through :func:`validate_lgwf`.
    """

    gwf: GwfNet
    h: Mapping[str, AsyncLabel] = field(default_factory=dict)
    ell: Mapping[str, str] = field(default_factory=dict)
    k: Mapping[str, str] = field(default_factory=dict)

    @property
    def net(self):
        return self.gwf.net

    @property
    def initial(self) -> Marking:
        return self.gwf.net.initial

    @property
    def final(self) -> Marking:
        return self.gwf.final

    def channel_place(self, channel: str) -> str | None:
        for p, c in self.k.items():
            if c == channel:
                return p
        return None

    def channels_used(self) -> frozenset[str]:
        return frozenset(lbl.channel for lbl in self.h.values())

    def sync_labels_used(self) -> frozenset[str]:
        return frozenset(self.ell.values())


def validate_lgwf(
    g: GwfNet,
    h: Mapping[str, AsyncLabel] | Mapping[str, str] = (),
    ell: Mapping[str, str] = (),
    k: Mapping[str, str] = (),
) -> LgwfNet:
    """Check the labeling axioms and return the labeled net.

    Violations are collected and raised together; see
    :class:`~wfnet.errors.LabelViolation` for clause codes.  Channel places
    must start and end empty, and channel names must not double as sync
    labels.
    """
    net = g.net
    h_map: dict[str, AsyncLabel] = {}
    for t, lbl in dict(h).items():
        h_map[t] = lbl if isinstance(lbl, AsyncLabel) else AsyncLabel.parse(lbl)
    ell_map = dict(ell)
    k_map = dict(k)
    for t in list(h_map) + list(ell_map):
        if t not in net.transitions:
            raise NodeNotFound(t)
    for p in k_map:
        if p not in net.places:
            raise NodeNotFound(p)

    violations: list[tuple[str, tuple[str, ...]]] = []
    both = tuple(sorted(set(h_map) & set(ell_map)))
    if both:
        violations.append(("2", both))

    by_channel: dict[str, str] = {}
    for p in sorted(k_map):
        c = k_map[p]
        if c in by_channel:
            violations.append(("inj", (by_channel[c], p)))
        else:
            by_channel[c] = p

    senders: dict[str, list[str]] = {}
    receivers: dict[str, list[str]] = {}
    for t in sorted(h_map):
        lbl = h_map[t]
        (senders if lbl.is_send else receivers).setdefault(lbl.channel, []).append(t)

    # Each complementary pair must be wired through the channel place.
    for c in sorted(set(senders) & set(receivers)):
        p = by_channel.get(c)
        if p is None:
            violations.append(("3a", tuple(senders[c] + receivers[c])))
            continue
        for t1 in senders[c]:
            if (t1, p) not in net.flow:
                violations.append(("3a", (t1, p)))
        for t2 in receivers[c]:
            if (p, t2) not in net.flow:
                violations.append(("3a", (p, t2)))

    for p in sorted(k_map):
        c = k_map[p]
        pre, post = net.preset(p), net.postset(p)
        pre_ok = bool(pre) and all(t in h_map and h_map[t] == AsyncLabel(c, SEND) for t in pre)
        post_ok = bool(post) and all(t in h_map and h_map[t] == AsyncLabel(c, RECEIVE) for t in post)
        if not (pre_ok and post_ok):
            violations.append(("3b", (p,)))
        if p in net.initial or p in g.final:
            violations.append(("marked", (p,)))

    channel_names = set(by_channel) | {lbl.channel for lbl in h_map.values()}
    shared_names = tuple(sorted(channel_names & set(ell_map.values())))
    if shared_names:
        violations.append(("ns", shared_names))

    if violations:
        raise LabelViolation(violations)
    return LgwfNet(gwf=g, h=h_map, ell=ell_map, k=k_map)


def underlying(n: LgwfNet) -> GwfNet:
    """The same structure with all labels erased."""
    return n.gwf
