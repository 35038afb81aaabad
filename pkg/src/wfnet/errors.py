"""Exception hierarchy shared by all wfnet modules."""

from __future__ import annotations


class WfnetError(Exception):
    """Base class for all library errors."""


class NodeNotFound(WfnetError):
    """A node id was looked up in a net that does not contain it."""

    def __init__(self, name: str):
        super().__init__(f"unknown node: {name}")
        self.name = name


class InvalidNet(WfnetError):
    """A net violates a construction-time structural rule."""


class NotEnabled(WfnetError):
    """A transition was fired from a marking that does not enable it."""

    def __init__(self, transition: str, marking: str):
        super().__init__(f"transition {transition} not enabled at {marking}")
        self.transition = transition


class IncompleteExploration(WfnetError):
    """An analysis needed a complete reachability graph but got a partial one."""


class StructuralViolation(WfnetError):
    """Workflow-net structure rules are violated.

    ``violations`` is a list of ``(clause, nodes)`` pairs where ``clause`` is
    one of ``"1"`` (initial places), ``"2"`` (final places), ``"3"``
    (connectedness to initial/final places).
    """

    def __init__(self, violations: list[tuple[str, tuple[str, ...]]]):
        detail = "; ".join(f"clause {c}: {', '.join(ns)}" for c, ns in violations)
        super().__init__(f"not a workflow net ({detail})")
        self.violations = violations


class LabelViolation(WfnetError):
    """Transition/place labeling rules are violated.

    ``violations`` is a list of ``(clause, nodes)`` pairs; clauses are ``"1"``
    (bad async label), ``"2"`` (async and sync label on one transition),
    ``"3a"`` (missing or miswired channel place), ``"3b"`` (channel place with
    wrong neighborhood), ``"inj"`` (duplicate channel place), ``"marked"``
    (channel place in the initial or final marking), ``"ns"`` (a name used
    both as channel and as sync label).
    """

    def __init__(self, violations: list[tuple[str, tuple[str, ...]]]):
        detail = "; ".join(f"clause {c}: {', '.join(ns)}" for c, ns in violations)
        super().__init__(f"invalid labeling ({detail})")
        self.violations = violations


class ComponentsNotDisjoint(WfnetError):
    """Two nets to be composed share node names (auto-prefixing disabled)."""

    def __init__(self, shared: tuple[str, ...]):
        super().__init__(f"components share node names: {', '.join(shared)}")
        self.shared = shared


class ChannelNameCollision(WfnetError):
    """A channel place to be created clashes with an existing node name."""

    def __init__(self, names: tuple[str, ...]):
        super().__init__(f"channel names collide with nodes: {', '.join(names)}")
        self.names = names


class NotReachable(WfnetError):
    """A marking assumed reachable was not found in the explored state space."""


class UnsafeNet(WfnetError):
    """Unfolding found two concurrent tokens in one place of a supposedly safe net."""

    def __init__(self, place: str):
        super().__init__(f"net is not safe: place {place} carries concurrent tokens")
        self.place = place


class MapMismatch(WfnetError):
    """Two maps were composed but the range of one is not the domain of the other."""


class InvalidMorphism(WfnetError):
    """An operation requires a validated morphism but validation failed."""


class NotProperlyRefined(WfnetError):
    """Local nets were requested for a place that is not refined by a subnet."""

    def __init__(self, place: str):
        super().__init__(f"place {place} is not properly refined")
        self.place = place


class SourceNotSound(WfnetError):
    """Reflection checking requires a sound source net."""


class NonCommutingDiagram(WfnetError):
    """Composing two intermediate refinements produced a non-commuting square."""

    def __init__(self, node: str):
        super().__init__(f"diagram does not commute at node {node}")
        self.node = node


class ParseError(WfnetError):
    """A textual document could not be parsed; carries a 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
