"""Shared fixtures: the small example nets used throughout the suite."""

from __future__ import annotations

import pytest

from wfnet.compose import as_compose
from wfnet.labeled import LgwfNet, validate_lgwf
from wfnet.morphisms import Morphism
from wfnet.petri import Marking, PetriNet
from wfnet.refine import RefinementScenario
from wfnet.workflow import GwfNet, check_gwf


def build_gwf(places, transitions, flow, init, final) -> GwfNet:
    net = PetriNet(places, transitions, flow, Marking.of(*init))
    return check_gwf(net, Marking.of(*final))


def build_lgwf(places, transitions, flow, init, final, h=None, ell=None, k=None) -> LgwfNet:
    return validate_lgwf(
        build_gwf(places, transitions, flow, init, final), h or {}, ell or {}, k or {}
    )


@pytest.fixture
def chain() -> GwfNet:
    return build_gwf(["s", "f"], ["t"], [("s", "t"), ("t", "f")], ["s"], ["f"])


@pytest.fixture
def choice() -> GwfNet:
    return build_gwf(
        ["s", "f"],
        ["t1", "t2"],
        [("s", "t1"), ("t1", "f"), ("s", "t2"), ("t2", "f")],
        ["s"],
        ["f"],
    )


@pytest.fixture
def exchange_left() -> LgwfNet:
    # sends x, receives y, then synchronizes on s
    return build_lgwf(
        ["s1", "p1", "p2", "f1"],
        ["a", "c", "b"],
        [("s1", "a"), ("a", "p1"), ("p1", "c"), ("c", "p2"), ("p2", "b"), ("b", "f1")],
        ["s1"],
        ["f1"],
        h={"a": "x!", "c": "y?"},
        ell={"b": "s"},
    )


@pytest.fixture
def exchange_right() -> LgwfNet:
    # receives x, sends y, then synchronizes on s
    return build_lgwf(
        ["s2", "q1", "q2", "f2"],
        ["e", "g", "f"],
        [("s2", "e"), ("e", "q1"), ("q1", "g"), ("g", "q2"), ("q2", "f"), ("f", "f2")],
        ["s2"],
        ["f2"],
        h={"e": "x?", "g": "y!"},
        ell={"f": "s"},
    )


@pytest.fixture
def optional_sender() -> LgwfNet:
    # the send is optional: one branch skips d!
    return build_lgwf(
        ["s1", "f1"],
        ["a", "b"],
        [("s1", "a"), ("a", "f1"), ("s1", "b"), ("b", "f1")],
        ["s1"],
        ["f1"],
        h={"b": "d!"},
    )


@pytest.fixture
def optional_receiver() -> LgwfNet:
    return build_lgwf(
        ["i2", "f2"],
        ["r"],
        [("i2", "r"), ("r", "f2")],
        ["i2"],
        ["f2"],
        h={"r": "d?"},
    )


@pytest.fixture
def optional_composition(optional_sender, optional_receiver):
    return as_compose(optional_sender, optional_receiver)


def correlated_choice_nets(dead_branch: bool) -> tuple[GwfNet, GwfNet, Morphism]:
    """Place refinement with a correlated internal choice.

    The subnet forks into two lines whose continuation is chosen by one of
    two shared transitions, so only the aligned completions are reachable.
    With ``dead_branch`` the preimages of ``y`` consume misaligned
    completions and can never fire; otherwise they consume aligned ones.
    """
    if dead_branch:
        y_arcs = [("c1", "y1"), ("d2", "y1"), ("c2", "y2"), ("d1", "y2")]
    else:
        y_arcs = [("c1", "y1"), ("d1", "y1"), ("c2", "y2"), ("d2", "y2")]
    refined = build_gwf(
        ["p", "b1", "b2", "c1", "c2", "d1", "d2", "f1"],
        ["w", "v1", "v2", "x1", "x2", "y1", "y2"],
        [
            ("p", "w"), ("w", "b1"), ("w", "b2"),
            ("b1", "v1"), ("b2", "v1"), ("v1", "c1"), ("v1", "d1"),
            ("b1", "v2"), ("b2", "v2"), ("v2", "c2"), ("v2", "d2"),
            ("c1", "x1"), ("d1", "x1"), ("x1", "f1"),
            ("c2", "x2"), ("d2", "x2"), ("x2", "f1"),
            ("y1", "f1"), ("y2", "f1"),
        ]
        + y_arcs,
        ["p"],
        ["f1"],
    )
    abstract = build_gwf(
        ["p2", "f2"],
        ["x", "y"],
        [("p2", "x"), ("x", "f2"), ("p2", "y"), ("y", "f2")],
        ["p2"],
        ["f2"],
    )
    mapping = {
        "p": "p2", "b1": "p2", "b2": "p2", "c1": "p2", "c2": "p2",
        "d1": "p2", "d2": "p2", "w": "p2", "v1": "p2", "v2": "p2",
        "x1": "x", "x2": "x", "y1": "y", "y2": "y", "f1": "f2",
    }
    return refined, abstract, Morphism(source=refined, target=abstract, mapping=mapping)


@pytest.fixture
def dead_branch_refinement():
    return correlated_choice_nets(dead_branch=True)


@pytest.fixture
def live_branch_refinement():
    return correlated_choice_nets(dead_branch=False)


def chain_refinement_nets(token_misplaced: bool) -> tuple[object, GwfNet, Morphism]:
    """Two-place chain refining a single marked place."""
    abstract = build_gwf(
        ["p2", "f2"], ["w2"], [("p2", "w2"), ("w2", "f2")], ["p2"], ["f2"]
    )
    start = "q" if token_misplaced else "p"
    net = PetriNet(
        ["p", "q", "f1"],
        ["t", "w1"],
        [("p", "t"), ("t", "q"), ("q", "w1"), ("w1", "f1")],
        Marking.of(start),
    )
    source: object = net if token_misplaced else check_gwf(net, Marking.of("f1"))
    mapping = {"p": "p2", "q": "p2", "t": "p2", "w1": "w2", "f1": "f2"}
    return source, abstract, Morphism(source=source, target=abstract, mapping=mapping)


@pytest.fixture
def chain_refinement():
    return chain_refinement_nets(token_misplaced=False)


@pytest.fixture
def chain_refinement_misplaced():
    return chain_refinement_nets(token_misplaced=True)


@pytest.fixture
def exchange_scenario(exchange_left, exchange_right) -> RefinementScenario:
    """The composed interface of the exchange fixture, refined on both sides:
    one place of each component becomes a chain, and the right synchronizing
    transition splits into two copies."""
    r1 = build_lgwf(
        ["s1r", "p1a", "p1b", "p2r", "f1r"],
        ["ar", "u", "cr", "br"],
        [
            ("s1r", "ar"), ("ar", "p1a"), ("p1a", "u"), ("u", "p1b"),
            ("p1b", "cr"), ("cr", "p2r"), ("p2r", "br"), ("br", "f1r"),
        ],
        ["s1r"],
        ["f1r"],
        h={"ar": "x!", "cr": "y?"},
        ell={"br": "s"},
    )
    phi1 = Morphism(
        source=r1,
        target=exchange_left,
        mapping={
            "s1r": "s1", "ar": "a", "p1a": "p1", "u": "p1", "p1b": "p1",
            "cr": "c", "p2r": "p2", "br": "b", "f1r": "f1",
        },
    )
    r2 = build_lgwf(
        ["s2r", "q1a", "q1b", "q2r", "f2r"],
        ["er", "ti", "gr", "fA", "fB"],
        [
            ("s2r", "er"), ("er", "q1a"), ("q1a", "ti"), ("ti", "q1b"),
            ("q1b", "gr"), ("gr", "q2r"),
            ("q2r", "fA"), ("fA", "f2r"), ("q2r", "fB"), ("fB", "f2r"),
        ],
        ["s2r"],
        ["f2r"],
        h={"er": "x?", "gr": "y!"},
        ell={"fA": "s", "fB": "s"},
    )
    phi2 = Morphism(
        source=r2,
        target=exchange_right,
        mapping={
            "s2r": "s2", "er": "e", "q1a": "q1", "ti": "q1", "q1b": "q1",
            "gr": "g", "q2r": "q2", "fA": "f", "fB": "f", "f2r": "f2",
        },
    )
    return RefinementScenario(
        r1=r1, r2=r2, n1=exchange_left, n2=exchange_right, phi1=phi1, phi2=phi2
    )


@pytest.fixture
def sync_deadlock_pair() -> tuple[LgwfNet, LgwfNet]:
    """One side may choose a branch that skips the shared activity, leaving
    the other side waiting forever."""
    left = build_lgwf(
        ["s1", "pa", "pb", "f1"],
        ["a", "b", "ts", "u"],
        [
            ("s1", "a"), ("a", "pa"), ("s1", "b"), ("b", "pb"),
            ("pa", "ts"), ("ts", "f1"), ("pb", "u"), ("u", "f1"),
        ],
        ["s1"],
        ["f1"],
        ell={"ts": "sync"},
    )
    right = build_lgwf(
        ["s2", "f2"],
        ["g"],
        [("s2", "g"), ("g", "f2")],
        ["s2"],
        ["f2"],
        ell={"g": "sync"},
    )
    return left, right


@pytest.fixture
def unmatched_producer_pair() -> tuple[LgwfNet, LgwfNet]:
    """The sender can loop and push any number of messages into the channel."""
    left = build_lgwf(
        ["s1", "q1", "q2", "f1"],
        ["a", "d", "e", "x"],
        [
            ("s1", "a"), ("a", "q1"), ("q1", "d"), ("d", "q2"),
            ("q2", "e"), ("e", "q1"), ("q1", "x"), ("x", "f1"),
        ],
        ["s1"],
        ["f1"],
        h={"d": "m!"},
    )
    right = build_lgwf(
        ["s2", "f2"],
        ["h"],
        [("s2", "h"), ("h", "f2")],
        ["s2"],
        ["f2"],
        h={"h": "m?"},
    )
    return left, right
