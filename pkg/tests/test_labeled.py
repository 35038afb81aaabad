"""Labeling axioms for interaction-annotated workflow nets."""

from __future__ import annotations

import pytest

from conftest import build_gwf, build_lgwf
from oracles import naive_fire
from wfnet.errors import LabelViolation
from wfnet.labeled import AsyncLabel, underlying, validate_lgwf


def internal_channel_net(**overrides):
    """Send on h, buffer place labeled h, receive on h, then an unmatched f!."""
    spec = dict(
        places=["s", "p1", "hbuf", "p2", "f"],
        transitions=["t1", "t2", "t3"],
        flow=[
            ("s", "t1"), ("t1", "p1"), ("t1", "hbuf"),
            ("p1", "t2"), ("hbuf", "t2"), ("t2", "p2"),
            ("p2", "t3"), ("t3", "f"),
        ],
        init=["s"],
        final=["f"],
        h={"t1": "h!", "t2": "h?", "t3": "f!"},
        k={"hbuf": "h"},
    )
    spec.update(overrides)
    return spec


class TestValidate:
    def test_internal_channel_valid(self):
        spec = internal_channel_net()
        n = build_lgwf(
            spec["places"], spec["transitions"], spec["flow"],
            spec["init"], spec["final"], h=spec["h"], k=spec["k"],
        )
        assert n.channel_place("h") == "hbuf"
        assert str(n.h["t1"]) == "h!"

    def test_unmatched_send_needs_no_place(self):
        # only f! appears: the complementary-pair clause binds nothing
        spec = internal_channel_net(h={"t1": "h!", "t2": "h?", "t3": "f!"})
        n = build_lgwf(
            spec["places"], spec["transitions"], spec["flow"],
            spec["init"], spec["final"], h=spec["h"], k=spec["k"],
        )
        assert n.channel_place("f") is None

    def test_async_and_sync_on_one_transition(self):
        spec = internal_channel_net()
        g = build_gwf(
            spec["places"], spec["transitions"], spec["flow"], spec["init"], spec["final"]
        )
        with pytest.raises(LabelViolation) as err:
            validate_lgwf(g, spec["h"], {"t1": "sy"}, spec["k"])
        assert any(clause == "2" for clause, _ in err.value.violations)

    def test_missing_channel_place(self):
        spec = internal_channel_net(k={})
        g = build_gwf(
            spec["places"], spec["transitions"], spec["flow"], spec["init"], spec["final"]
        )
        with pytest.raises(LabelViolation) as err:
            validate_lgwf(g, spec["h"], {}, {})
        assert any(clause == "3a" for clause, _ in err.value.violations)

    def test_parallel_connecting_place_may_be_the_channel(self):
        # p1 also connects t1 to t2; labeling it instead of hbuf is legal
        spec = internal_channel_net(k={"p1": "h"})
        n = build_lgwf(
            spec["places"], spec["transitions"], spec["flow"],
            spec["init"], spec["final"], h=spec["h"], k=spec["k"],
        )
        assert n.channel_place("h") == "p1"

    def test_channel_place_with_foreign_consumer(self):
        # p2 is fed by the receiver, not by senders: breaks the neighborhood rule
        spec = internal_channel_net(k={"p2": "h"})
        g = build_gwf(
            spec["places"], spec["transitions"], spec["flow"], spec["init"], spec["final"]
        )
        with pytest.raises(LabelViolation) as err:
            validate_lgwf(g, spec["h"], {}, spec["k"])
        assert any(clause == "3b" for clause, _ in err.value.violations)

    def test_duplicate_channel_rejected(self):
        spec = internal_channel_net()
        places = spec["places"] + ["hbuf2"]
        flow = spec["flow"] + [("t1", "hbuf2"), ("hbuf2", "t2")]
        g = build_gwf(places, spec["transitions"], flow, spec["init"], spec["final"])
        with pytest.raises(LabelViolation) as err:
            validate_lgwf(g, spec["h"], {}, {"hbuf": "h", "hbuf2": "h"})
        assert any(clause == "inj" for clause, _ in err.value.violations)

    def test_channel_name_clashing_with_sync_label(self):
        spec = internal_channel_net()
        g = build_gwf(
            spec["places"], spec["transitions"], spec["flow"], spec["init"], spec["final"]
        )
        with pytest.raises(LabelViolation) as err:
            validate_lgwf(g, {"t1": "h!", "t2": "h?"}, {"t3": "h"}, spec["k"])
        assert any(clause == "ns" for clause, _ in err.value.violations)

    def test_marked_channel_place_rejected(self):
        # workflow validation alone already excludes a marked channel place,
        # but a hand-built GwfNet must still get the dedicated diagnostic
        from wfnet.workflow import GwfNet

        g = build_gwf(
            ["s", "c", "f"],
            ["snd", "rcv"],
            [("s", "snd"), ("snd", "c"), ("c", "rcv"), ("rcv", "f")],
            ["s"],
            ["f"],
        )
        forced = GwfNet(
            net=g.net.with_initial(g.net.initial.add(["c"])), final=g.final
        )
        with pytest.raises(LabelViolation) as err:
            validate_lgwf(forced, {"snd": "h!", "rcv": "h?"}, {}, {"c": "h"})
        assert any(clause == "marked" for clause, _ in err.value.violations)

    def test_idempotent(self):
        spec = internal_channel_net()
        n = build_lgwf(
            spec["places"], spec["transitions"], spec["flow"],
            spec["init"], spec["final"], h=spec["h"], k=spec["k"],
        )
        again = validate_lgwf(n.gwf, n.h, n.ell, n.k)
        assert again == n


class TestLabels:
    def test_channel_of(self):
        assert AsyncLabel.parse("x!").channel == "x"
        assert AsyncLabel.parse("x?").channel == "x"

    def test_complement(self):
        assert AsyncLabel.parse("c!").complement() == AsyncLabel.parse("c?")
        lbl = AsyncLabel.parse("c?")
        assert lbl.complement().complement() == lbl

    def test_bad_labels(self):
        with pytest.raises(ValueError):
            AsyncLabel.parse("c")
        with pytest.raises(ValueError):
            AsyncLabel.parse("!")


class TestUnderlying:
    def test_structure_kept_labels_gone(self):
        spec = internal_channel_net()
        n = build_lgwf(
            spec["places"], spec["transitions"], spec["flow"],
            spec["init"], spec["final"], h=spec["h"], k=spec["k"],
        )
        g = underlying(n)
        assert g.net.same_structure(n.net)
        relabeled = validate_lgwf(g, n.h, n.ell, n.k)
        assert relabeled.net.same_structure(n.net)


class TestSendReceiveCounting:
    def test_sends_never_trail_receives(self):
        spec = internal_channel_net()
        n = build_lgwf(
            spec["places"], spec["transitions"], spec["flow"],
            spec["init"], spec["final"], h=spec["h"], k=spec["k"],
        )
        net = n.net
        start = {p: net.initial.count(p) for p in net.initial.places()}
        stack = [(start, ())]
        seen = 0
        while stack:
            counts, seq = stack.pop()
            seen += 1
            sends = sum(1 for t in seq if t in n.h and n.h[t].is_send)
            recvs = sum(1 for t in seq if t in n.h and not n.h[t].is_send)
            assert sends >= recvs
            if len(seq) >= 12:
                continue
            for t in sorted(net.transitions):
                nxt = naive_fire(net, counts, t)
                if nxt is not None:
                    stack.append((nxt, seq + (t,)))
        assert seen > 1
