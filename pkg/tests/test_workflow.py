"""Workflow-net validation, soundness, and sequential-component covers."""

from __future__ import annotations

import random

import pytest

from conftest import build_gwf
from generators import gen_sound_gwf, mutate_gwf
from oracles import oracle_sequential_cover_exists, oracle_soundness
from wfnet.compose import as_compose
from wfnet.errors import StructuralViolation
from wfnet.petri import Marking, PetriNet, explore, is_safe
from wfnet.workflow import (
    check_gwf,
    check_soundness,
    find_sequential_cover,
    is_sequential_component,
    is_smd,
)


class TestCheckGwf:
    def test_chain_valid(self, chain):
        assert chain.final == Marking.of("f")

    def test_final_with_outputs_rejected(self):
        net = PetriNet(["s", "f"], ["t"], [("s", "t"), ("t", "f")], Marking.of("s"))
        with pytest.raises(StructuralViolation) as err:
            check_gwf(net, Marking.of("s"))
        assert any(clause == "2" for clause, _ in err.value.violations)

    def test_initial_with_inputs_rejected(self):
        net = PetriNet(
            ["s", "p", "f"], ["t", "u"],
            [("s", "t"), ("t", "p"), ("p", "u"), ("u", "f")],
            Marking.of("p"),
        )
        with pytest.raises(StructuralViolation) as err:
            check_gwf(net, Marking.of("f"))
        assert any(clause == "1" for clause, _ in err.value.violations)

    def test_node_off_path_rejected(self):
        # a detached cycle lies on no initial-to-final path
        net = PetriNet(
            ["s", "f", "p1", "p2"],
            ["t", "u1", "u2"],
            [
                ("s", "t"), ("t", "f"),
                ("p1", "u1"), ("u1", "p2"), ("p2", "u2"), ("u2", "p1"),
            ],
            Marking.of("s"),
        )
        with pytest.raises(StructuralViolation) as err:
            check_gwf(net, Marking.of("f"))
        clauses = {clause for clause, _ in err.value.violations}
        assert "3" in clauses
        offending = {n for clause, ns in err.value.violations if clause == "3" for n in ns}
        assert {"p1", "p2", "u1", "u2"} <= offending

    def test_empty_final_rejected(self, chain):
        with pytest.raises(StructuralViolation):
            check_gwf(chain.net, Marking())


class TestSoundness:
    def test_chain_sound(self, chain):
        assert check_soundness(chain).sound

    def test_optional_send_composition_unsound(self, optional_composition):
        report = check_soundness(optional_composition.result.gwf)
        assert report.verdict == "unsound"
        assert report.violated_clause == "1"
        # stuck with the receiver still in its initial place
        assert report.witness.marking == Marking.of("f1", "i2")
        replayed = optional_composition.result.net.fire_sequence(report.witness.fire)
        assert replayed == report.witness.marking

    def test_dead_transition_clause3(self, dead_branch_refinement):
        refined, _, _ = dead_branch_refinement
        report = check_soundness(refined)
        assert report.verdict == "unsound"
        assert report.violated_clause == "3"
        assert report.witness.transition in {"y1", "y2"}

    def test_unbounded_is_unsound_clause1(self, unmatched_producer_pair):
        left, right = unmatched_producer_pair
        comp = as_compose(left, right)
        report = check_soundness(comp.result.gwf)
        assert report.verdict == "unsound" and report.violated_clause == "1"
        assert report.witness.cover is not None

    def test_witness_ends_outside_backward_closure(self):
        rng = random.Random(3)
        found = 0
        for i in range(60):
            g = gen_sound_gwf(rng, f"w{i}_", moves=2)
            m = mutate_gwf(rng, g)
            if m is None:
                continue
            report = check_soundness(m, cap=30)
            if report.verdict == "unsound" and report.violated_clause == "1":
                found += 1
                stuck = m.net.fire_sequence(report.witness.fire)
                assert stuck == report.witness.marking
                if report.witness.cover is None:
                    # from the witness, the final marking is unreachable
                    sub = explore(m.net.with_initial(stuck), cap=30)
                    assert m.final not in sub.vertex_set()
        assert found >= 1

    def test_sound_nets_have_unique_dead_marking(self):
        rng = random.Random(5)
        for i in range(20):
            g = gen_sound_gwf(rng, f"dm{i}_", moves=3)
            rg = explore(g.net)
            assert set(rg.deadlocks()) == {g.final}

    def test_truncated_exploration_is_inconclusive(self):
        from wfnet.errors import IncompleteExploration

        rng = random.Random(8)
        g = gen_sound_gwf(rng, "tr_", moves=4)
        with pytest.raises(IncompleteExploration):
            check_soundness(g, limit=2)

    def test_agrees_with_oracle(self):
        rng = random.Random(9)
        checked = 0
        while checked < 60:
            g = gen_sound_gwf(rng, f"or{checked}_", moves=2)
            if rng.random() < 0.5:
                m = mutate_gwf(rng, g)
                if m is None:
                    continue
                g = m
            expected = oracle_soundness(g)
            if expected is None:
                continue
            assert check_soundness(g, cap=40).verdict == expected
            checked += 1


class TestSequentialCover:
    def test_state_machine_is_its_own_cover(self, choice):
        cover = find_sequential_cover(choice.net)
        assert cover is not None
        assert {p for comp in cover for p in comp.places} == choice.net.places

    def test_parallel_chains_need_two_components(self):
        g = build_gwf(
            ["s", "a1", "a2", "b1", "b2", "f"],
            ["tf", "ta", "tb", "tj"],
            [
                ("s", "tf"), ("tf", "a1"), ("tf", "b1"),
                ("a1", "ta"), ("ta", "a2"),
                ("b1", "tb"), ("tb", "b2"),
                ("a2", "tj"), ("b2", "tj"), ("tj", "f"),
            ],
            ["s"],
            ["f"],
        )
        cover = find_sequential_cover(g.net)
        assert cover is not None and len(cover) >= 2
        for comp in cover:
            assert is_sequential_component(g.net, comp.places)

    def test_channel_place_not_coverable(self, optional_composition):
        net = optional_composition.result.net
        assert find_sequential_cover(net) is None
        assert not is_smd(net)
        assert oracle_sequential_cover_exists(net) is False

    def test_agrees_with_subset_oracle(self):
        rng = random.Random(21)
        agreements = 0
        negatives = 0
        attempts = 0
        while agreements < 40:
            attempts += 1
            assert attempts < 400
            g = gen_sound_gwf(rng, f"sc{attempts}_", moves=2)
            if rng.random() < 0.6:
                m = mutate_gwf(rng, g)
                if m is not None:
                    g = m
            if len(g.net.places) > 10:
                continue
            expected = oracle_sequential_cover_exists(g.net)
            if expected is None:
                continue
            assert is_smd(g.net) == expected, attempts
            agreements += 1
            if not expected:
                negatives += 1
        assert negatives >= 1

    def test_smd_gwf_nets_are_safe(self):
        rng = random.Random(25)
        for i in range(25):
            g = gen_sound_gwf(rng, f"sf{i}_", moves=3, allow_loop=(i % 4 == 0))
            if is_smd(g.net):
                assert is_safe(explore(g.net))
