"""Intermediate refinements, certification, and refinement composition."""

from __future__ import annotations

import random

from conftest import build_lgwf
from generators import as_morphism, gen_interface_pair, refine_net
from wfnet.compose import as_compose
from wfnet.isomorphism import find_isomorphism, isomorphic
from wfnet.morphisms import Morphism, check_alpha_hat
from wfnet.refine import (
    RefinementScenario,
    certify,
    compose_refinements,
    intermediate_refinement,
)
from wfnet.workflow import check_soundness


def renamed_copy(n, prefix):
    """Disjoint copy plus the renaming morphism onto the original."""
    mapping = {x: f"{prefix}{x}" for x in n.net.nodes()}
    net = n.net.renamed(mapping)
    from wfnet.labeled import validate_lgwf
    from wfnet.workflow import check_gwf

    gwf = check_gwf(net, n.final.rename(mapping))
    copy = validate_lgwf(
        gwf,
        {mapping[t]: lbl for t, lbl in n.h.items()},
        {mapping[t]: s for t, s in n.ell.items()},
        {mapping[p]: c for p, c in n.k.items()},
    )
    back = Morphism(
        source=copy, target=n, mapping={v: k for k, v in mapping.items()}
    )
    return copy, back


class TestIntermediateRefinement:
    def test_identity_scenario_collapses(self, exchange_left, exchange_right):
        r1, phi1 = renamed_copy(exchange_left, "r_")
        r2, phi2 = renamed_copy(exchange_right, "q_")
        s = RefinementScenario(
            r1=r1, r2=r2, n1=exchange_left, n2=exchange_right, phi1=phi1, phi2=phi2
        )
        left = intermediate_refinement(s, "left")
        assert left.valid
        assert isomorphic(left.composition.result, left.interface.result)

    def test_literal_identity_morphism(self, exchange_left, exchange_right):
        # r1 is n1 itself: the intermediate net is the interface, the induced
        # map the identity
        s = RefinementScenario(
            r1=exchange_left, r2=exchange_right, n1=exchange_left, n2=exchange_right,
            phi1=Morphism.identity(exchange_left), phi2=Morphism.identity(exchange_right),
        )
        left = intermediate_refinement(s, "left")
        assert left.valid
        assert left.composition.result.net == left.interface.result.net
        assert all(a == b for a, b in left.morphism.mapping.items())

    def test_fixture_both_sides_valid(self, exchange_scenario):
        left = intermediate_refinement(exchange_scenario, "left")
        right = intermediate_refinement(exchange_scenario, "right")
        assert left.valid and not left.arc_reflection_failures
        assert right.valid and not right.arc_reflection_failures
        # the refined sync copies pair with their partner and map onto (b,f)
        sync_nodes = [
            n for n, p in right.composition.provenance.items() if p.kind == "sync"
        ]
        assert sorted(sync_nodes) == ["(b,fA)", "(b,fB)"]
        assert all(
            right.morphism.mapping[n] == "(b,f)" for n in sync_nodes
        )

    def test_intermediate_soundness(self, exchange_scenario):
        left = intermediate_refinement(exchange_scenario, "left")
        assert check_soundness(left.composition.result.gwf).sound


class TestCertify:
    def test_fixture_certified_with_audit(self, exchange_scenario):
        cert = certify(exchange_scenario, audit=True)
        assert cert.certified
        assert cert.audit is not None and cert.audit.verdict == "sound"
        assert "certified" in cert.conclusion()
        data = cert.to_dict()
        assert data["certified"] is True and data["audit"] == "sound"

    def test_unsound_interface_refused(self, optional_sender, optional_receiver):
        r1, phi1 = renamed_copy(optional_sender, "r_")
        r2, phi2 = renamed_copy(optional_receiver, "q_")
        s = RefinementScenario(
            r1=r1, r2=r2, n1=optional_sender, n2=optional_receiver, phi1=phi1, phi2=phi2
        )
        cert = certify(s)
        assert not cert.certified
        assert cert.failed_premises() == ("interface-sound",)

    def test_unsound_component_refused(self, exchange_left, exchange_right):
        r1, phi1 = renamed_copy(exchange_left, "r_")
        # plant a dead transition in the refined component
        from wfnet.labeled import validate_lgwf
        from wfnet.petri import PetriNet
        from wfnet.workflow import check_gwf

        net = r1.net
        dead_arcs = set(net.flow) | {("r_s1", "tdead"), ("r_p2", "tdead"), ("tdead", "r_f1")}
        broken_net = PetriNet(
            net.places, set(net.transitions) | {"tdead"}, dead_arcs, net.initial
        )
        broken = validate_lgwf(
            check_gwf(broken_net, r1.final), dict(r1.h), dict(r1.ell), dict(r1.k)
        )
        phi1 = Morphism(
            source=broken, target=exchange_left,
            mapping={**dict(phi1.mapping), "tdead": "a"},
        )
        r2, phi2 = renamed_copy(exchange_right, "q_")
        s = RefinementScenario(
            r1=broken, r2=r2, n1=exchange_left, n2=exchange_right, phi1=phi1, phi2=phi2
        )
        cert = certify(s)
        assert not cert.certified
        assert "r1-sound" in cert.failed_premises()

    def test_failed_local_condition_named(self, dead_branch_refinement, live_branch_refinement, chain):
        refined, abstract, phi = dead_branch_refinement
        from wfnet.labeled import validate_lgwf

        r1 = validate_lgwf(refined, {}, {}, {})
        n1 = validate_lgwf(abstract, {}, {}, {})
        phi1 = Morphism(source=r1, target=n1, mapping=dict(phi.mapping))
        n2 = build_lgwf(
            ["es", "ef"], ["et"], [("es", "et"), ("et", "ef")], ["es"], ["ef"]
        )
        r2, phi2 = renamed_copy(n2, "z_")
        s = RefinementScenario(r1=r1, r2=r2, n1=n1, n2=n2, phi1=phi1, phi2=phi2)
        cert = certify(s)
        assert not cert.certified
        failed = cert.failed_premises()
        assert "phi1-local-condition" in failed
        assert "r1-sound" in failed  # dead transitions also break the component
        # the failing place and uncovered abstract transition are reported
        entry = cert.local_condition_reports["phi1"].entries["p2"]
        assert entry.uncovered_transitions == ("y",)

    def test_generated_scenarios_certify_and_audit(self):
        rng = random.Random(79)
        done = 0
        while done < 8:
            n1, n2 = gen_interface_pair(rng, done)
            if not check_soundness(as_compose(n1, n2).result.gwf).sound:
                continue
            r1 = refine_net(rng, n1, f"R{done}_", moves=2)
            r2 = refine_net(rng, n2, f"Q{done}_", moves=2)
            s = RefinementScenario(
                r1=r1.net, r2=r2.net, n1=n1, n2=n2,
                phi1=as_morphism(r1, n1), phi2=as_morphism(r2, n2),
            )
            cert = certify(s, audit=True)
            assert cert.certified, cert.failed_premises()
            assert cert.audit.verdict == "sound"
            # channel arcs are reflected on both intermediate refinements
            for side in ("left", "right"):
                inter = intermediate_refinement(s, side)
                assert inter.valid
                assert not inter.arc_reflection_failures
            done += 1


class TestComposeRefinements:
    def test_identity_sides_give_interface(self, exchange_left, exchange_right):
        r1, phi1 = renamed_copy(exchange_left, "r_")
        r2, phi2 = renamed_copy(exchange_right, "q_")
        s = RefinementScenario(
            r1=r1, r2=r2, n1=exchange_left, n2=exchange_right, phi1=phi1, phi2=phi2
        )
        left = intermediate_refinement(s, "left")
        right = intermediate_refinement(s, "right")
        composed = compose_refinements(left, right)
        assert isomorphic(composed.net, left.interface.result)

    def test_one_sided_refinement(self, exchange_scenario, exchange_left, exchange_right):
        r2, phi2 = renamed_copy(exchange_right, "q_")
        one_sided = RefinementScenario(
            r1=exchange_scenario.r1, r2=r2, n1=exchange_left, n2=exchange_right,
            phi1=exchange_scenario.phi1, phi2=phi2,
        )
        left = intermediate_refinement(one_sided, "left")
        right = intermediate_refinement(one_sided, "right")
        composed = compose_refinements(left, right)
        assert isomorphic(composed.net, left.composition.result)

    def test_matches_direct_composition(self, exchange_scenario):
        left = intermediate_refinement(exchange_scenario, "left")
        right = intermediate_refinement(exchange_scenario, "right")
        composed = compose_refinements(left, right)
        direct = as_compose(exchange_scenario.r1, exchange_scenario.r2)
        iso = find_isomorphism(composed.net, direct.result)
        assert iso is not None
        assert all(a == b for a, b in iso.items())  # node-for-node

    def test_diagram_commutes_pointwise(self, exchange_scenario):
        left = intermediate_refinement(exchange_scenario, "left")
        right = intermediate_refinement(exchange_scenario, "right")
        composed = compose_refinements(left, right)
        lmap = left.morphism.mapping
        rmap = right.morphism.mapping
        for node in composed.net.net.nodes():
            via_left = lmap[composed.to_left.mapping[node]]
            via_right = rmap[composed.to_right.mapping[node]]
            assert via_left == via_right

    def test_projections_are_label_respecting(self, exchange_scenario):
        left = intermediate_refinement(exchange_scenario, "left")
        right = intermediate_refinement(exchange_scenario, "right")
        composed = compose_refinements(left, right)
        assert check_alpha_hat(composed.to_left).valid
        assert check_alpha_hat(composed.to_right).valid
