"""Workflow-net composition, abstraction morphisms, and soundness certification."""

from .errors import WfnetError
from .petri import Marking, PetriNet, ReachabilityGraph, explore, is_safe
from .workflow import (
    GwfNet,
    SequentialComponent,
    SoundnessReport,
    check_gwf,
    check_soundness,
    find_sequential_cover,
    is_smd,
)
from .labeled import AsyncLabel, LgwfNet, underlying, validate_lgwf
from .compose import Composition, as_compose, decompose_marking, p_simplify
from .unfolding import BranchingProcess, OccurrenceNet, folding, unfold
from .morphisms import (
    Morphism,
    MorphismReport,
    check_alpha,
    check_alpha_hat,
    check_local_condition,
    check_preservation,
    check_reflection,
    check_well_marked,
    properly_refined_places,
)
from .refine import (
    Certificate,
    RefinementScenario,
    certify,
    compose_refinements,
    intermediate_refinement,
)
from .isomorphism import find_isomorphism, isomorphic
from .textio import parse_morphism, parse_net, serialize_net

__all__ = [
    "AsyncLabel",
    "BranchingProcess",
    "Certificate",
    "Composition",
    "GwfNet",
    "LgwfNet",
    "Marking",
    "Morphism",
    "MorphismReport",
    "OccurrenceNet",
    "PetriNet",
    "ReachabilityGraph",
    "RefinementScenario",
    "SequentialComponent",
    "SoundnessReport",
    "WfnetError",
    "as_compose",
    "certify",
    "check_alpha",
    "check_alpha_hat",
    "check_gwf",
    "check_local_condition",
    "check_preservation",
    "check_reflection",
    "check_soundness",
    "check_well_marked",
    "compose_refinements",
    "decompose_marking",
    "explore",
    "find_isomorphism",
    "find_sequential_cover",
    "folding",
    "intermediate_refinement",
    "is_safe",
    "is_smd",
    "isomorphic",
    "p_simplify",
    "parse_morphism",
    "parse_net",
    "properly_refined_places",
    "serialize_net",
    "underlying",
    "unfold",
    "validate_lgwf",
]

__version__ = "0.1.0"
