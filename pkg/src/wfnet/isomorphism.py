"""Exact isomorphism of labeled nets by signature refinement plus backtracking.

Nodes are partitioned by (kind, labels, marking membership, degrees); the
partition is refined by neighbor-class multisets until stable, then a
backtracking search assigns nodes class by class.  Exponential in the worst
case, which is acceptable at desk scale.
"""

from __future__ import annotations

from collections import Counter
from .labeled import LgwfNet
from .petri import Marking, PetriNet
from .workflow import GwfNet


def _view(n) -> tuple[PetriNet, Marking | None, dict, dict, dict]:
    if isinstance(n, LgwfNet):
        return n.net, n.final, dict(n.h), dict(n.ell), dict(n.k)
    if isinstance(n, GwfNet):
        return n.net, n.final, {}, {}, {}
    return n, None, {}, {}, {}


def _signatures(n) -> dict[str, tuple]:
    net, final, h, ell, k = _view(n)
    sig: dict[str, tuple] = {}
    for x in net.nodes():
        sig[x] = (
            net.kind(x),
            str(h.get(x, "")),
            ell.get(x, ""),
            k.get(x, ""),
            net.initial.count(x) if x in net.places else 0,
            final.count(x) if final is not None and x in net.places else 0,
            len(net.preset(x)),
            len(net.postset(x)),
        )
    return sig


def _refine(net: PetriNet, sig: dict[str, tuple]) -> dict[str, tuple]:
    while True:
        classes: dict[tuple, int] = {}
        for s in sorted(set(sig.values())):
            classes[s] = len(classes)
        new_sig = {}
        for x in net.nodes():
            pre = tuple(sorted(Counter(classes[sig[y]] for y in net.preset(x)).items()))
            post = tuple(sorted(Counter(classes[sig[y]] for y in net.postset(x)).items()))
            new_sig[x] = (classes[sig[x]], pre, post)
        if len(set(new_sig.values())) == len(set(sig.values())):
            return sig
        sig = new_sig


def find_isomorphism(a, b) -> dict[str, str] | None:
    """A structure, marking, and label preserving bijection, or None."""
    net_a, final_a, *_ = _view(a)
    net_b, final_b, *_ = _view(b)
    if (
        len(net_a.places) != len(net_b.places)
        or len(net_a.transitions) != len(net_b.transitions)
        or len(net_a.flow) != len(net_b.flow)
    ):
        return None
    sig_a = _refine(net_a, _signatures(a))
    sig_b = _refine(net_b, _signatures(b))
    if sorted(Counter(sig_a.values()).items()) != sorted(Counter(sig_b.values()).items()):
        return None
    by_class: dict[tuple, list[str]] = {}
    for x, s in sig_b.items():
        by_class.setdefault(s, []).append(x)
    for xs in by_class.values():
        xs.sort()
    # most constrained first: smallest class, then name for determinism
    order = sorted(net_a.nodes(), key=lambda x: (len(by_class[sig_a[x]]), x))
    assignment: dict[str, str] = {}
    used: set[str] = set()

    def consistent(x: str, y: str) -> bool:
        for z in net_a.preset(x):
            if z in assignment and assignment[z] not in net_b.preset(y):
                return False
        for z in net_a.postset(x):
            if z in assignment and assignment[z] not in net_b.postset(y):
                return False
        return True

    def backtrack(i: int) -> bool:
        if i == len(order):
            return True
        x = order[i]
        for y in by_class[sig_a[x]]:
            if y in used or not consistent(x, y):
                continue
            assignment[x] = y
            used.add(y)
            if backtrack(i + 1):
                return True
            del assignment[x]
            used.discard(y)
        return False

    if not backtrack(0):
        return None
    # full adjacency check seals partial consistency pruning
    for s, d in net_a.flow:
        if (assignment[s], assignment[d]) not in net_b.flow:
            return None
    return dict(assignment)


def isomorphic(a, b) -> bool:
    return find_isomorphism(a, b) is not None
