"""Decision procedures on a labelled graph: hyperbolicity, finiteness,
virtual cyclicity, virtual-surface shape, splittings, and coarse
separability by subexponential families, each as a total function
returning a verdict with a witness and the rules applied.

Verdicts are tri-state.  'undecided' occurs only when an abstract label's
unknown flag is actually needed; everything about concrete (or
known-finite) labels is determined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Union

from .graphs import (
    GraphFormatError,
    LabeledGraph,
    SubgraphRef,
    enumerate_candidate_vc_separators,
    find_induced_square,
    find_separating_clique,
    is_induced_cycle,
    join_decomposition,
    link_of,
)

TriState = Optional[bool]  # True / False / None=unknown

YES = "yes"
NO = "no"
UNDECIDED = "undecided"


class HypothesisError(ValueError):
    """A decision procedure was called outside its hypotheses."""


@dataclass(frozen=True)
class Verdict:
    value: str
    witness: Union[tuple[int, ...], str, None] = None
    citations: tuple[str, ...] = ()
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.value == YES

    def to_json(self) -> dict:
        w = self.witness
        if isinstance(w, tuple):
            w = list(w)
        return {
            "value": self.value,
            "witness": w,
            "citations": list(self.citations),
            "details": self.details,
        }


def _verdict(value: TriState, witness=None, citations=(), **details) -> Verdict:
    v = YES if value is True else NO if value is False else UNDECIDED
    return Verdict(v, witness, tuple(citations), dict(details))


def _is_infinite(g: LabeledGraph, v: int) -> bool:
    return not g.labels[v].is_finite


def is_hyperbolic(g: LabeledGraph) -> Verdict:
    """Four conditions: hyperbolic vertex groups, no adjacent infinite pair,
    neighbours of a common infinite vertex group pairwise adjacent, and no
    induced square."""
    cites = []
    unknown = False
    for v in g.vertices():
        flag = g.labels[v].hyperbolic
        if flag is False:
            return _verdict(False, (v,), ["vertex-group-not-hyperbolic"])
        if flag is None:
            unknown = True
    cites.append("vertex-groups-hyperbolic")

    for (u, v) in sorted(g.edges):
        if _is_infinite(g, u) and _is_infinite(g, v):
            return _verdict(False, (u, v), ["adjacent-infinite-pair"])
    cites.append("no-adjacent-infinite-pair")

    for w in g.vertices():
        if not _is_infinite(g, w):
            continue
        for u, v in combinations(sorted(g.adj[w]), 2):
            if not g.has_edge(u, v):
                return _verdict(
                    False, (u, w, v), ["non-adjacent-pair-sharing-infinite-neighbour"]
                )
    cites.append("common-infinite-neighbour-adjacency")

    square = find_induced_square(g)
    if square is not None:
        return _verdict(False, square, ["induced-square"])
    cites.append("square-free")

    if unknown:
        return _verdict(None, "unknown hyperbolicity flag on a vertex label", cites)
    return _verdict(True, None, cites)


def is_finite_group(g: LabeledGraph) -> Verdict:
    """Finite iff the graph is complete and every label finite."""
    for v in g.vertices():
        if _is_infinite(g, v):
            return _verdict(False, (v,), ["infinite-vertex-group"])
    for u, v in combinations(g.vertices(), 2):
        if not g.has_edge(u, v):
            return _verdict(False, (u, v), ["missing-edge-gives-free-product"])
    order = 1
    for lab in g.labels:
        order *= lab.order or 0
    return _verdict(True, None, ["complete-and-all-finite"], order=order)


def _vc_case_pair_join(g: LabeledGraph) -> tuple[TriState, Optional[tuple[int, ...]]]:
    """Join of an all-finite clique with two non-adjacent Z2 vertices."""
    cone, parts = join_decomposition(g)
    if len(parts) != 1 or len(parts[0]) != 2:
        return False, None
    u, v = sorted(parts[0])
    if not (g.labels[u].is_z2 and g.labels[v].is_z2):
        return False, None
    if any(_is_infinite(g, w) for w in cone):
        return False, None
    return True, (u, v)


def is_virtually_cyclic(g: LabeledGraph) -> Verdict:
    """Complete all-finite, or complete with one virtually-infinite-cyclic
    label and the rest finite, or an all-finite clique joined to two
    non-adjacent Z2 vertices."""
    if is_finite_group(g):
        return _verdict(True, None, ["complete-all-finite"])

    ok, pair = _vc_case_pair_join(g)
    if ok:
        return _verdict(True, pair, ["clique-join-involution-pair"])

    if g.is_complete():
        infinite = [v for v in g.vertices() if _is_infinite(g, v)]
        if len(infinite) == 1:
            flag = g.labels[infinite[0]].virtually_infinite_cyclic
            if flag is True:
                return _verdict(
                    True, tuple(infinite), ["complete-one-virtually-infinite-cyclic"]
                )
            if flag is None:
                return _verdict(
                    None,
                    f"virtually-infinite-cyclic flag unknown on vertex {infinite[0]}",
                    ["complete-one-virtually-infinite-cyclic"],
                )
    return _verdict(False, None, ["no-virtually-cyclic-shape"])


def is_virtual_surface(g: LabeledGraph) -> Verdict:
    """Complete with exactly one virtual-surface label and the rest finite,
    or an all-finite clique joined to an induced cycle of length >= 5 with
    every vertex labelled Z2."""
    if g.is_complete():
        infinite = [v for v in g.vertices() if _is_infinite(g, v)]
        if len(infinite) != 1:
            return _verdict(False, None, ["complete-without-single-infinite-vertex"])
        flag = g.labels[infinite[0]].virtual_surface
        if flag is True:
            return _verdict(True, tuple(infinite), ["complete-one-virtual-surface"])
        if flag is None:
            return _verdict(
                None,
                f"virtual-surface flag unknown on vertex {infinite[0]}",
                ["complete-one-virtual-surface"],
            )
        return _verdict(False, tuple(infinite), ["complete-infinite-vertex-not-surface"])

    cone, parts = join_decomposition(g)
    if len(parts) != 1:
        return _verdict(False, None, ["join-of-two-infinite-factors"])
    part = parts[0]
    if any(_is_infinite(g, w) for w in cone):
        return _verdict(False, None, ["infinite-label-in-cone"])
    if not is_induced_cycle(g, part) or len(part) < 5:
        return _verdict(False, None, ["part-not-long-cycle"])
    if not all(g.labels[v].is_z2 for v in part):
        bad = sorted(v for v in part if not g.labels[v].is_z2)
        return _verdict(False, tuple(bad), ["cycle-vertex-not-z2"])
    return _verdict(
        True, tuple(sorted(part)), ["clique-join-involution-cycle"], cycle_length=len(part)
    )


def splits_over_finite(g: LabeledGraph) -> Verdict:
    """Multi-ended iff some complete subset (possibly empty, when the graph
    is disconnected) separates."""
    if not g.all_finite():
        raise HypothesisError("splitting criteria require all labels finite")
    clique = find_separating_clique(g)
    if clique is not None:
        return _verdict(True, tuple(sorted(clique)), ["separating-clique"])
    return _verdict(False, None, ["no-separating-clique"])


def splits_over_virtually_cyclic(g: LabeledGraph) -> Verdict:
    """Splits over a virtually cyclic subgroup iff some separating subset is
    a clique joined with an optional non-adjacent Z2 pair."""
    if not g.all_finite():
        raise HypothesisError("splitting criteria require all labels finite")
    for sep in enumerate_candidate_vc_separators(g):
        return _verdict(
            True, tuple(sorted(sep)), ["separating-clique-or-involution-pair-join"]
        )
    return _verdict(False, None, ["no-separator-of-required-shape"])


def is_one_ended(g: LabeledGraph) -> Verdict:
    """One-ended iff infinite and without a splitting over a finite subgroup.

    Only defined for all-finite labels, where infinite just means the graph
    is not complete."""
    if not g.all_finite():
        raise HypothesisError("end count derived only for all-finite labels")
    if is_finite_group(g):
        return _verdict(False, None, ["finite-group-has-no-ends"])
    sof = splits_over_finite(g)
    if sof.value == YES:
        return _verdict(False, sof.witness, ["multi-ended-by-separating-clique"])
    return _verdict(True, None, ["infinite-and-no-separating-clique"])


def is_coarsely_separable_subexp(g: LabeledGraph) -> Verdict:
    """Decides coarse separability by a family of subexponential growth for
    graph products over square-free graphs with finite vertex groups.

    The decision surface coincides with splits_over_virtually_cyclic; the
    verdict also records which classification regime the input falls in.
    """
    if not g.all_finite():
        raise HypothesisError("coarse separability criterion requires finite labels")
    if find_induced_square(g) is not None:
        raise HypothesisError("coarse separability criterion requires a square-free graph")

    split_vc = splits_over_virtually_cyclic(g)
    finite = is_finite_group(g)
    if finite:
        regime = "finite"
    elif is_virtually_cyclic(g):
        regime = "virtually-cyclic"
    elif splits_over_finite(g):
        regime = "multi-ended"
    elif is_virtual_surface(g):
        regime = "virtual-surface"
    else:
        regime = "one-ended-general"
    return Verdict(
        split_vc.value,
        split_vc.witness,
        split_vc.citations + ("regime:" + regime,),
        {"regime": regime},
    )


def finite_index_subgraph(g: LabeledGraph, sub: SubgraphRef) -> Verdict:
    """Does the subgroup generated by the subset have finite index?

    Holds iff every outside vertex is adjacent to all of the subset and to
    every other outside vertex, with all outside labels finite.
    """
    sub = frozenset(sub)
    if not sub <= set(g.vertices()):
        raise GraphFormatError("subset out of range")
    outside = sorted(set(g.vertices()) - sub)
    lk = link_of(g, sub) if sub else frozenset(outside)
    for w in outside:
        if w not in lk:
            return _verdict(False, (w,), ["vertex-outside-star"])
    for u, v in combinations(outside, 2):
        if not g.has_edge(u, v):
            return _verdict(False, (u, v), ["link-not-complete"])
    for w in outside:
        if _is_infinite(g, w):
            return _verdict(False, (w,), ["infinite-label-in-link"])
    return _verdict(True, tuple(outside), ["star-with-finite-complete-link"])


ALL_VERDICTS = {
    "hyperbolic": is_hyperbolic,
    "finite": is_finite_group,
    "virtually_cyclic": is_virtually_cyclic,
    "virtual_surface": is_virtual_surface,
    "one_ended": is_one_ended,
    "splits_over_finite": splits_over_finite,
    "splits_over_virtually_cyclic": splits_over_virtually_cyclic,
    "coarsely_separable_subexp": is_coarsely_separable_subexp,
}


def classify_all(g: LabeledGraph) -> tuple[dict[str, Verdict], dict[str, str]]:
    """Run every decision procedure; procedures whose hypotheses fail are
    reported in the second map instead of raising."""
    verdicts: dict[str, Verdict] = {}
    skipped: dict[str, str] = {}
    for name, fn in ALL_VERDICTS.items():
        try:
            verdicts[name] = fn(g)
        except HypothesisError as exc:
            skipped[name] = str(exc)
    return verdicts, skipped
