import random
from itertools import combinations

import pytest

from coarsesep.classify import (
    HypothesisError,
    classify_all,
    finite_index_subgraph,
    is_coarsely_separable_subexp,
    is_finite_group,
    is_hyperbolic,
    is_one_ended,
    is_virtual_surface,
    is_virtually_cyclic,
    splits_over_finite,
    splits_over_virtually_cyclic,
)
from coarsesep.graphs import graph, is_separating, is_square_free
from coarsesep.groups import abstract, cyclic

from conftest import z2_cycle, z3_cycle


def complete(labels):
    return graph(labels, combinations(range(len(labels)), 2))


# -- hyperbolicity ------------------------------------------------------------


def test_hyperbolic_pentagon(pentagon_z2):
    assert is_hyperbolic(pentagon_z2).value == "yes"


def test_hyperbolic_square_no(square_z2):
    v = is_hyperbolic(square_z2)
    assert v.value == "no"
    assert v.citations == ("induced-square",)
    assert len(v.witness) == 4


def test_hyperbolic_adjacent_infinite_pair():
    g = graph([abstract(order=None, hyperbolic=True)] * 2, [(0, 1)])
    v = is_hyperbolic(g)
    assert v.value == "no"
    assert v.witness == (0, 1)


def test_hyperbolic_common_infinite_neighbour():
    # u - w - v with w infinite and u, v not adjacent
    g = graph(
        [cyclic(2), abstract(order=None, hyperbolic=True), cyclic(2)],
        [(0, 1), (1, 2)],
    )
    assert is_hyperbolic(g).value == "no"


def test_hyperbolic_unknown_flag_undecided():
    g = graph([abstract(order=None)], [])
    assert is_hyperbolic(g).value == "undecided"


# -- finiteness -----------------------------------------------------------------


def test_finite_k3():
    v = is_finite_group(complete([cyclic(2), cyclic(2), cyclic(3)]))
    assert v.value == "yes"
    assert v.details["order"] == 12


def test_finite_no(dihedral_graph):
    assert is_finite_group(dihedral_graph).value == "no"
    assert is_finite_group(graph([abstract(order=None)], [])).value == "no"


# -- virtual cyclicity -------------------------------------------------------------


def test_virtually_cyclic_dihedral(dihedral_graph):
    v = is_virtually_cyclic(dihedral_graph)
    assert v.value == "yes"
    assert "involution-pair" in v.citations[0]


def test_virtually_cyclic_suspension_path():
    # u - c - v, ends Z2 and non-adjacent, centre finite
    g = graph([cyclic(2), cyclic(5), cyclic(2)], [(0, 1), (1, 2)])
    assert is_virtually_cyclic(g).value == "yes"


def test_virtually_cyclic_z3_pair_no():
    g = graph([cyclic(3), cyclic(3)], [])
    assert is_virtually_cyclic(g).value == "no"


def test_virtually_cyclic_abstract_cases():
    vic = abstract(order=None, hyperbolic=True, virtually_infinite_cyclic=True)
    g = complete([cyclic(2), vic])
    assert is_virtually_cyclic(g).value == "yes"
    unk = abstract(order=None)
    assert is_virtually_cyclic(complete([cyclic(2), unk])).value == "undecided"
    two_inf = complete([vic, vic])
    assert is_virtually_cyclic(two_inf).value == "no"


# -- virtual surface ----------------------------------------------------------------


def test_virtual_surface_pentagon(pentagon_z2):
    v = is_virtual_surface(pentagon_z2)
    assert v.value == "yes"
    assert v.details["cycle_length"] == 5


def test_virtual_surface_one_z3_no(pentagon_one_z3):
    assert is_virtual_surface(pentagon_one_z3).value == "no"


def test_virtual_surface_coned_hexagon():
    edges = [(i, (i + 1) % 6) for i in range(6)] + [(i, 6) for i in range(6)]
    g = graph([cyclic(2)] * 7, edges)
    v = is_virtual_surface(g)
    assert v.value == "yes"
    assert v.details["cycle_length"] == 6
    # consistency: virtual surface groups are hyperbolic
    assert is_hyperbolic(g).value == "yes"


def test_virtual_surface_abstract():
    vs = abstract(order=None, hyperbolic=True, virtual_surface=True)
    assert is_virtual_surface(complete([cyclic(3), vs])).value == "yes"
    assert is_virtual_surface(complete([cyclic(3), abstract(order=None)])).value == "undecided"
    assert is_virtual_surface(complete([cyclic(3), cyclic(2)])).value == "no"


def test_square_not_virtual_surface(square_z2):
    assert is_virtual_surface(square_z2).value == "no"


# -- splittings ------------------------------------------------------------------------


def test_splits_over_finite(dihedral_graph, pentagon_z2):
    v = splits_over_finite(dihedral_graph)
    assert v.value == "yes" and v.witness == ()
    assert splits_over_finite(pentagon_z2).value == "no"
    shared = graph(
        [cyclic(2)] * 5,
        [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)],
    )
    v = splits_over_finite(shared)
    assert v.value == "yes" and v.witness == (2,)


def test_splits_over_vc(pentagon_z2, pentagon_z3):
    v = splits_over_virtually_cyclic(pentagon_z2)
    assert v.value == "yes"
    assert not pentagon_z2.has_edge(*v.witness)
    assert splits_over_virtually_cyclic(pentagon_z3).value == "no"


def test_splits_over_vc_hexagon_alternating():
    # alternating Z2/Z3 on a 6-cycle: any non-adjacent Z2 pair separates
    # (their common neighbour becomes isolated), so the verdict is yes --
    # confirmed against the exhaustive scan below
    labels = [cyclic(2) if i % 2 == 0 else cyclic(3) for i in range(6)]
    g = graph(labels, [(i, (i + 1) % 6) for i in range(6)])
    v = splits_over_virtually_cyclic(g)
    assert v.value == "yes"
    assert ref_splits_vc(g)


def test_splitting_requires_finite_labels():
    g = graph([abstract(order=None), cyclic(2)], [])
    with pytest.raises(HypothesisError):
        splits_over_finite(g)


# -- coarse separability ------------------------------------------------------------------


def test_coarsely_separable_examples(pentagon_z2, pentagon_one_z3, pentagon_z3):
    v = is_coarsely_separable_subexp(pentagon_z2)
    assert v.value == "yes" and v.details["regime"] == "virtual-surface"
    assert is_coarsely_separable_subexp(pentagon_one_z3).value == "yes"
    v = is_coarsely_separable_subexp(pentagon_z3)
    assert v.value == "no" and v.details["regime"] == "one-ended-general"


def test_coarsely_separable_hypotheses(square_z2):
    with pytest.raises(HypothesisError, match="square-free"):
        is_coarsely_separable_subexp(square_z2)
    g = graph([abstract(order=None), cyclic(2)], [])
    with pytest.raises(HypothesisError, match="finite"):
        is_coarsely_separable_subexp(g)


# -- finite index subsets --------------------------------------------------------------------


def test_finite_index_subgraph():
    c5 = z2_cycle(5)
    assert finite_index_subgraph(c5, frozenset(range(5))).value == "yes"
    # join with one finite cone vertex
    edges = [(i, (i + 1) % 5) for i in range(5)] + [(i, 5) for i in range(5)]
    g = graph([cyclic(2)] * 6, edges)
    assert finite_index_subgraph(g, frozenset(range(5))).value == "yes"
    # disjoint extra vertex: infinite index
    g2 = graph([cyclic(2)] * 6, [(i, (i + 1) % 5) for i in range(5)])
    v = finite_index_subgraph(g2, frozenset(range(5)))
    assert v.value == "no" and v.witness == (5,)


def test_one_ended(pentagon_z2, pentagon_one_z3, dihedral_graph):
    assert is_one_ended(pentagon_z2).value == "yes"
    assert is_one_ended(pentagon_one_z3).value == "yes"
    assert is_one_ended(dihedral_graph).value == "no"
    assert is_one_ended(complete([cyclic(2), cyclic(3)])).value == "no"


# -- brute-force reference on small graphs ------------------------------------------------------


def ref_hyperbolic(g):
    # all labels finite here, so only square-freeness matters
    return is_square_free(g)


def ref_finite(g):
    return all(g.has_edge(u, v) for u, v in combinations(range(g.n), 2))


def ref_virtually_cyclic(g):
    if ref_finite(g):
        return True
    pairs = [
        (u, v)
        for u, v in combinations(range(g.n), 2)
        if not g.has_edge(u, v) and g.labels[u].is_z2 and g.labels[v].is_z2
    ]
    for u, v in pairs:
        rest = [w for w in range(g.n) if w not in (u, v)]
        if all(g.has_edge(w, x) for w in rest for x in (u, v)) and all(
            g.has_edge(a, b) for a, b in combinations(rest, 2)
        ):
            return True
    return False


def ref_virtual_surface(g):
    for cycle_vs in _induced_cycles(g):
        if len(cycle_vs) < 5:
            continue
        if not all(g.labels[v].is_z2 for v in cycle_vs):
            continue
        rest = [w for w in range(g.n) if w not in cycle_vs]
        if all(g.has_edge(w, v) for w in rest for v in cycle_vs) and all(
            g.has_edge(a, b) for a, b in combinations(rest, 2)
        ):
            return True
    return False


def _induced_cycles(g):
    from itertools import permutations

    seen = set()
    for size in range(3, g.n + 1):
        for sub in combinations(range(g.n), size):
            key = frozenset(sub)
            if key in seen:
                continue
            for perm in permutations(sub[1:]):
                order = (sub[0],) + perm
                cyc_edges = {
                    tuple(sorted((order[i], order[(i + 1) % size])))
                    for i in range(size)
                }
                actual = {
                    tuple(sorted((a, b)))
                    for a, b in combinations(sub, 2)
                    if g.has_edge(a, b)
                }
                if actual == cyc_edges:
                    seen.add(key)
                    yield key
                    break


def ref_splits_finite(g):
    for size in range(g.n):
        for sub in combinations(range(g.n), size):
            if all(g.has_edge(a, b) for a, b in combinations(sub, 2)) and is_separating(
                g, sub
            ):
                return True
    return False


def ref_splits_vc(g):
    for size in range(g.n):
        for sub in combinations(range(g.n), size):
            nonadj = [
                (a, b) for a, b in combinations(sub, 2) if not g.has_edge(a, b)
            ]
            if len(nonadj) > 1:
                continue
            if len(nonadj) == 1:
                u, v = nonadj[0]
                if not (g.labels[u].is_z2 and g.labels[v].is_z2):
                    continue
                rest = [w for w in sub if w not in (u, v)]
                if not all(g.has_edge(w, x) for w in rest for x in (u, v)):
                    continue
            if is_separating(g, sub):
                return True
    return False


def test_verdicts_match_bruteforce_small():
    rng = random.Random(99)
    for _ in range(250):
        n = rng.randrange(1, 7)
        labels = [cyclic(rng.choice([2, 3])) for _ in range(n)]
        edges = [(i, j) for i, j in combinations(range(n), 2) if rng.random() < 0.5]
        g = graph(labels, edges)
        assert (is_hyperbolic(g).value == "yes") == ref_hyperbolic(g)
        assert (is_finite_group(g).value == "yes") == ref_finite(g)
        assert (is_virtually_cyclic(g).value == "yes") == ref_virtually_cyclic(g)
        assert (is_virtual_surface(g).value == "yes") == ref_virtual_surface(g)
        assert (splits_over_finite(g).value == "yes") == ref_splits_finite(g)
        assert (splits_over_virtually_cyclic(g).value == "yes") == ref_splits_vc(g)


def test_consistency_lattice_and_witnesses():
    rng = random.Random(7)
    for _ in range(250):
        n = rng.randrange(1, 7)
        labels = [cyclic(rng.choice([2, 3])) for _ in range(n)]
        edges = [(i, j) for i, j in combinations(range(n), 2) if rng.random() < 0.5]
        g = graph(labels, edges)
        verdicts, skipped = classify_all(g)
        fin = verdicts["finite"]
        vc = verdicts["virtually_cyclic"]
        vs = verdicts["virtual_surface"]
        sof = verdicts["splits_over_finite"]
        svc = verdicts["splits_over_virtually_cyclic"]
        if fin.value == "yes":
            assert vc.value == "yes"
        if vs.value == "yes":
            assert verdicts["hyperbolic"].value == "yes"
        if sof.value == "yes":
            assert svc.value == "yes"
            assert is_separating(g, sof.witness)
        if svc.value == "yes":
            assert is_separating(g, svc.witness)
        if "coarsely_separable_subexp" in verdicts:
            assert verdicts["coarsely_separable_subexp"].value == svc.value
        if vc.value == "yes" and fin.value == "no":
            # two-ended, so in particular not one-ended
            assert verdicts["one_ended"].value == "no"
