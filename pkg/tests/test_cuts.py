import random
from itertools import combinations

import numpy as np
import pytest

from coarsesep.cuts import (
    CutError,
    census_after_removal,
    cut_growth_experiment,
    deep_pair_connectivity,
    exact_min_cut,
    exhaustive_min_cut,
    flow_far_pair_lower_bound,
    heuristic_cut,
    is_valid_cut,
    resolve_depth,
    sep_profile_estimate,
    size_limit,
    verify_partition_lemma,
    vertex_connectivity,
)
from coarsesep.vgraph import StaticGraph


def random_static(rng, n, p, tag=""):
    edges = [(i, j) for i, j in combinations(range(n), 2) if rng.random() < p]
    return StaticGraph.from_edges(n, edges, tag)


def brute_kappa(g, x, y):
    """Minimum separating subset by direct subset enumeration."""
    n = g.n
    nbrs = [set(map(int, g.neighbors(v))) for v in range(n)]
    if y in nbrs[x]:
        return n + 1
    others = [v for v in range(n) if v not in (x, y)]
    for k in range(len(others) + 1):
        for combo in combinations(others, k):
            blocked = set(combo)
            stack = [x]
            seen = {x} | blocked
            reached = False
            while stack:
                a = stack.pop()
                if a == y:
                    reached = True
                    break
                for b in nbrs[a]:
                    if b not in seen:
                        seen.add(b)
                        stack.append(b)
            if not reached:
                return k
    return n + 1


# -- fixtures ---------------------------------------------------------------------


def test_fixture_path9():
    rep = exact_min_cut(StaticGraph.path(9), 0.5)
    assert rep.value == 1
    assert rep.component_census == (4, 4)


def test_fixture_cycle12():
    rep = exact_min_cut(StaticGraph.cycle(12), 0.5)
    assert rep.value == 2


def test_fixture_k5():
    rep = exact_min_cut(StaticGraph.complete(5), 0.5)
    assert rep.value == 3
    assert max(rep.component_census) <= 2


def test_size_limit_floor():
    assert size_limit(9, 0.5) == 4
    assert size_limit(12, 0.5) == 6


# -- exact solver vs exhaustive oracle ----------------------------------------------


def test_exact_matches_exhaustive_random():
    rng = random.Random(42)
    for trial in range(80):
        n = rng.randrange(3, 13)
        g = random_static(rng, n, rng.uniform(0.15, 0.7), f"t{trial}")
        delta = rng.choice([0.25, 0.5, 0.75])
        a = exhaustive_min_cut(g, delta)
        b = exact_min_cut(g, delta)
        assert a.value == b.value
        assert is_valid_cut(g, b.cut_set, delta)


def test_exact_threshold():
    with pytest.raises(CutError, match="threshold"):
        exact_min_cut(StaticGraph.cycle(40), 0.5)


def test_exact_uses_incumbent():
    g = StaticGraph.cycle(12)
    seedrep = heuristic_cut(g, 0.5, seed=0)
    rep = exact_min_cut(g, 0.5, incumbent=seedrep)
    assert rep.value == 2


# -- heuristics -----------------------------------------------------------------------


def test_heuristic_budget_zero_trivial():
    g = StaticGraph.cycle(10)
    rep = heuristic_cut(g, 0.5, budget=0)
    assert rep.method == "trivial"
    assert "no search" in rep.notes
    assert rep.value == g.n


def test_heuristic_cycle100():
    g = StaticGraph.cycle(100)
    rep = heuristic_cut(g, 0.5, seed=1)
    assert rep.value == 2
    assert is_valid_cut(g, rep.cut_set, 0.5)


def test_heuristic_always_valid_random():
    rng = random.Random(17)
    for trial in range(40):
        g = random_static(rng, rng.randrange(3, 30), rng.uniform(0.05, 0.5))
        rep = heuristic_cut(g, 0.5, seed=trial)
        assert is_valid_cut(g, rep.cut_set, 0.5)
        assert rep.bound == "upper"


def test_heuristic_vs_exact_gap():
    rng = random.Random(23)
    for trial in range(30):
        g = random_static(rng, rng.randrange(4, 14), rng.uniform(0.2, 0.6))
        h = heuristic_cut(g, 0.5, seed=trial)
        e = exact_min_cut(g, 0.5)
        assert h.value >= e.value


# -- flow bounds -----------------------------------------------------------------------


def test_kappa_fixtures():
    assert vertex_connectivity(StaticGraph.cycle(12), 0, 6) == 2
    assert vertex_connectivity(StaticGraph.path(9), 0, 8) == 1
    k5e = StaticGraph.from_edges(
        5, [(i, j) for i, j in combinations(range(5), 2) if (i, j) != (0, 1)]
    )
    assert vertex_connectivity(k5e, 0, 1) == 3
    # adjacent pair has no separator: the flow exceeds any possible cut size
    assert vertex_connectivity(StaticGraph.complete(5), 0, 1) > 5


def test_kappa_matches_bruteforce_random():
    rng = random.Random(7)
    done = 0
    while done < 80:
        n = rng.randrange(4, 11)
        g = random_static(rng, n, rng.uniform(0.2, 0.7))
        x, y = rng.sample(range(n), 2)
        if g.has_edge(x, y):
            assert vertex_connectivity(g, x, y) > n - 2
            continue
        assert vertex_connectivity(g, x, y) == brute_kappa(g, x, y)
        done += 1


def test_deep_pair_connectivity_cycle():
    g = StaticGraph.cycle(100)
    assert deep_pair_connectivity(g, 0, 50, 0) == 2
    assert deep_pair_connectivity(g, 0, 50, 10) == 2
    # overlapping depth balls: no separator
    assert deep_pair_connectivity(g, 0, 10, 20) is None


def test_deep_pair_connectivity_grows_on_grid():
    # 2D grid: separating depth-balls needs more vertices at larger depth
    k = 13
    edges = []
    for i in range(k):
        for j in range(k):
            if i + 1 < k:
                edges.append((i * k + j, (i + 1) * k + j))
            if j + 1 < k:
                edges.append((i * k + j, i * k + j + 1))
    g = StaticGraph.from_edges(k * k, edges)
    x, y = 0, k * k - 1
    vals = [deep_pair_connectivity(g, x, y, d) for d in [0, 2, 4]]
    assert all(v is not None for v in vals)
    assert vals[0] < vals[1] < vals[2]


def test_flow_far_pair_report():
    g = StaticGraph.cycle(100)
    rep = flow_far_pair_lower_bound(g, 0.5, seed=1)
    assert rep.bound == "lower"
    assert rep.value == 2
    assert rep.certificate["kappa"] == 2
    assert "caveat" in rep.certificate


def test_flow_far_pair_disconnected():
    g = StaticGraph.from_edges(6, [(0, 1), (2, 3), (4, 5)])
    with pytest.raises(CutError, match="disconnected"):
        flow_far_pair_lower_bound(g, 0.5)


def test_resolve_depth():
    assert resolve_depth("deep", 6, 2) == 4
    assert resolve_depth("half", 7, 2) == 3
    assert resolve_depth("none", 7, 2) == 0
    assert resolve_depth(3, 9, 2) == 3
    with pytest.raises(ValueError):
        resolve_depth("bogus", 5, 2)


# -- partition lemma ----------------------------------------------------------------------


def test_partition_lemma_cycle12():
    # cut of size 2 with delta' * 12 = 1.5: the big-cut branch already holds
    g = StaticGraph.cycle(12)
    rep = exact_min_cut(g, 0.5)
    ok, det = verify_partition_lemma(g, rep)
    assert ok and det["case"] == "big-cut"


def test_partition_lemma_partition_case():
    # cut of size 2 with delta' * 24 = 3 > 2 forces the two-sided partition
    g = StaticGraph.cycle(24)
    rep = heuristic_cut(g, 0.5, seed=0)
    assert rep.value == 2
    ok, det = verify_partition_lemma(g, rep)
    assert ok and det["case"] == "partition"
    assert det["A"] >= 3 and det["B"] >= 3


def test_partition_lemma_whole_cut():
    g = StaticGraph.cycle(8)
    rep = heuristic_cut(g, 0.5, budget=0)  # trivial: remove everything
    ok, det = verify_partition_lemma(g, rep)
    assert ok and det["case"] == "big-cut"


def test_partition_lemma_path9():
    g = StaticGraph.path(9)
    rep = exact_min_cut(g, 0.5)
    ok, det = verify_partition_lemma(g, rep)
    assert ok


def test_partition_lemma_rejects_bad_input():
    g = StaticGraph.cycle(12)
    from coarsesep.cuts import CutReport

    bad = CutReport("c", 12, 0.5, "upper", "layer_sweep", 1, (0,), (11,))
    with pytest.raises(CutError, match="not a valid"):
        verify_partition_lemma(g, bad)
    lower = flow_far_pair_lower_bound(g, 0.5, seed=0)
    with pytest.raises(CutError, match="explicit cuts"):
        verify_partition_lemma(g, lower)


def test_partition_lemma_random_cuts():
    rng = random.Random(31)
    for trial in range(60):
        g = random_static(rng, rng.randrange(3, 14), rng.uniform(0.2, 0.7))
        delta = rng.choice([0.25, 0.5, 0.75])
        for rep in (exact_min_cut(g, delta), heuristic_cut(g, delta, seed=trial)):
            ok, _ = verify_partition_lemma(g, rep)
            assert ok


# -- monotonicity -----------------------------------------------------------------------------


def test_cut_monotone_in_delta():
    rng = random.Random(13)
    for trial in range(25):
        g = random_static(rng, rng.randrange(4, 12), rng.uniform(0.25, 0.7))
        vals = [exact_min_cut(g, d).value for d in (0.25, 0.5, 0.75)]
        assert vals[0] >= vals[1] >= vals[2]


# -- experiments -------------------------------------------------------------------------------


def test_experiment_single_row_flagged(gp_dihedral):
    table = cut_growth_experiment(gp_dihedral, t=1, delta=0.5, n_range=[4], seed=0)
    assert table.fit_flag == "insufficient points"


def test_experiment_dihedral_disconnected_rows(gp_dihedral):
    table = cut_growth_experiment(gp_dihedral, t=1, delta=0.5, n_range=range(2, 6), seed=0)
    for row in table.rows:
        assert "disconnected" in row.flags
        assert row.exact == 0  # two arcs of three vertices: empty cut works
        assert row.lower is None


def test_experiment_truncates_at_cap(gp_pentagon_z3):
    table = cut_growth_experiment(
        gp_pentagon_z3, t=2, delta=0.5, n_range=range(3, 9), seed=0, cap=20_000, max_pairs=2
    )
    assert table.truncated is not None
    assert [r.n for r in table.rows] == [3]


def test_experiment_csv_schema(gp_dihedral):
    table = cut_growth_experiment(gp_dihedral, t=1, delta=0.5, n_range=range(2, 5), seed=9)
    rows = table.csv_rows()
    assert rows[0] == "n,t,delta,size_subject,upper,lower,exact,lambda_fit_flag,runtime_ms,seed"
    assert all(r.endswith(",9") for r in rows[1:])
    # runtime column empty by default (reproducible bytes)
    assert all(r.split(",")[8] == "" for r in rows[1:])
    timed = table.csv_rows(include_timings=True)
    assert any(r.split(",")[8] != "" for r in timed[1:])


def test_sep_profile_dihedral(gp_dihedral):
    table = sep_profile_estimate(gp_dihedral, n_max=6, t=1, seed=0)
    uppers = [r.upper for r in table.rows if r.upper is not None]
    assert max(uppers) <= 2  # a line has uniformly bounded cuts
    assert abs(table.epsilon_hat.slope) < 0.2 or np.isnan(table.epsilon_hat.slope)


def test_sep_profile_finite_group(gp_k2):
    table = sep_profile_estimate(gp_k2, n_max=6, t=1, seed=0)
    assert any("exhausted" in f for f in table.flags)


def test_census_and_validity_helpers():
    g = StaticGraph.path(5)
    assert census_after_removal(g, [2]) == (2, 2)
    assert is_valid_cut(g, [2], 0.5)
    assert not is_valid_cut(g, [], 0.5)
