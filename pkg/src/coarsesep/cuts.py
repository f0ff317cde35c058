"""Balanced vertex cuts of finite subgraphs.

A delta-cut of a subgraph A is a vertex set whose removal leaves every
connected component of size at most delta*|A| (sizes compared against
floor(delta*|A|)).  The exact solver certifies minima on small subjects;
larger subjects get clearly-labelled heuristic upper bounds (BFS layer
sweeps plus local search) and far-pair flow lower bounds (minimum vertex
cuts between distant vertex pairs via node-splitting max-flow).

The far-pair number is a heuristic lower bound for the minimum delta-cut:
it binds every cut that separates one of the sampled pairs, which is the
deep-components branch of the far-points-or-big-cut dichotomy, and the
reports record that caveat rather than claiming a universal certificate.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .fits import EMPTY_FIT, Fit, fit_log_vs_log, fit_log_vs_x
from .vgraph import StaticGraph

EXACT_SIZE_THRESHOLD = 28
LOCAL_SEARCH_NODE_CAP = 100_000


class CutError(ValueError):
    pass


@dataclass(frozen=True)
class CutReport:
    subject_tag: str
    subject_size: int
    delta: float
    bound: str  # 'upper' | 'lower' | 'exact'
    method: str  # exhaustive | branch_and_bound | layer_sweep | local_search | flow_far_pairs | trivial
    value: int
    cut_set: tuple[int, ...] = ()
    component_census: tuple[int, ...] = ()  # descending sizes
    certificate: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()


def size_limit(n: int, delta: float) -> int:
    """Components must have size <= floor(delta * n)."""
    return math.floor(delta * n + 1e-9)


def census_after_removal(graph: StaticGraph, cut: Iterable[int]) -> tuple[int, ...]:
    removed = np.zeros(graph.n, dtype=bool)
    removed[list(cut)] = True
    sizes = graph.component_sizes(removed)
    return tuple(int(s) for s in sizes)


def is_valid_cut(graph: StaticGraph, cut: Iterable[int], delta: float) -> bool:
    census = census_after_removal(graph, cut)
    limit = size_limit(graph.n, delta)
    return all(s <= limit for s in census)


# -- exact solvers ------------------------------------------------------------


def _bitmask_adjacency(graph: StaticGraph) -> list[int]:
    masks = [0] * graph.n
    for v in range(graph.n):
        for u in graph.neighbors(v):
            masks[v] |= 1 << int(u)
    return masks


def _mask_components(masks: list[int], avail: int) -> list[int]:
    comps = []
    rem = avail
    while rem:
        comp = rem & -rem
        while True:
            grow = comp
            b = comp
            while b:
                v = (b & -b).bit_length() - 1
                b &= b - 1
                grow |= masks[v] & avail
            if grow == comp:
                break
            comp = grow
        comps.append(comp)
        rem &= ~comp
    return comps


def exhaustive_min_cut(graph: StaticGraph, delta: float, max_n: int = 20) -> CutReport:
    """Reference solver: scan vertex subsets in size order.

    Deliberately simple (adjacency-list BFS, itertools subsets); serves as
    the independent oracle for the branch-and-bound solver.
    """
    n = graph.n
    if n > max_n:
        raise CutError(f"exhaustive scan limited to {max_n} vertices")
    limit = size_limit(n, delta)
    nbrs = [list(map(int, graph.neighbors(v))) for v in range(n)]

    def ok(cut: set[int]) -> bool:
        seen = set(cut)
        for s in range(n):
            if s in seen:
                continue
            comp = 0
            stack = [s]
            seen.add(s)
            while stack:
                x = stack.pop()
                comp += 1
                for y in nbrs[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            if comp > limit:
                return False
        return True

    for k in range(n + 1):
        for combo in combinations(range(n), k):
            if ok(set(combo)):
                return CutReport(
                    graph.tag,
                    n,
                    delta,
                    "exact",
                    "exhaustive",
                    k,
                    tuple(combo),
                    census_after_removal(graph, combo),
                )
    raise AssertionError("unreachable: removing all vertices is always valid")


def exact_min_cut(
    graph: StaticGraph,
    delta: float,
    threshold: int = EXACT_SIZE_THRESHOLD,
    incumbent: Optional[CutReport] = None,
) -> CutReport:
    """Certified minimum delta-cut by branch and bound.

    Branches on the vertices of an oversized component (every valid cut must
    meet it); prunes with the best solution so far and a component-size
    lower bound on how many removals an oversized component still needs.
    Vertex order is index order, so results are reproducible.
    """
    n = graph.n
    if n > threshold:
        raise CutError(f"subject size {n} over exact threshold {threshold}")
    limit = size_limit(n, delta)
    masks = _bitmask_adjacency(graph)
    full = (1 << n) - 1

    best_size = n
    best_mask = full
    if incumbent is not None and incumbent.bound in ("upper", "exact"):
        if is_valid_cut(graph, incumbent.cut_set, delta) and len(incumbent.cut_set) < best_size:
            best_size = len(incumbent.cut_set)
            best_mask = 0
            for v in incumbent.cut_set:
                best_mask |= 1 << v

    def needed(comp: int) -> int:
        """At least this many more removals to break one oversized component."""
        size = comp.bit_count()
        if size <= limit:
            return 0
        if limit == 0:
            return size
        deg = 1
        b = comp
        while b:
            v = (b & -b).bit_length() - 1
            b &= b - 1
            deg = max(deg, (masks[v] & comp).bit_count())
        return math.ceil((size - limit) / ((deg - 1) * limit + 1))

    def dfs(removed: int, count: int, forbidden: int) -> None:
        nonlocal best_size, best_mask
        avail = full & ~removed
        comps = _mask_components(masks, avail)
        oversized = [c for c in comps if c.bit_count() > limit]
        if not oversized:
            if count < best_size:
                best_size = count
                best_mask = removed
            return
        lb = count + sum(needed(c) for c in oversized)
        if lb >= best_size:
            return
        target = min(oversized, key=lambda c: c.bit_count())
        cand = target & ~forbidden
        if cand == 0:
            return
        f = forbidden
        b = cand
        while b:
            bit = b & -b
            b &= b - 1
            dfs(removed | bit, count + 1, f)
            f |= bit
            if count + 1 >= best_size:
                break

    dfs(0, 0, 0)
    cut = tuple(v for v in range(n) if best_mask >> v & 1)
    return CutReport(
        graph.tag,
        n,
        delta,
        "exact",
        "branch_and_bound",
        best_size,
        cut,
        census_after_removal(graph, cut),
    )


# -- heuristic upper bounds ----------------------------------------------------


class _LabelUnionFind:
    """Union-find over component labels, extended as cut vertices rejoin."""

    def __init__(self, sizes: Sequence[int]):
        self.parent = list(range(len(sizes)))
        self.size = list(sizes)

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return ra

    def add(self) -> int:
        idx = len(self.parent)
        self.parent.append(idx)
        self.size.append(1)
        return idx


def _shrink_cut(graph: StaticGraph, cut: set[int], limit: int) -> set[int]:
    """Greedy removal of redundant cut vertices.

    Components of the kept graph are labelled once; dropping v is allowed
    when v plus its adjacent kept components stays within the size limit,
    after which those components merge."""
    if not cut:
        return cut
    removed = np.zeros(graph.n, dtype=bool)
    removed[list(cut)] = True
    cnt, labels = graph.component_labels(removed)
    sizes = np.bincount(labels[labels >= 0], minlength=cnt) if cnt else np.zeros(0, int)
    uf = _LabelUnionFind([int(s) for s in sizes])
    labels = labels.copy()
    cut_out = set(cut)
    for v in sorted(cut):
        roots = {uf.find(int(labels[u])) for u in graph.neighbors(v) if labels[u] >= 0}
        merged = 1 + sum(uf.size[r] for r in roots)
        if merged <= limit:
            cut_out.discard(v)
            mine = uf.add()
            labels[v] = mine
            for r in roots:
                mine = uf.union(mine, r)
    return cut_out


def _layer_candidates(
    graph: StaticGraph, seed_vertex: int, limit: int
) -> list[tuple[int, int]]:
    """Valid BFS-layer cuts from one seed as (layer_size, distance) pairs.

    Removing the full distance-d level leaves inside (< d) and outside
    (> d) parts with no edges between them, so cumulative level counts
    bound every component and validity needs no component search.
    """
    dist = graph.bfs_distances([seed_vertex])
    unreachable = int(np.isinf(dist).sum())
    if unreachable > limit:
        return []
    finite = dist[~np.isinf(dist)].astype(np.int64)
    counts = np.bincount(finite)
    cum = np.cumsum(counts)
    out = []
    n_reach = int(cum[-1])
    for d in range(1, len(counts)):
        layer = int(counts[d])
        if layer == 0:
            continue
        inside = int(cum[d - 1])
        outside = n_reach - inside - layer
        if inside <= limit and outside <= limit:
            out.append((layer, d))
    return out


def heuristic_cut(
    graph: StaticGraph,
    delta: float,
    budget: int = 500,
    seed: int = 0,
    n_seeds: int = 4,
) -> CutReport:
    """Best delta-cut found by BFS layer sweeps (greedily shrunk) plus a
    vertex-drop/swap local search on small subjects; the result is verified
    against the component condition before reporting and never claims
    optimality."""
    n = graph.n
    limit = size_limit(n, delta)
    trivial = CutReport(
        graph.tag,
        n,
        delta,
        "upper",
        "trivial",
        n,
        tuple(range(n)),
        (),
        notes=("no search",) if budget == 0 else ("fallback",),
    )
    if budget == 0 or n == 0:
        return trivial

    rng = random.Random(seed)
    best: Optional[set[int]] = None
    best_method = "layer_sweep"

    # empty cut may already be valid (small or shattered subjects)
    if is_valid_cut(graph, (), delta):
        best = set()

    # farthest-point seeds, deterministic
    seeds = [0]
    dist_all = graph.bfs_distances([0])
    for _ in range(n_seeds - 1):
        finite = np.where(np.isinf(dist_all), -1.0, dist_all)
        nxt = int(np.argmax(finite))
        if nxt in seeds:
            break
        seeds.append(nxt)
        dist_all = np.minimum(dist_all, graph.bfs_distances([nxt]))

    candidates: list[tuple[int, int, int]] = []  # (layer_size, seed, d)
    for s in seeds:
        for layer_size, d in _layer_candidates(graph, s, limit):
            candidates.append((layer_size, s, d))
    candidates.sort()
    for layer_size, s, d in candidates[:3]:
        if best is not None and layer_size >= len(best):
            continue
        dist = graph.bfs_distances([s])
        layer = set(int(v) for v in np.flatnonzero(dist == d))
        shrunk = _shrink_cut(graph, layer, limit)
        if best is None or len(shrunk) < len(best):
            best = shrunk

    if best is None:
        return trivial

    # local search: drop or swap single vertices while validity holds
    if n <= LOCAL_SEARCH_NODE_CAP and best:
        current = set(best)
        checks = 0
        improved = False
        while checks < budget:
            moved = False
            for v in sorted(current):
                trial = current - {v}
                checks += 1
                if is_valid_cut(graph, trial, delta):
                    current = trial
                    moved = True
                    improved = True
                    break
                if checks >= budget:
                    break
            if not moved and checks < budget and current:
                v = rng.choice(sorted(current))
                nbrs = [int(u) for u in graph.neighbors(v) if u not in current]
                if nbrs:
                    u = rng.choice(nbrs)
                    trial = (current - {v}) | {u}
                    checks += 1
                    if is_valid_cut(graph, trial, delta) and len(trial) <= len(current):
                        current = trial
                        continue
                break
        if improved and len(current) < len(best):
            best = current
            best_method = "local_search"

    cut = tuple(sorted(best))
    if not is_valid_cut(graph, cut, delta):
        return trivial  # defensive; shrink/local search should keep validity
    return CutReport(
        graph.tag,
        n,
        delta,
        "upper",
        best_method,
        len(cut),
        cut,
        census_after_removal(graph, cut),
    )


# -- far-pair flow lower bounds --------------------------------------------------


def _node_split_network(graph: StaticGraph) -> csr_matrix:
    """Directed capacity network: v_in = v, v_out = v + n, unit split arcs,
    wide arcs u_out -> v_in per directed edge.

    Rows 0..n-1 carry exactly the split arc of the vertex, so data[v] is the
    capacity of vertex v and can be patched in place per query."""
    n = graph.n
    big = np.int32(n + 1)
    deg = np.diff(graph.indptr)
    rows = np.concatenate([np.arange(n), np.repeat(np.arange(n), deg) + n])
    cols = np.concatenate([np.arange(n) + n, graph.indices.astype(np.int64)])
    data = np.concatenate([np.ones(n, dtype=np.int32), np.full(len(graph.indices), big, dtype=np.int32)])
    return csr_matrix((data, (rows, cols)), shape=(2 * n, 2 * n), dtype=np.int32)


def vertex_connectivity(graph: StaticGraph, x: int, y: int, network: Optional[csr_matrix] = None) -> int:
    """Minimum vertex cut separating non-adjacent x from y (Menger), via
    max-flow on the node-split network.  Adjacent pairs have no separator;
    the flow then exceeds n - 2, the largest possible connectivity."""
    if x == y:
        raise CutError("need two distinct vertices")
    net = network if network is not None else _node_split_network(graph)
    n = graph.n
    flow = maximum_flow(net, x + n, y).flow_value
    return int(flow)


def deep_pair_connectivity(
    graph: StaticGraph, x: int, y: int, depth: int, network: Optional[csr_matrix] = None
) -> Optional[int]:
    """Minimum vertex cut separating x from y that avoids both depth-balls
    B(x, depth) and B(y, depth) (intrinsic balls in the subject).

    This is the quantity the deep-components dichotomy controls: a balanced
    cut leaving x and y in different components at distance > depth from the
    cut must contain such a separator.  Returns None when the balls meet or
    touch (no such separator exists)."""
    if depth <= 0:
        return vertex_connectivity(graph, x, y, network)
    n = graph.n
    big = np.int32(n + 1)
    ball_x = graph.bfs_distances([x], limit=depth) <= depth
    ball_y = graph.bfs_distances([y], limit=depth) <= depth
    if (ball_x & ball_y).any():
        return None
    net = network if network is not None else _node_split_network(graph)
    data = net.data.copy()
    data[:n][ball_x | ball_y] = big
    patched = csr_matrix((data, net.indices, net.indptr), shape=net.shape)
    flow = int(maximum_flow(patched, x + n, y).flow_value)
    if flow > n:
        return None  # the balls are joined by an edge
    return flow


def flow_far_pair_lower_bound(
    graph: StaticGraph,
    delta: float,
    seed: int = 0,
    rho: float = 0.5,
    max_pairs: int = 32,
    depth: int = 0,
    pairs: Optional[Sequence[tuple[int, int]]] = None,
    anchor_pool: Optional[Sequence[int]] = None,
) -> CutReport:
    """Minimum over sampled far pairs of the vertex connectivity inside the
    subject, optionally at depth: with depth > 0 the separator must avoid
    the depth-balls of both endpoints.

    Pairs are sampled at intrinsic distance >= rho * (double-sweep diameter
    estimate); ``anchor_pool`` restricts where anchors may sit.  The value
    lower-bounds the size of every delta-cut that separates one of the
    sampled pairs and stays at distance > depth from both endpoints; the
    caveat that this is heuristic for the minimum delta-cut in general is
    recorded in the certificate.
    """
    n = graph.n
    if n < 3:
        raise CutError("subject too small for far pairs")
    if not graph.is_connected():
        raise CutError("subject is disconnected")
    u, v, diam_est = graph.eccentricity_estimate(0)
    min_dist = max(2.0 * depth + 2.0, rho * diam_est)

    chosen: list[tuple[int, int]] = []
    if pairs is not None:
        chosen = [(int(a), int(b)) for a, b in pairs]
    else:
        rng = random.Random(seed)
        pool = sorted(int(a) for a in anchor_pool) if anchor_pool is not None else list(range(n))
        k_anchors = min(len(pool), max(2, max_pairs))
        anchors = sorted(rng.sample(pool, k_anchors))
        per_anchor = max(1, max_pairs // max(1, len(anchors)))
        pool_arr = np.asarray(pool, dtype=np.int64)
        for a in anchors:
            if len(chosen) >= max_pairs:
                break
            dist = graph.bfs_distances([a])
            dp = dist[pool_arr]
            qualifying = pool_arr[(dp >= min_dist) & ~np.isinf(dp)]
            if qualifying.size == 0:
                continue
            far = int(qualifying[np.argmax(dist[qualifying])])
            picks = {far}
            extra = [int(q) for q in rng.sample(list(map(int, qualifying)), min(qualifying.size, per_anchor))]
            picks.update(extra[: max(0, per_anchor - 1)])
            for b in sorted(picks):
                if len(chosen) < max_pairs:
                    chosen.append((a, b))

    if not chosen:
        raise CutError("no far pairs found at the requested distance")

    net = _node_split_network(graph)
    kappa_min = None
    best_pair = None
    evaluated = []
    skipped = 0
    for a, b in chosen:
        if graph.has_edge(a, b):
            skipped += 1
            continue  # policy excludes adjacent pairs (no vertex separator)
        k = deep_pair_connectivity(graph, a, b, depth, net)
        if k is None:
            skipped += 1
            continue
        evaluated.append((a, b, k))
        if kappa_min is None or k < kappa_min:
            kappa_min = k
            best_pair = (a, b)
    if kappa_min is None:
        raise CutError("no usable far pairs (adjacent or overlapping depth-balls)")

    return CutReport(
        graph.tag,
        n,
        delta,
        "lower",
        "flow_far_pairs",
        int(kappa_min),
        (),
        (),
        certificate={
            "pair": list(best_pair or ()),
            "kappa": int(kappa_min),
            "depth": int(depth),
            "pairs_evaluated": len(evaluated),
            "pairs_skipped": skipped,
            "diameter_estimate": int(diam_est),
            "min_pair_distance": float(min_dist),
            "caveat": (
                "binds cuts that separate a sampled far pair at distance > depth "
                "from both endpoints; heuristic for the minimum delta-cut unless "
                "combined with a component-size analysis"
            ),
        },
    )


# -- partition property -----------------------------------------------------------


def verify_partition_lemma(graph: StaticGraph, report: CutReport) -> tuple[bool, dict]:
    """Check the two-sided partition property of a valid delta-cut: either
    the cut has size >= delta'*|S| with delta' = min(delta/4, (1-delta)/4),
    or the components split into two unions each of size >= delta'*|S|."""
    if report.bound == "lower":
        raise CutError("partition property applies to explicit cuts only")
    delta = report.delta
    cut = report.cut_set
    if not is_valid_cut(graph, cut, delta):
        raise CutError("input is not a valid delta-cut")
    n = graph.n
    dprime = min(delta / 4.0, (1.0 - delta) / 4.0)
    bound = dprime * n
    if len(cut) >= bound:
        return True, {"case": "big-cut", "cut_size": len(cut), "bound": bound}
    sizes = sorted(census_after_removal(graph, cut), reverse=True)
    if not sizes:
        return False, {"case": "empty", "bound": bound}
    if sizes[0] >= bound:
        a, b = sizes[0], sum(sizes[1:])
    else:
        acc = 0
        p = 0
        while p < len(sizes) and acc < bound:
            acc += sizes[p]
            p += 1
        a, b = acc, sum(sizes[p:])
    ok = a >= bound and b >= bound
    return ok, {"case": "partition", "A": a, "B": b, "bound": bound}


# -- experiments --------------------------------------------------------------------


@dataclass
class ExperimentRow:
    n: int
    t: int
    delta: float
    size: int
    upper: Optional[int]
    lower: Optional[int]
    exact: Optional[int]
    runtime_ms: Optional[int]
    flags: tuple[str, ...] = ()
    partition_ok: bool = True  # two-sided partition property of every produced cut


@dataclass
class ExperimentTable:
    subject: str
    t: int
    delta: float
    seed: int
    rows: list[ExperimentRow]
    lambda_upper: Fit
    lambda_lower: Fit
    fit_flag: str
    truncated: Optional[str] = None
    reports: list[CutReport] = field(default_factory=list)

    def csv_rows(self, include_timings: bool = False) -> list[str]:
        out = ["n,t,delta,size_subject,upper,lower,exact,lambda_fit_flag,runtime_ms,seed"]
        for r in self.rows:
            rt = str(r.runtime_ms) if (include_timings and r.runtime_ms is not None) else ""
            out.append(
                f"{r.n},{r.t},{r.delta:.6g},{r.size},"
                f"{'' if r.upper is None else r.upper},"
                f"{'' if r.lower is None else r.lower},"
                f"{'' if r.exact is None else r.exact},"
                f"{self.fit_flag},{rt},{self.seed}"
            )
        return out


def resolve_depth(depth_policy, n: int, t: int) -> int:
    """Probe depth for the far-pair flow at sphere radius n.

    'deep' (default) separates the largest band-respecting neighbourhoods,
    depth = n - t; 'half' follows the deep-components dichotomy literally,
    depth = n // 2; 'none' is the plain single-vertex connectivity; an int
    is taken as-is."""
    if isinstance(depth_policy, int):
        return depth_policy
    if depth_policy == "deep":
        return max(0, n - t)
    if depth_policy == "half":
        return n // 2
    if depth_policy == "none":
        return 0
    raise ValueError(f"unknown depth policy {depth_policy!r}")


def cut_growth_experiment(
    gp,
    t: int,
    delta: float,
    n_range: Sequence[int],
    seed: int,
    engine: str = "auto",
    cap: Optional[int] = None,
    exact_threshold: int = EXACT_SIZE_THRESHOLD,
    max_pairs: int = 8,
    budget: int = 500,
    depth_policy="deep",
) -> ExperimentTable:
    """Cut bounds for thickened spheres S_n^{+t} over a range of radii, with
    log-linear rate fits on both bound series.

    Far-pair anchors are restricted to sphere-level vertices (band-edge
    vertices sit on shallow protrusions whose connectivity says nothing
    about balanced cuts).  Radii whose enumeration would exceed the element
    cap truncate the table; the truncation is recorded, not silently
    dropped.
    """
    from .cayley import CapExceeded, thickened_sphere  # local import, no cycle at module load

    rows: list[ExperimentRow] = []
    reports: list[CutReport] = []
    truncated = None
    for n in n_range:
        started = time.perf_counter()
        try:
            sub = thickened_sphere(gp, n, t, engine=engine, cap=cap)
        except CapExceeded as exc:
            truncated = f"n={n}: {exc}"
            break
        g = sub.graph
        flags = []
        partition_ok = True
        upper_rep = heuristic_cut(g, delta, budget=budget, seed=seed)
        reports.append(upper_rep)
        upper = upper_rep.value
        partition_ok &= verify_partition_lemma(g, upper_rep)[0]
        exact = None
        if len(sub) <= exact_threshold:
            exact_rep = exact_min_cut(g, delta, incumbent=upper_rep)
            reports.append(exact_rep)
            exact = exact_rep.value
            partition_ok &= verify_partition_lemma(g, exact_rep)[0]
        lower = None
        if sub.meta.get("connected", False):
            depth = resolve_depth(depth_policy, n, t)
            on_sphere = np.flatnonzero(sub.dist_center == n)
            lower_rep = flow_far_pair_lower_bound(
                g, delta, seed=seed, max_pairs=max_pairs, depth=depth, anchor_pool=on_sphere
            )
            reports.append(lower_rep)
            lower = lower_rep.value
        else:
            flags.append("disconnected")
        if lower is not None and upper is not None and lower > upper:
            flags.append("bound_order_violated")
        if not partition_ok:
            flags.append("partition_violated")
        ms = int(1000 * (time.perf_counter() - started))
        rows.append(
            ExperimentRow(
                n, t, delta, len(sub), upper, lower, exact, ms, tuple(flags), partition_ok
            )
        )

    ns = [r.n for r in rows]
    fit_up = fit_log_vs_x(ns, [r.upper if r.upper else 0 for r in rows])
    fit_lo = fit_log_vs_x(ns, [r.lower if r.lower else 0 for r in rows])
    fit_flag = "ok" if len(rows) >= 2 else "insufficient points"
    subject = f"graph_product(V={gp.n_vertices})"
    return ExperimentTable(
        subject, t, delta, seed, rows, fit_up, fit_lo, fit_flag, truncated, reports
    )


@dataclass
class SepProfileRow:
    kind: str
    n: int
    size: int
    upper: Optional[int]
    lower: Optional[int]
    partition_ok: bool = True


@dataclass
class SepProfileTable:
    rows: list[SepProfileRow]
    epsilon_hat: Fit
    flags: tuple[str, ...]
    reports: list[CutReport] = field(default_factory=list)

    def csv_rows(self) -> list[str]:
        out = ["kind,n,size,upper,lower"]
        for r in self.rows:
            out.append(
                f"{r.kind},{r.n},{r.size},"
                f"{'' if r.upper is None else r.upper},"
                f"{'' if r.lower is None else r.lower}"
            )
        return out


def sep_profile_estimate(
    gp,
    n_max: int,
    t: int = 2,
    seed: int = 0,
    engine: str = "auto",
    cap: Optional[int] = None,
    exact_threshold: int = EXACT_SIZE_THRESHOLD,
    max_pairs: int = 8,
    budget: int = 500,
) -> SepProfileTable:
    """Lower-bound estimate of the separation profile: best cut^{1/2} bounds
    of balls and thickened spheres against their sizes, with a log-log fit
    of the lower series."""
    from .cayley import CapExceeded, ball, thickened_sphere

    delta = 0.5
    rows: list[SepProfileRow] = []
    reports: list[CutReport] = []
    flags: list[str] = []
    subjects = []
    for n in range(1, n_max + 1):
        subjects.append(("ball", n))
        if n > t:
            subjects.append(("thickened_sphere", n))
    for kind, n in subjects:
        try:
            sub = ball(gp, n, engine=engine, cap=cap) if kind == "ball" else thickened_sphere(
                gp, n, t, engine=engine, cap=cap
            )
        except CapExceeded as exc:
            flags.append(f"truncated at {kind}({n}): element cap")
            break
        except ValueError:
            flags.append(f"stopped at {kind}({n}): group exhausted")
            break
        if kind == "ball" and sub.meta.get("level_sizes") and sub.meta["level_sizes"][-1] == 0:
            flags.append("finite-group-exhausted")
            rows.append(SepProfileRow(kind, n, len(sub), None, None))
            break
        g = sub.graph
        upper_rep = heuristic_cut(g, delta, budget=budget, seed=seed)
        reports.append(upper_rep)
        upper = upper_rep.value
        partition_ok = verify_partition_lemma(g, upper_rep)[0]
        if len(sub) <= exact_threshold:
            exact_rep = exact_min_cut(g, delta, incumbent=upper_rep)
            reports.append(exact_rep)
            upper = exact_rep.value
            partition_ok &= verify_partition_lemma(g, exact_rep)[0]
        lower = None
        if len(sub) >= 3 and g.is_connected():
            depth = resolve_depth("deep", n, t) if kind == "thickened_sphere" else n // 2
            pool = np.flatnonzero(sub.dist_center == n) if kind == "thickened_sphere" else None
            try:
                lower_rep = flow_far_pair_lower_bound(
                    g, delta, seed=seed, max_pairs=max_pairs, depth=depth, anchor_pool=pool
                )
                reports.append(lower_rep)
                lower = lower_rep.value
            except CutError:
                pass
        rows.append(SepProfileRow(kind, n, len(sub), upper, lower, partition_ok))
    # the profile is a running supremum: best known bound among subjects
    # of at most the given size
    best = 0
    staircase = []
    for r in sorted(rows, key=lambda r: r.size):
        if r.lower:
            best = max(best, r.lower)
        if best:
            staircase.append((r.size, best))
    eps = fit_log_vs_log([s for s, _ in staircase], [b for _, b in staircase])
    return SepProfileTable(rows, eps, tuple(flags), reports)
