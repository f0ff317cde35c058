"""Finite labelled graphs and the graph-theoretic predicates the
classification rules consume: square-freeness, separating subsets, join
decompositions, links/stars, and enumeration of separating subsets shaped
like (clique) * (two non-adjacent involution vertices).

Subgraphs are always vertex subsets with induced edges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Optional, Sequence

from .groups import GroupTableError, VertexGroup, abstract, cyclic, from_table

SubgraphRef = frozenset[int]

ENUMERATION_VERTEX_CAP = 24  # separator enumeration refuses larger graphs
EXHAUSTIVE_SCAN_LIMIT = 16  # below this, scan all vertex subsets directly


class GraphFormatError(ValueError):
    """Raised for malformed graph documents or invariant violations."""


@dataclass(frozen=True)
class LabeledGraph:
    """Finite simple graph with a vertex group per vertex."""

    labels: tuple[VertexGroup, ...]
    edges: frozenset[tuple[int, int]]  # pairs (u, v) with u < v
    adj: tuple[frozenset[int], ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        n = len(self.labels)
        for (u, v) in self.edges:
            if u == v:
                raise GraphFormatError(f"loop at vertex {u}")
            if not (0 <= u < v < n):
                raise GraphFormatError(f"edge ({u},{v}) out of range or unordered")
        neigh = [set() for _ in range(n)]
        for (u, v) in self.edges:
            neigh[u].add(v)
            neigh[v].add(u)
        object.__setattr__(self, "adj", tuple(frozenset(s) for s in neigh))

    @property
    def n(self) -> int:
        return len(self.labels)

    def vertices(self) -> range:
        return range(self.n)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def all_finite(self) -> bool:
        return all(g.is_finite for g in self.labels)

    def all_concrete(self) -> bool:
        return all(g.is_concrete for g in self.labels)

    def is_complete_on(self, vs: Iterable[int]) -> bool:
        vs = list(vs)
        return all(self.has_edge(u, v) for u, v in combinations(vs, 2))

    def is_complete(self) -> bool:
        return self.is_complete_on(self.vertices())

    def components_of(self, vs: Iterable[int]) -> list[frozenset[int]]:
        """Connected components of the induced subgraph on vs."""
        vs = set(vs)
        comps = []
        seen: set[int] = set()
        for start in sorted(vs):
            if start in seen:
                continue
            comp = {start}
            stack = [start]
            while stack:
                x = stack.pop()
                for y in self.adj[x]:
                    if y in vs and y not in comp:
                        comp.add(y)
                        stack.append(y)
            seen |= comp
            comps.append(frozenset(comp))
        return comps


def graph(labels: Sequence[VertexGroup], edges: Iterable[Sequence[int]]) -> LabeledGraph:
    """Build a LabeledGraph, normalising and validating the edge list."""
    norm = set()
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if u == v:
            raise GraphFormatError(f"loop at vertex {u}")
        norm.add((min(u, v), max(u, v)))
    return LabeledGraph(labels=tuple(labels), edges=frozenset(norm))


def cycle_graph(labels: Sequence[VertexGroup]) -> LabeledGraph:
    n = len(labels)
    return graph(labels, [(i, (i + 1) % n) for i in range(n)])


def complete_labeled_graph(labels: Sequence[VertexGroup]) -> LabeledGraph:
    n = len(labels)
    return graph(labels, combinations(range(n), 2))


# -- document format ------------------------------------------------------

def _parse_group(doc: object) -> VertexGroup:
    if not isinstance(doc, dict) or len(doc) != 1:
        raise GraphFormatError(f"group must be an object with one key, got {doc!r}")
    (kind, val), = doc.items()
    if kind == "cyclic":
        if not isinstance(val, int):
            raise GraphFormatError("cyclic order must be an integer")
        return cyclic(val)
    if kind == "table":
        return from_table(val)
    if kind == "abstract":
        if not isinstance(val, dict):
            raise GraphFormatError("abstract label must be an object")
        order = val.get("order", "infinite")
        if order == "infinite":
            order = None
        elif not isinstance(order, int):
            raise GraphFormatError("abstract order must be an integer or 'infinite'")
        known = {"order", "hyperbolic", "virtually_infinite_cyclic", "virtual_surface"}
        extra = set(val) - known
        if extra:
            raise GraphFormatError(f"unknown abstract flags: {sorted(extra)}")
        return abstract(
            order=order,
            hyperbolic=val.get("hyperbolic"),
            virtually_infinite_cyclic=val.get("virtually_infinite_cyclic"),
            virtual_surface=val.get("virtual_surface"),
        )
    raise GraphFormatError(f"unknown group kind {kind!r}")


def parse_graph(text: str) -> LabeledGraph:
    """Parse the JSON graph document format.

    Shape: ``{"vertices": [{"id": i, "group": {...}}, ...], "edges": [[i,j], ...]}``
    with vertex ids exactly 0..V-1 and group one of ``{"cyclic": k}``,
    ``{"table": [[...]]}``, ``{"abstract": {...}}``.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "vertices" not in doc or "edges" not in doc:
        raise GraphFormatError("document must have 'vertices' and 'edges'")
    verts = doc["vertices"]
    ids = [v.get("id") for v in verts]
    if sorted(ids) != list(range(len(verts))):
        raise GraphFormatError("vertex ids must be exactly 0..V-1")
    labels: list[Optional[VertexGroup]] = [None] * len(verts)
    for v in verts:
        try:
            labels[v["id"]] = _parse_group(v["group"])
        except GroupTableError as exc:
            raise GraphFormatError(f"vertex {v['id']}: {exc}") from exc
    edges = doc["edges"]
    seen = set()
    for e in edges:
        if not (isinstance(e, list) and len(e) == 2):
            raise GraphFormatError(f"edge {e!r} is not a pair")
        u, v = e
        if not (0 <= u < len(verts) and 0 <= v < len(verts)):
            raise GraphFormatError(f"edge ({u},{v}) references unknown vertex")
        if u == v:
            raise GraphFormatError(f"loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"multi-edge ({u},{v})")
        seen.add(key)
    return graph([g for g in labels if g is not None], edges)


def graph_to_json(g: LabeledGraph) -> dict:
    """Inverse of parse_graph for concrete/abstract labels."""
    verts = []
    for i, lab in enumerate(g.labels):
        if lab.is_concrete:
            grp: dict = {"table": [list(r) for r in lab.table or ()]}
            # compact form for cyclic tables
            k = lab.order or 0
            if lab.table == tuple(tuple((a + b) % k for b in range(k)) for a in range(k)):
                grp = {"cyclic": k}
        else:
            grp = {
                "abstract": {
                    "order": lab.order if lab.order is not None else "infinite",
                    "hyperbolic": lab.hyperbolic,
                    "virtually_infinite_cyclic": lab.virtually_infinite_cyclic,
                    "virtual_surface": lab.virtual_surface,
                }
            }
        verts.append({"id": i, "group": grp})
    return {"vertices": verts, "edges": [list(e) for e in sorted(g.edges)]}


# -- predicates ------------------------------------------------------------

def is_square_free(g: LabeledGraph) -> bool:
    """True iff the graph has no induced 4-cycle.

    An induced square has two non-adjacent vertices whose common
    neighbourhood contains another non-adjacent pair, so we scan
    non-adjacent pairs instead of all 4-subsets.
    """
    return find_induced_square(g) is None


def find_induced_square(g: LabeledGraph) -> Optional[tuple[int, int, int, int]]:
    """An induced 4-cycle (u, x, w, y) with u-x-w-y-u, or None."""
    for u in g.vertices():
        for w in range(u + 1, g.n):
            if g.has_edge(u, w):
                continue
            common = sorted(g.adj[u] & g.adj[w])
            for x, y in combinations(common, 2):
                if not g.has_edge(x, y):
                    return (u, x, w, y)
    return None


def is_separating(g: LabeledGraph, sub: Iterable[int]) -> bool:
    """True iff removing the subset leaves >= 2 connected components."""
    sub = frozenset(sub)
    rest = set(g.vertices()) - sub
    if not rest:
        raise GraphFormatError("subset equals the whole vertex set")
    return len(g.components_of(rest)) >= 2


def link(g: LabeledGraph, u: int) -> SubgraphRef:
    return frozenset(g.adj[u])


def star(g: LabeledGraph, u: int) -> SubgraphRef:
    return frozenset(g.adj[u] | {u})


def link_of(g: LabeledGraph, sub: Iterable[int]) -> SubgraphRef:
    """Vertices outside the subset adjacent to every vertex of it."""
    sub = frozenset(sub)
    out = set(g.vertices()) - sub
    for u in sub:
        out &= g.adj[u]
    return frozenset(out)


def join_decomposition(g: LabeledGraph) -> tuple[SubgraphRef, list[SubgraphRef]]:
    """Split the graph as (complete part) * part_1 * ... * part_n.

    The parts are the connected components of the complement graph with at
    least two vertices; the complete part collects the vertices isolated in
    the complement (those adjacent to everything else).  Each part is itself
    not a join, since its complement is connected.
    """
    n = g.n
    comp_adj = [set(range(n)) - g.adj[u] - {u} for u in range(n)]
    seen: set[int] = set()
    cone: set[int] = set()
    parts: list[SubgraphRef] = []
    for start in range(n):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in comp_adj[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        if len(comp) == 1:
            cone |= comp
        else:
            parts.append(frozenset(comp))
    return frozenset(cone), sorted(parts, key=sorted)


def rebuild_from_join(
    g: LabeledGraph, cone: SubgraphRef, parts: Sequence[SubgraphRef]
) -> LabeledGraph:
    """Reassemble the graph from a join decomposition (round-trip check)."""
    groups = [set(cone)] + [set(p) for p in parts]
    edges = set()
    for a, b in combinations(range(len(groups)), 2):
        for u in groups[a]:
            for v in groups[b]:
                edges.add((min(u, v), max(u, v)))
    for u, v in combinations(sorted(cone), 2):
        edges.add((u, v))
    for p in parts:
        for u, v in combinations(sorted(p), 2):
            if g.has_edge(u, v):
                edges.add((u, v))
    return graph(g.labels, edges)


def is_induced_cycle(g: LabeledGraph, vs: Iterable[int]) -> bool:
    """True iff the induced subgraph on vs is a single cycle (length >= 3)."""
    vs = frozenset(vs)
    if len(vs) < 3:
        return False
    for u in vs:
        if len(g.adj[u] & vs) != 2:
            return False
    return len(g.components_of(vs)) == 1


# -- separator enumeration --------------------------------------------------

def _has_vc_shape(g: LabeledGraph, sub: frozenset[int]) -> bool:
    """Does the subset decompose as (clique) * (empty or non-adjacent Z2 pair)?"""
    nonadj = [
        (u, v) for u, v in combinations(sorted(sub), 2) if not g.has_edge(u, v)
    ]
    if not nonadj:
        return True  # the subset is a clique, pair part empty
    if len(nonadj) > 1:
        return False
    u, v = nonadj[0]
    if not (g.labels[u].is_z2 and g.labels[v].is_z2):
        return False
    rest = sub - {u, v}
    # the join condition: every clique vertex adjacent to both u and v
    return all(g.has_edge(w, u) and g.has_edge(w, v) for w in rest)


def _maximal_cliques(g: LabeledGraph) -> Iterator[frozenset[int]]:
    """Bron-Kerbosch with pivoting."""

    def expand(r: set[int], p: set[int], x: set[int]) -> Iterator[frozenset[int]]:
        if not p and not x:
            yield frozenset(r)
            return
        pivot = max(p | x, key=lambda u: len(g.adj[u] & p))
        for v in sorted(p - g.adj[pivot]):
            yield from expand(r | {v}, p & g.adj[v], x & g.adj[v])
            p.remove(v)
            x.add(v)

    yield from expand(set(), set(g.vertices()), set())


def enumerate_candidate_vc_separators(
    g: LabeledGraph, strategy: str = "auto"
) -> Iterator[SubgraphRef]:
    """Separating subsets of the form A * B, A a clique, B empty or a
    non-adjacent pair of Z2-labelled vertices.

    The empty subset qualifies exactly when the graph is disconnected.
    Yields each qualifying vertex subset once, in sorted order.  Strategy
    'exhaustive' scans all subsets; 'cliques' enumerates clique subsets and
    Z2-pair extensions; 'auto' picks by vertex count.
    """
    if not g.all_finite():
        raise GraphFormatError("separator enumeration requires finite labels")
    if g.n > ENUMERATION_VERTEX_CAP:
        raise GraphFormatError(
            f"graph has {g.n} vertices, enumeration capped at {ENUMERATION_VERTEX_CAP}"
        )
    if strategy == "auto":
        strategy = "exhaustive" if g.n < EXHAUSTIVE_SCAN_LIMIT else "cliques"

    found: set[frozenset[int]] = set()
    if strategy == "exhaustive":
        for size in range(g.n):  # proper subsets only
            for combo in combinations(range(g.n), size):
                sub = frozenset(combo)
                if _has_vc_shape(g, sub) and is_separating(g, sub):
                    found.add(sub)
    elif strategy == "cliques":
        # clique case: subsets of maximal cliques (plus the empty set)
        clique_subsets: set[frozenset[int]] = {frozenset()}
        for mc in _maximal_cliques(g):
            for size in range(1, len(mc) + 1):
                for combo in combinations(sorted(mc), size):
                    clique_subsets.add(frozenset(combo))
        for sub in clique_subsets:
            if len(sub) < g.n and is_separating(g, sub):
                found.add(sub)
        # pair case: non-adjacent Z2 pairs joined with cliques in their link
        for u, v in combinations(range(g.n), 2):
            if g.has_edge(u, v):
                continue
            if not (g.labels[u].is_z2 and g.labels[v].is_z2):
                continue
            common = sorted(link_of(g, {u, v}))
            pair_cliques: set[frozenset[int]] = {frozenset()}
            for size in range(1, len(common) + 1):
                for combo in combinations(common, size):
                    if g.is_complete_on(combo):
                        pair_cliques.add(frozenset(combo))
            for a in pair_cliques:
                sub = a | {u, v}
                if len(sub) < g.n and is_separating(g, sub):
                    found.add(sub)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    yield from sorted(found, key=lambda s: (len(s), sorted(s)))


def find_separating_clique(g: LabeledGraph) -> Optional[SubgraphRef]:
    """Smallest separating complete subset, or None.

    The empty set counts when the graph is disconnected (free-product case).
    """
    if len(g.components_of(g.vertices())) >= 2:
        return frozenset()
    for size in range(1, g.n):
        for combo in combinations(range(g.n), size):
            if g.is_complete_on(combo) and is_separating(g, combo):
                return frozenset(combo)
    return None
