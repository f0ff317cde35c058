"""Finite pieces of the Cayley graph of a graph product: balls, spheres and
thickened spheres with their intrinsic adjacency, plus the growth,
persistence and distortion measurements taken on them.

All enumeration is centred at the identity; left translation is an isometry,
so sphere and thickened-sphere sizes around any other centre agree, and the
persistence check translates the identity-centred set where it needs
arbitrary centres.

Distances are exact: with the whole-vertex-group generating set the geodesic
length of an element equals the syllable count of its normal form, so BFS
levels are the length classes.  Two engines compute the same arrays: a
plain-dict BFS and a compiled batch engine ('fast', the default when numba
is importable); the tests check they produce identical levels and adjacency.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _fast
from .fits import EMPTY_FIT, Fit, fit_log_vs_log, fit_log_vs_x
from .vgraph import StaticGraph
from .words import PACK_PAYLOAD_BITS, GraphProduct, Word, format_word

DEFAULT_ELEMENT_CAP = 5_000_000
CAP_ENV_VAR = "COARSESEP_MEM_CAP"


class CapExceeded(RuntimeError):
    """Enumeration aborted: the element cap would be exceeded."""

    def __init__(self, msg: str, radius: int, total: int, cap: int):
        super().__init__(msg)
        self.radius = radius
        self.total = total
        self.cap = cap


def resolve_cap(cap: Optional[int]) -> int:
    if cap is not None:
        return int(cap)
    env = os.environ.get(CAP_ENV_VAR)
    if env:
        return int(env)
    return DEFAULT_ELEMENT_CAP


def resolve_engine(engine: str) -> str:
    if engine == "auto":
        return "fast" if _fast.HAVE_NUMBA else "python"
    if engine not in ("fast", "python"):
        raise ValueError(f"unknown engine {engine!r}")
    if engine == "fast" and not _fast.HAVE_NUMBA:
        raise RuntimeError("fast engine requested but numba is unavailable")
    return engine


def _fast_ctx(gp: GraphProduct) -> _fast.FastContext:
    ctx = getattr(gp, "_fast_context", None)
    if ctx is None:
        ctx = _fast.build_context(gp)
        gp._fast_context = ctx  # type: ignore[attr-defined]
    return ctx


def _require_packable(gp: GraphProduct, max_radius: int) -> None:
    limit = min(gp.max_packed_len, _fast.MAX_PACK_SYLLABLES)
    if max_radius > limit:
        raise ValueError(
            f"radius {max_radius} exceeds the packed word capacity of {limit} "
            f"syllables for this graph product"
        )


def _append_batch(gp: GraphProduct, engine: str, vals: np.ndarray, code: int) -> np.ndarray:
    if engine == "fast":
        return _fast.append_code_batch(_fast_ctx(gp), vals, code)
    v, e = gp.gen_of_code(code)
    out = np.empty_like(vals)
    for i, val in enumerate(vals):
        syl = gp.unpack(int(val))
        p = gp.pack(gp._reduce_seq(syl + ((v, e),)))
        out[i] = -1 if p is None else p
    return out


# -- level enumeration -------------------------------------------------------


def _check_cap(total: int, n: int, cap: int, projected: Optional[int] = None) -> None:
    if total > cap or (projected is not None and projected > cap):
        kind = "projected " if total <= cap else ""
        raise CapExceeded(
            f"{kind}ball size at radius {n} exceeds element cap {cap}",
            radius=n,
            total=max(total, projected or 0),
            cap=cap,
        )


def _levels_fast(gp: GraphProduct, n_max: int, cap: int) -> list[np.ndarray]:
    ctx = _fast_ctx(gp)
    levels = [np.array([gp.pack(())], dtype=np.int64)]
    total = 1
    for n in range(1, n_max + 1):
        prev = levels[-1]
        if len(levels) >= 3 and levels[-2].size > 0 and prev.size > 0:
            ratio = prev.size / levels[-2].size
            _check_cap(total, n, cap, projected=total + int(prev.size * max(1.0, ratio)))
        acc: Optional[np.ndarray] = None
        for code in range(gp.n_generators):
            out = _fast.append_code_batch(ctx, prev, code)
            out = out[(out >> PACK_PAYLOAD_BITS) == n]
            acc = out if acc is None else np.union1d(acc, out)
        level = np.unique(acc) if acc is not None else np.zeros(0, dtype=np.int64)
        total += level.size
        _check_cap(total, n, cap)
        levels.append(level)
    return levels


def _levels_python(gp: GraphProduct, n_max: int, cap: int) -> list[np.ndarray]:
    """Reference BFS over normal-form tuples; asserts that discovery depth
    equals syllable length before trusting it."""
    seen: set[tuple] = {()}
    frontier: list[tuple] = [()]
    levels = [np.array([gp.pack(())], dtype=np.int64)]
    total = 1
    gens = gp.generators()
    for n in range(1, n_max + 1):
        nxt: set[tuple] = set()
        for syl in frontier:
            for v, e in gens:
                w = gp._reduce_seq(syl + ((v, e),))
                if w not in seen and w not in nxt:
                    if len(w) != n:
                        raise AssertionError(
                            "BFS depth disagrees with syllable length; "
                            "normal form reduction is broken"
                        )
                    nxt.add(w)
        total += len(nxt)
        _check_cap(total, n, cap)
        packed = np.sort(np.array([gp.pack(w) for w in nxt], dtype=np.int64)) if nxt else np.zeros(0, dtype=np.int64)
        levels.append(packed)
        seen |= nxt
        frontier = list(nxt)
    return levels


def enumerate_levels(
    gp: GraphProduct, n_max: int, engine: str = "auto", cap: Optional[int] = None
) -> list[np.ndarray]:
    """Sphere S_n for n = 0..n_max as sorted arrays of packed normal forms."""
    engine = resolve_engine(engine)
    cap = resolve_cap(cap)
    _require_packable(gp, n_max)
    if engine == "fast":
        return _levels_fast(gp, n_max, cap)
    return _levels_python(gp, n_max, cap)


def _adjacency_csr(
    gp: GraphProduct, engine: str, elements: np.ndarray
) -> StaticGraph:
    """Induced Cayley adjacency on a sorted packed element array."""
    n = elements.size
    rows_all = []
    cols_all = []
    base = np.arange(n, dtype=np.int64)
    for code in range(gp.n_generators):
        nbr = _append_batch(gp, engine, elements, code)
        pos = np.searchsorted(elements, nbr)
        pos[pos >= n] = n - 1 if n else 0
        hit = (elements[pos] == nbr) if n else np.zeros(0, dtype=bool)
        rows_all.append(base[hit])
        cols_all.append(pos[hit].astype(np.int64))
    rows = np.concatenate(rows_all) if rows_all else np.zeros(0, dtype=np.int64)
    cols = np.concatenate(cols_all) if cols_all else np.zeros(0, dtype=np.int64)
    order = np.lexsort((cols, rows))
    rows = rows[order]
    cols = cols[order].astype(np.int32)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    return StaticGraph(np.cumsum(indptr), cols)


# -- subgraphs ----------------------------------------------------------------


@dataclass
class CayleySubgraph:
    """An induced finite piece of the Cayley graph.

    ``packed`` holds the canonical normal forms sorted length-major; the
    adjacency is the induced one (edge iff distance 1 in the group).
    """

    gp: GraphProduct
    tag: str
    packed: np.ndarray
    graph: StaticGraph
    dist_center: np.ndarray
    params: dict
    dist_sphere: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.packed.size)

    @property
    def center(self) -> Word:
        return self.gp.identity

    def word(self, i: int) -> Word:
        return self.gp.word_from_packed(int(self.packed[i]))

    def words(self) -> Iterable[Word]:
        for val in self.packed:
            yield self.gp.word_from_packed(int(val))

    def index_of(self, w: Word) -> Optional[int]:
        val = self.gp.pack(w.syllables)
        if val is None:
            return None
        pos = int(np.searchsorted(self.packed, val))
        if pos < len(self) and self.packed[pos] == val:
            return pos
        return None

    def verify_tag_invariant(self) -> bool:
        """Every element's distance to the centre matches the tag."""
        kind = self.params.get("kind")
        n = self.params.get("n")
        t = self.params.get("t")
        lens = self.dist_center
        if kind == "ball":
            return bool((lens <= n).all())
        if kind == "sphere":
            return bool((lens == n).all())
        if kind == "thickened_sphere":
            band = (lens >= n - t) & (lens <= n + t)
            near = self.dist_sphere is not None and bool((self.dist_sphere <= t).all())
            return bool(band.all()) and near
        return True


def _subgraph_from_elements(
    gp: GraphProduct, engine: str, elements: np.ndarray, tag: str, params: dict
) -> CayleySubgraph:
    graph = _adjacency_csr(gp, engine, elements)
    graph.tag = tag
    lens = (elements >> PACK_PAYLOAD_BITS).astype(np.int32)
    return CayleySubgraph(gp, tag, elements, graph, lens, params)


def ball(
    gp: GraphProduct, n: int, engine: str = "auto", cap: Optional[int] = None
) -> CayleySubgraph:
    engine = resolve_engine(engine)
    levels = enumerate_levels(gp, n, engine, cap)
    elements = np.concatenate(levels)
    sub = _subgraph_from_elements(gp, engine, elements, f"ball({n})", {"kind": "ball", "n": n})
    sub.meta["level_sizes"] = [int(l.size) for l in levels]
    return sub


def sphere(
    gp: GraphProduct, n: int, engine: str = "auto", cap: Optional[int] = None
) -> CayleySubgraph:
    engine = resolve_engine(engine)
    levels = enumerate_levels(gp, n, engine, cap)
    return _subgraph_from_elements(
        gp, engine, levels[n], f"sphere({n})", {"kind": "sphere", "n": n}
    )


def thickened_sphere(
    gp: GraphProduct,
    n: int,
    t: int,
    engine: str = "auto",
    cap: Optional[int] = None,
) -> CayleySubgraph:
    """All elements within distance t of the radius-n sphere, with induced
    adjacency.

    Every path of length <= t from the sphere stays inside the radius-(n+t)
    ball, so a multi-source BFS from S_n restricted to that ball computes
    the true distances d(., S_n).
    """
    if t < 1:
        raise ValueError("thickening t must be >= 1")
    if n <= t:
        raise ValueError("need n > t for a thickened sphere")
    engine = resolve_engine(engine)
    levels = enumerate_levels(gp, n + t, engine, cap)
    elements = np.concatenate(levels)
    ball_graph = _adjacency_csr(gp, engine, elements)
    off = sum(l.size for l in levels[:n])
    size_n = levels[n].size
    if size_n == 0:
        raise ValueError(f"sphere of radius {n} is empty (finite group exhausted)")
    dist = ball_graph.bfs_distances(range(off, off + size_n), limit=t)
    members = np.flatnonzero(dist <= t)
    member_elements = elements[members]
    sub_graph = ball_graph.induced(members)
    tag = f"thickened_sphere({n},{t})"
    sub_graph.tag = tag
    lens = (member_elements >> PACK_PAYLOAD_BITS).astype(np.int32)
    sub = CayleySubgraph(
        gp,
        tag,
        member_elements,
        sub_graph,
        lens,
        {"kind": "thickened_sphere", "n": n, "t": t},
        dist_sphere=dist[members].astype(np.int32),
    )
    n_comp, _ = sub_graph.component_labels()
    sub.meta["connected"] = n_comp == 1
    sub.meta["n_components"] = int(n_comp)
    sub.meta["level_sizes"] = [int(l.size) for l in levels]
    return sub


# -- growth -------------------------------------------------------------------


@dataclass
class GrowthTable:
    rows: list[tuple[int, int, int]]  # (n, |B_n|, |S_n|)
    alpha_hat: float
    fit: Fit
    poly_fit: Fit
    flag: str  # exponential | subexponential | stabilized
    fit_window: tuple[int, int]

    def csv_rows(self) -> list[str]:
        out = ["n,ball,sphere"]
        out += [f"{n},{b},{s}" for n, b, s in self.rows]
        return out


def growth_table(
    gp: GraphProduct,
    n_max: int,
    engine: str = "auto",
    cap: Optional[int] = None,
    fit_window: Optional[tuple[int, int]] = None,
) -> GrowthTable:
    """Ball/sphere counts with a least-squares rate on log |B_n|.

    The flag compares the exponential model log|B| ~ n against the
    polynomial model log|B| ~ log n; 'stabilized' wins when some sphere
    is empty (finite group).
    """
    levels = enumerate_levels(gp, n_max, engine, cap)
    rows = []
    total = 0
    for n, lvl in enumerate(levels):
        total += lvl.size
        rows.append((n, total, int(lvl.size)))
    lo, hi = fit_window if fit_window else (min(4, n_max), n_max)
    window = [(n, b) for n, b, _ in rows if lo <= n <= hi and b > 0]
    fit = fit_log_vs_x([w[0] for w in window], [w[1] for w in window])
    poly = fit_log_vs_log([w[0] for w in window if w[0] > 0], [w[1] for w in window if w[0] > 0])
    stabilized = any(s == 0 for n, _, s in rows if n >= 1)
    if stabilized:
        flag = "stabilized"
        alpha = 0.0
    else:
        better_poly = (poly.r2 if not math.isnan(poly.r2) else -1) > (
            fit.r2 if not math.isnan(fit.r2) else -1
        )
        flag = "subexponential" if better_poly else "exponential"
        alpha = fit.slope
    return GrowthTable(rows, alpha, fit, poly, flag, (lo, hi))


# -- persistence ---------------------------------------------------------------


@dataclass
class PersistenceRow:
    x_text: str
    y_text: str
    overlap: int
    family_size: int
    ratio: float
    threshold: float
    ok: bool
    subset_of_4r_ball: bool
    sizes_equal: bool


@dataclass
class PersistenceReport:
    r: int
    t: int
    family_size: int
    ball_t: int
    threshold: float
    rows: list[PersistenceRow]

    @property
    def all_ok(self) -> bool:
        return all(row.ok and row.subset_of_4r_ball and row.sizes_equal for row in self.rows)

    def csv_rows(self) -> list[str]:
        out = ["x,y,overlap,family_size,ratio,threshold,ok"]
        for row in self.rows:
            out.append(
                f"{row.x_text},{row.y_text},{row.overlap},{row.family_size},"
                f"{row.ratio:.6g},{row.threshold:.6g},{int(row.ok)}"
            )
        return out


def _translate_family(
    gp: GraphProduct, engine: str, center: Word, family: np.ndarray
) -> np.ndarray:
    if engine == "fast":
        out = _fast.prefix_mul_batch(_fast_ctx(gp), gp.pack(center.syllables), family)
        return np.sort(out)
    vals = np.empty_like(family)
    for i, val in enumerate(family):
        prod = gp._reduce_seq(center.syllables + gp.unpack(int(val)))
        vals[i] = gp.pack(prod)
    return np.sort(vals)


def persistence_check(
    gp: GraphProduct,
    r: int,
    t: int,
    n_pairs: int = 20,
    seed: int = 0,
    pairs: Optional[Sequence[tuple[Word, Word]]] = None,
    engine: str = "auto",
    cap: Optional[int] = None,
) -> PersistenceReport:
    """Overlap proportion of neighbouring thickened spheres A_x = S(x,r)^{+t}.

    For each neighbour pair (x, y) the overlap |A_x & A_y| / |A| is compared
    against the floor 1/|B_t|; the report also re-checks that A_x sits in
    B(x, 4r) and that both translates have equal size.
    """
    if not (r >= t >= 1):
        raise ValueError("need r >= t >= 1")
    engine = resolve_engine(engine)
    _require_packable(gp, 2 * r + t + 1)
    levels = enumerate_levels(gp, r + t, engine, cap)
    ball_t = sum(int(levels[k].size) for k in range(t + 1))
    elements = np.concatenate(levels)
    ball_graph = _adjacency_csr(gp, engine, elements)
    off = sum(l.size for l in levels[:r])
    dist = ball_graph.bfs_distances(range(off, off + levels[r].size), limit=t)
    family = elements[np.flatnonzero(dist <= t)]
    fam_size = int(family.size)
    threshold = 1.0 / ball_t

    rng = random.Random(seed)
    gens = gp.generators()
    chosen: list[tuple[Word, Word]] = []
    if pairs is not None:
        for x, y in pairs:
            d = gp.distance(x, y)
            if d > 1:
                raise ValueError(
                    f"pair ({format_word(x)}, {format_word(y)}) is not adjacent (d={d})"
                )
            chosen.append((x, y))
    else:
        for _ in range(n_pairs):
            x = gp.random_word(rng, r)
            v, e = gens[rng.randrange(len(gens))]
            y = gp.multiply(x, Word(((v, e),), gp.fingerprint))
            chosen.append((x, y))

    max_len = int((family >> PACK_PAYLOAD_BITS).max()) if fam_size else 0
    rows = []
    for x, y in chosen:
        ax = _translate_family(gp, engine, x, family)
        ay = _translate_family(gp, engine, y, family)
        overlap = int(np.intersect1d(ax, ay, assume_unique=True).size)
        ratio = overlap / fam_size if fam_size else 0.0
        rows.append(
            PersistenceRow(
                x_text=format_word(x),
                y_text=format_word(y),
                overlap=overlap,
                family_size=fam_size,
                ratio=ratio,
                threshold=threshold,
                ok=ratio >= threshold,
                subset_of_4r_ball=max_len <= 4 * r,
                sizes_equal=ax.size == ay.size,
            )
        )
    return PersistenceReport(r, t, fam_size, ball_t, threshold, rows)


# -- distortion ----------------------------------------------------------------


def intrinsic_distance(sub: CayleySubgraph, i: int, j: int) -> float:
    """Hop distance inside the subgraph; inf when disconnected."""
    n = len(sub)
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError("vertex index outside the subgraph")
    if i == j:
        return 0
    d = sub.graph.bfs_distances([i])[j]
    return math.inf if math.isinf(d) else int(d)


@dataclass
class DistortionReport:
    n: int
    t: int
    subject_size: int
    rows: list[tuple[int, int, int, float]]  # (i, j, d_ext, d_int)
    threshold: float
    fit: Fit
    flag: str

    def csv_rows(self) -> list[str]:
        out = ["i,j,d_extrinsic,d_intrinsic"]
        for i, j, de, di in self.rows:
            di_s = "inf" if math.isinf(di) else str(int(di))
            out.append(f"{i},{j},{de},{di_s}")
        return out


def distortion_report(
    gp: GraphProduct,
    n: int,
    t: int,
    n_pairs: int = 24,
    seed: int = 0,
    delta_proxy: float = 2.0,
    min_extrinsic: Optional[float] = None,
    include_self_pair: bool = False,
    engine: str = "auto",
    cap: Optional[int] = None,
    subgraph: Optional[CayleySubgraph] = None,
) -> DistortionReport:
    """Sample pairs in S_n^{+t} and compare group distance with distance
    inside the thickened sphere.

    The fitted slope uses rows with extrinsic distance at least
    ``min_extrinsic`` (default 9*delta_proxy + 6t, with a user-supplied
    hyperbolicity proxy, since the true constant is not computed).
    """
    sub = subgraph if subgraph is not None else thickened_sphere(gp, n, t, engine, cap)
    size = len(sub)
    threshold = float(min_extrinsic) if min_extrinsic is not None else 9.0 * delta_proxy + 6.0 * t
    rng = random.Random(seed)
    rows: list[tuple[int, int, int, float]] = []
    if include_self_pair and size:
        rows.append((0, 0, 0, 0.0))
    n_sources = max(2, min(size, int(math.isqrt(max(n_pairs, 1))) + 1))
    sources = rng.sample(range(size), n_sources)
    per_source = max(1, n_pairs // n_sources)
    words = {i: sub.word(i) for i in sources}
    for src in sources:
        d_int_all = sub.graph.bfs_distances([src])
        cands = rng.sample(range(size), min(size, 4 * per_source))
        x = words[src]
        scored = []
        for j in cands:
            if j == src:
                continue
            d_ext = gp.distance(x, sub.word(j))
            scored.append((d_ext, j))
        scored.sort(reverse=True)
        # spread picks across the whole distance range (the farthest pair
        # always included) so the fit sees more than one scale
        step = max(1, len(scored) // max(1, per_source))
        for d_ext, j in scored[::step][:per_source]:
            di = d_int_all[j]
            rows.append((src, j, d_ext, math.inf if math.isinf(di) else int(di)))
    usable = [(de, di) for _, _, de, di in rows if de >= threshold and not math.isinf(di) and di > 0]
    fit = fit_log_vs_x([u[0] for u in usable], [u[1] for u in usable]) if len(usable) >= 3 else EMPTY_FIT
    flag = "ok" if len(usable) >= 3 else "insufficient pairs above threshold"
    return DistortionReport(n, t, size, rows, threshold, fit, flag)


# -- export --------------------------------------------------------------------


def write_subgraph_csv(sub: CayleySubgraph, path: str) -> None:
    """Dump elements and adjacency: ``index,length,word,neighbors`` with
    neighbor indices space-separated."""
    with open(path, "w") as fh:
        fh.write("index,length,word,neighbors\n")
        for i in range(len(sub)):
            nbrs = " ".join(str(int(j)) for j in sub.graph.neighbors(i))
            fh.write(f"{i},{int(sub.dist_center[i])},{format_word(sub.word(i))},{nbrs}\n")
