"""Exact arithmetic in a graph product of concrete finite groups.

Elements are canonical normal forms: syllable sequences admitting no
cancellation, merging, or further left-shuffling, put into block form
(each block a set of pairwise-commuting syllables, sorted by vertex id).
Two raw syllable sequences represent the same group element iff they
canonicalise to the same tuple, so equality, hashing and set membership
are all O(word length).

Metric convention used throughout the package: the generating set is the
union of all non-trivial vertex-group elements, so every syllable has
length 1 and the geodesic word length of an element equals the syllable
count of its normal form.  All measured growth and distortion constants
depend on this choice.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .graphs import LabeledGraph

PACK_PAYLOAD_BITS = 58  # low bits hold syllable fields, top 6 bits the length


class WordError(ValueError):
    """Invalid syllable data or mismatched ambient groups."""


@dataclass(frozen=True)
class Word:
    """A group element in canonical normal form.

    ``syllables`` is a tuple of (vertex, element-index) pairs; ``ambient``
    is the fingerprint of the graph product that produced it.
    """

    syllables: tuple[tuple[int, int], ...]
    ambient: int = 0

    def __len__(self) -> int:
        return len(self.syllables)

    def is_identity(self) -> bool:
        return not self.syllables

    def __repr__(self) -> str:  # noqa: D105
        return f"Word({format_word(self)})"


def format_word(w: Word | Sequence[tuple[int, int]]) -> str:
    """Textual syntax ``v3:2 v0:1``; the identity prints as ``e``."""
    syls = w.syllables if isinstance(w, Word) else tuple(w)
    if not syls:
        return "e"
    return " ".join(f"v{v}:{e}" for v, e in syls)


def parse_word_text(text: str) -> list[tuple[int, int]]:
    """Parse the ``v3:2 v0:1`` syntax into raw syllables (not reduced)."""
    text = text.strip()
    if text in ("", "e"):
        return []
    out = []
    for tok in text.split():
        if not tok.startswith("v") or ":" not in tok:
            raise WordError(f"bad syllable token {tok!r}")
        v, _, e = tok[1:].partition(":")
        out.append((int(v), int(e)))
    return out


class GraphProduct:
    """Word arithmetic context for one labelled graph with concrete labels."""

    def __init__(self, graph: LabeledGraph):
        if not graph.all_concrete():
            raise WordError("word arithmetic needs concrete multiplication tables")
        self.graph = graph
        self.n_vertices = graph.n
        self.orders = tuple(lab.order or 0 for lab in graph.labels)
        self._tables = tuple(lab.table or () for lab in graph.labels)
        self._invs = tuple(lab._inverse for lab in graph.labels)
        self._adj = graph.adj
        # generator codes: (v, e) -> base[v] + e - 1
        base = []
        acc = 0
        for k in self.orders:
            base.append(acc)
            acc += k - 1
        self._code_base = tuple(base)
        self.n_generators = acc
        self._gen_list = tuple(
            (v, e) for v in range(self.n_vertices) for e in range(1, self.orders[v])
        )
        bits = max(1, self.n_generators.bit_length())
        self.pack_bits = bits
        self.max_packed_len = PACK_PAYLOAD_BITS // bits
        self.fingerprint = hash((self.orders, tuple(sorted(graph.edges)), self._tables))
        self.identity = Word((), self.fingerprint)

    # -- small helpers ----------------------------------------------------

    def generators(self) -> tuple[tuple[int, int], ...]:
        """All (vertex, element) pairs with non-identity element."""
        return self._gen_list

    def mul_at(self, v: int, a: int, b: int) -> int:
        return self._tables[v][a][b]

    def inv_at(self, v: int, a: int) -> int:
        return self._invs[v][a]

    def _check_syllable(self, v: int, e: int) -> None:
        if not (0 <= v < self.n_vertices):
            raise WordError(f"vertex index {v} out of range")
        if not (0 <= e < self.orders[v]):
            raise WordError(f"element index {e} out of range for vertex {v}")

    def _check_ambient(self, w: Word) -> None:
        if w.ambient != self.fingerprint:
            raise WordError("word belongs to a different graph product")

    # -- reduction ---------------------------------------------------------

    def _push(self, out: list[list[int]], v: int, e: int) -> None:
        """Append one syllable to a reduced buffer, merging or cancelling
        against the active syllable at the same vertex if reachable through
        commuting syllables."""
        adj_v = self._adj[v]
        i = len(out) - 1
        while i >= 0:
            u, h = out[i]
            if u == v:
                m = self._tables[v][h][e]
                if m == 0:
                    out.pop(i)
                else:
                    out[i][1] = m
                return
            if u not in adj_v:
                break
            i -= 1
        out.append([v, e])

    def _cf_canonical(self, syls: list[list[int]]) -> tuple[tuple[int, int], ...]:
        """Canonical shuffle: peel off blocks of syllables that commute past
        everything before them, sorting each block by vertex id."""
        res: list[tuple[int, int]] = []
        rem: list[tuple[int, int]] = [(v, e) for v, e in syls]
        while rem:
            block: list[tuple[int, int]] = []
            rest: list[tuple[int, int]] = []
            prior: set[int] = set()
            for vj, ej in rem:
                # movable to the front iff every earlier vertex commutes
                if prior <= self._adj[vj]:
                    block.append((vj, ej))
                else:
                    rest.append((vj, ej))
                prior.add(vj)
            block.sort()
            res.extend(block)
            rem = rest
        return tuple(res)

    def _reduce_seq(self, seq: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
        out: list[list[int]] = []
        for v, e in seq:
            self._check_syllable(v, e)
            if e == 0:
                continue
            self._push(out, v, e)
        return self._cf_canonical(out)

    def word(self, raw: Iterable[tuple[int, int]]) -> Word:
        """Canonical normal form of an arbitrary syllable sequence."""
        return Word(self._reduce_seq(raw), self.fingerprint)

    def word_from_text(self, text: str) -> Word:
        return self.word(parse_word_text(text))

    # -- group operations ---------------------------------------------------

    def multiply(self, x: Word, y: Word) -> Word:
        self._check_ambient(x)
        self._check_ambient(y)
        return Word(self._reduce_seq(x.syllables + y.syllables), self.fingerprint)

    def inverse(self, x: Word) -> Word:
        self._check_ambient(x)
        rev = [(v, self._invs[v][e]) for v, e in reversed(x.syllables)]
        return Word(self._reduce_seq(rev), self.fingerprint)

    def equals(self, x: Word, y: Word) -> bool:
        self._check_ambient(x)
        self._check_ambient(y)
        return x.syllables == y.syllables

    def syllable_length(self, x: Word) -> int:
        return len(x.syllables)

    def word_length(self, x: Word) -> int:
        # every non-trivial vertex-group element is a generator, so each
        # syllable contributes exactly 1
        return len(x.syllables)

    def distance(self, x: Word, y: Word) -> int:
        """Geodesic distance in the Cayley graph, exact under the fixed
        generating set: the syllable length of x^-1 y."""
        return len(self.multiply(self.inverse(x), y).syllables)

    def random_word(self, seed: int | random.Random, n: int) -> Word:
        """Reduce a sequence of n syllables drawn uniformly (vertex uniform,
        then non-identity element uniform); deterministic in the seed."""
        rng = seed if isinstance(seed, random.Random) else random.Random(seed)
        raw = []
        for _ in range(n):
            v = rng.randrange(self.n_vertices)
            e = rng.randrange(1, self.orders[v])
            raw.append((v, e))
        return self.word(raw)

    # -- syllable-wise embeddings -------------------------------------------

    def embed_phi(
        self,
        iotas: Sequence[Sequence[int]],
        x: Word,
        target: "GraphProduct",
    ) -> Word:
        """Image of a normal form under per-vertex injections into another
        graph product over the same graph.

        ``iotas[v][e]`` is the image of element e of vertex group v; images
        of non-identity elements must be non-identity and distinct.  The
        image of a reduced word is reduced (same vertex pattern), so the map
        is well defined on elements.
        """
        self._check_ambient(x)
        if target.n_vertices != self.n_vertices or target.graph.edges != self.graph.edges:
            raise WordError("embedding requires the same defining graph on both sides")
        for v in range(self.n_vertices):
            imgs = [iotas[v][e] for e in range(1, self.orders[v])]
            if any(i == 0 for i in imgs):
                raise WordError(f"iota at vertex {v} sends a non-identity element to identity")
            if len(set(imgs)) != len(imgs):
                raise WordError(f"iota at vertex {v} is not injective")
            for i in imgs:
                if not (0 <= i < target.orders[v]):
                    raise WordError(f"iota image {i} out of range at vertex {v}")
        mapped = [(v, iotas[v][e]) for v, e in x.syllables]
        return target.word(mapped)

    # -- packing -------------------------------------------------------------

    def code_of(self, v: int, e: int) -> int:
        return self._code_base[v] + e - 1

    def gen_of_code(self, code: int) -> tuple[int, int]:
        return self._gen_list[code]

    def pack(self, syllables: Sequence[tuple[int, int]]) -> Optional[int]:
        """Encode a normal form into one 64-bit integer, or None if too long.

        Length sits in the top 6 bits, so packed values sort by length first;
        the order is total and engine-independent.
        """
        m = len(syllables)
        if m > self.max_packed_len:
            return None
        val = m << PACK_PAYLOAD_BITS
        bits = self.pack_bits
        for i, (v, e) in enumerate(syllables):
            val |= (self.code_of(v, e) + 1) << (i * bits)
        return val

    def unpack(self, val: int) -> tuple[tuple[int, int], ...]:
        m = val >> PACK_PAYLOAD_BITS
        bits = self.pack_bits
        mask = (1 << bits) - 1
        out = []
        for i in range(m):
            code = ((val >> (i * bits)) & mask) - 1
            out.append(self._gen_list[code])
        return tuple(out)

    def word_from_packed(self, val: int) -> Word:
        return Word(self.unpack(int(val)), self.fingerprint)
