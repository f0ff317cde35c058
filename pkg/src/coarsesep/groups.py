"""Vertex groups: concrete finite groups given by multiplication tables,
plus abstract placeholder labels carrying classification flags.

Concrete groups use 0-based element indices with identity 0.  Abstract
labels have no elements; they exist so that classification rules mentioning
properties like "virtually infinite cyclic" stay decidable (or explicitly
undecided) without a concrete model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

MAX_TABLE_ORDER = 64  # associativity is checked exhaustively, O(k^3)


class GroupTableError(ValueError):
    """Raised for malformed or invalid multiplication tables."""


def _check_table(table: Sequence[Sequence[int]]) -> None:
    k = len(table)
    if k < 2:
        raise GroupTableError("trivial vertex group: order must be >= 2")
    if k > MAX_TABLE_ORDER:
        raise GroupTableError(f"table order {k} exceeds supported maximum {MAX_TABLE_ORDER}")
    for row in table:
        if len(row) != k or any(not (0 <= x < k) for x in row):
            raise GroupTableError("table is not a k x k array over element indices 0..k-1")
    for a in range(k):
        if table[0][a] != a or table[a][0] != a:
            raise GroupTableError("index 0 is not a two-sided identity")
    # two-sided inverses: each row and column must contain 0
    for a in range(k):
        if 0 not in table[a]:
            raise GroupTableError(f"element {a} has no right inverse")
        if all(table[b][a] != 0 for b in range(k)):
            raise GroupTableError(f"element {a} has no left inverse")
    for a in range(k):
        for b in range(k):
            tab = table[a][b]
            for c in range(k):
                if table[tab][c] != table[a][table[b][c]]:
                    raise GroupTableError(
                        f"non-associative: ({a}.{b}).{c} != {a}.({b}.{c})"
                    )


@dataclass(frozen=True)
class VertexGroup:
    """A group labelling one vertex of the defining graph.

    Either concrete (``table`` is a full multiplication table, identity 0)
    or abstract (``table`` is None; ``order`` is an int or None for
    infinite; the three flags are tri-state: True / False / None=unknown).
    """

    order: Optional[int]  # None means infinite (abstract only)
    table: Optional[tuple[tuple[int, ...], ...]] = None
    name: str = ""
    hyperbolic: Optional[bool] = None
    virtually_infinite_cyclic: Optional[bool] = None
    virtual_surface: Optional[bool] = None
    _inverse: tuple[int, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.table is not None:
            _check_table(self.table)
            if self.order != len(self.table):
                raise GroupTableError("declared order does not match table size")
            inv = [0] * self.order
            for a in range(self.order):
                inv[a] = self.table[a].index(0)
            object.__setattr__(self, "_inverse", tuple(inv))
            # finite groups fix the flags regardless of what was supplied
            object.__setattr__(self, "hyperbolic", True)
            object.__setattr__(self, "virtually_infinite_cyclic", False)
            object.__setattr__(self, "virtual_surface", False)
        else:
            if self.order is not None:
                if self.order < 2:
                    raise GroupTableError("trivial vertex group: order must be >= 2")
                # a finite group is hyperbolic, not virtually Z, not a
                # virtual surface group; reject contradictory flags
                if self.hyperbolic is False:
                    raise GroupTableError("finite group declared non-hyperbolic")
                if self.virtually_infinite_cyclic is True:
                    raise GroupTableError("finite group declared virtually infinite cyclic")
                if self.virtual_surface is True:
                    raise GroupTableError("finite group declared a virtual surface group")
                object.__setattr__(self, "hyperbolic", True)
                object.__setattr__(self, "virtually_infinite_cyclic", False)
                object.__setattr__(self, "virtual_surface", False)

    # -- basic structure -------------------------------------------------

    @property
    def is_concrete(self) -> bool:
        return self.table is not None

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    @property
    def is_z2(self) -> bool:
        # the order-2 group is unique, so a known order of 2 suffices
        return self.order == 2

    def mul(self, a: int, b: int) -> int:
        if self.table is None:
            raise GroupTableError("abstract label has no multiplication")
        return self.table[a][b]

    def inv(self, a: int) -> int:
        if self.table is None:
            raise GroupTableError("abstract label has no inverses")
        return self._inverse[a]

    def __repr__(self) -> str:  # noqa: D105
        if self.name:
            return f"VertexGroup({self.name})"
        if self.is_concrete:
            return f"VertexGroup(order={self.order})"
        return f"VertexGroup(abstract, order={self.order})"


def cyclic(k: int) -> VertexGroup:
    """Cyclic group Z_k with table (a+b) mod k."""
    if k < 2:
        raise GroupTableError("trivial vertex group: order must be >= 2")
    table = tuple(tuple((a + b) % k for b in range(k)) for a in range(k))
    return VertexGroup(order=k, table=table, name=f"Z{k}")


def from_table(table: Sequence[Sequence[int]], name: str = "") -> VertexGroup:
    """Concrete group from an explicit multiplication table (identity 0)."""
    tab = tuple(tuple(int(x) for x in row) for row in table)
    return VertexGroup(order=len(tab), table=tab, name=name)


def abstract(
    order: Optional[int] = None,
    hyperbolic: Optional[bool] = None,
    virtually_infinite_cyclic: Optional[bool] = None,
    virtual_surface: Optional[bool] = None,
    name: str = "",
) -> VertexGroup:
    """Abstract label: order None means infinite, flags may be unknown (None)."""
    return VertexGroup(
        order=order,
        table=None,
        name=name,
        hyperbolic=hyperbolic,
        virtually_infinite_cyclic=virtually_infinite_cyclic,
        virtual_surface=virtual_surface,
    )


def direct_product(g: VertexGroup, h: VertexGroup) -> VertexGroup:
    """Direct product of two concrete groups, elements packed as a*|H|+b.

    Used by tests as the oracle for multiplication closures over complete
    defining graphs.
    """
    if not (g.is_concrete and h.is_concrete):
        raise GroupTableError("direct product needs concrete factors")
    kg, kh = g.order, h.order
    size = kg * kh
    table = [[0] * size for _ in range(size)]
    for a1 in range(kg):
        for b1 in range(kh):
            for a2 in range(kg):
                for b2 in range(kh):
                    x = a1 * kh + b1
                    y = a2 * kh + b2
                    table[x][y] = g.mul(a1, a2) * kh + h.mul(b1, b2)
    return from_table(table, name=f"{g.name or 'G'}x{h.name or 'H'}")
