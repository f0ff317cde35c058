import pytest

from coarsesep.groups import (
    GroupTableError,
    VertexGroup,
    abstract,
    cyclic,
    direct_product,
    from_table,
)


def test_cyclic_basics():
    z3 = cyclic(3)
    assert z3.order == 3 and z3.is_concrete and z3.is_finite
    assert z3.mul(1, 2) == 0
    assert z3.inv(1) == 2
    assert not z3.is_z2
    assert cyclic(2).is_z2


def test_trivial_group_rejected():
    with pytest.raises(GroupTableError, match="trivial"):
        cyclic(1)
    with pytest.raises(GroupTableError, match="trivial"):
        abstract(order=1)


def test_identity_must_be_index_zero():
    with pytest.raises(GroupTableError, match="identity"):
        from_table([[1, 0], [0, 1]])


def test_non_associative_table_rejected():
    # order-5 loop: a latin square with identity and two-sided inverses
    # that is not associative, so only the associativity check can reject it
    bad = [[0,1,2,3,4],[1,0,3,4,2],[2,4,0,1,3],[3,2,4,0,1],[4,3,1,2,0]]
    with pytest.raises(GroupTableError, match="non-associative"):
        from_table(bad)


def test_missing_inverse_rejected():
    # row without any 0 entry cannot happen with a latin square, so corrupt one
    bad = [[0, 1], [1, 1]]
    with pytest.raises(GroupTableError):
        from_table(bad)


def test_klein_four_table_accepted():
    k4 = from_table(
        [
            [0, 1, 2, 3],
            [1, 0, 3, 2],
            [2, 3, 0, 1],
            [3, 2, 1, 0],
        ]
    )
    assert k4.order == 4
    assert all(k4.mul(a, a) == 0 for a in range(4))


def test_concrete_flags_are_fixed():
    z2 = cyclic(2)
    assert z2.hyperbolic is True
    assert z2.virtually_infinite_cyclic is False
    assert z2.virtual_surface is False


def test_abstract_finite_contradictory_flags():
    with pytest.raises(GroupTableError):
        abstract(order=6, virtual_surface=True)
    with pytest.raises(GroupTableError):
        abstract(order=6, hyperbolic=False)


def test_abstract_infinite_tristate():
    g = abstract(order=None, hyperbolic=True)
    assert not g.is_finite and not g.is_concrete
    assert g.hyperbolic is True
    assert g.virtually_infinite_cyclic is None
    with pytest.raises(GroupTableError):
        g.mul(0, 0)


def test_direct_product_is_a_group():
    p = direct_product(cyclic(2), cyclic(3))
    assert p.order == 6
    # commutativity of the factors carries over componentwise
    assert p.mul(1 * 3 + 1, 1 * 3 + 2) == (0 * 3 + 0)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 8])
def test_cyclic_tables_validate(k):
    g = cyclic(k)
    for a in range(k):
        assert g.mul(a, g.inv(a)) == 0
