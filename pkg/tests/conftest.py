import json

import pytest

from coarsesep.graphs import cycle_graph, graph, graph_to_json
from coarsesep.groups import cyclic
from coarsesep.words import GraphProduct


def z2_cycle(n):
    return cycle_graph([cyclic(2)] * n)


def z3_cycle(n):
    return cycle_graph([cyclic(3)] * n)


@pytest.fixture(scope="session")
def pentagon_z2():
    return z2_cycle(5)


@pytest.fixture(scope="session")
def pentagon_z3():
    return z3_cycle(5)


@pytest.fixture(scope="session")
def pentagon_one_z3():
    return cycle_graph([cyclic(3)] + [cyclic(2)] * 4)


@pytest.fixture(scope="session")
def square_z2():
    return z2_cycle(4)


@pytest.fixture(scope="session")
def dihedral_graph():
    # two non-adjacent involutions: the infinite dihedral group
    return graph([cyclic(2), cyclic(2)], [])


@pytest.fixture(scope="session")
def free3_graph():
    return graph([cyclic(2)] * 3, [])


@pytest.fixture(scope="session")
def k2_z2_z3():
    return graph([cyclic(2), cyclic(3)], [(0, 1)])


@pytest.fixture(scope="session")
def gp_pentagon_z2(pentagon_z2):
    return GraphProduct(pentagon_z2)


@pytest.fixture(scope="session")
def gp_pentagon_z3(pentagon_z3):
    return GraphProduct(pentagon_z3)


@pytest.fixture(scope="session")
def gp_dihedral(dihedral_graph):
    return GraphProduct(dihedral_graph)


@pytest.fixture(scope="session")
def gp_free3(free3_graph):
    return GraphProduct(free3_graph)


@pytest.fixture(scope="session")
def gp_k2(k2_z2_z3):
    return GraphProduct(k2_z2_z3)


def write_graph_file(tmp_path, g, name):
    path = tmp_path / name
    path.write_text(json.dumps(graph_to_json(g)))
    return path
