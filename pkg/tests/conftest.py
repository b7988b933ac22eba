import random

import pytest

from graphcore import Graph, parse_graph


def loops(n):
    """One vertex with n loop edges."""
    return parse_graph("vertex v\n" + "\n".join(["v -> v"] * n))


def two_cycle():
    return parse_graph("v -> w\nw -> v\n")


def chain_with_extra_source():
    # u -> v -> w plus x -> w, so w receives two edges
    return parse_graph("u -> v\nv -> w\nx -> w\n")


def single_edge():
    return parse_graph("v -> w\n")


def family_graph(n):
    """Two chains merging into a common head: one of length n, one of n - 1.

    The k-th iterated pair on this graph fails the interaction axioms
    exactly at k = n (both oracles; frozen in tests).
    """
    lines = ["w1 -> v0", "v1 -> v0"]
    for k in range(1, n - 1):
        lines.append("w%d -> w%d" % (k + 1, k))
    for k in range(1, n):
        lines.append("v%d -> v%d" % (k + 1, k))
    return parse_graph("\n".join(lines))


def random_graph(seed):
    rng = random.Random(seed)
    nv = rng.randint(3, 6)
    ne = rng.randint(4, 12)
    vertices = ["v%d" % i for i in range(nv)]
    edges = [(rng.randrange(nv), rng.randrange(nv)) for _ in range(ne)]
    return Graph(vertices, edges)


RANDOM_SEEDS = (0, 1, 4, 5, 11)


def fixture_graphs():
    """The standing fixture set used across the suite."""
    named = {
        "loops1": loops(1),
        "loops2": loops(2),
        "loops3": loops(3),
        "loops4": loops(4),
        "two_cycle": two_cycle(),
        "chain": chain_with_extra_source(),
        "single_edge": single_edge(),
        "family2": family_graph(2),
        "family3": family_graph(3),
    }
    for seed in RANDOM_SEEDS:
        named["random%d" % seed] = random_graph(seed)
    return named


@pytest.fixture(scope="session")
def graphs():
    return fixture_graphs()
