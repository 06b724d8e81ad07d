import itertools

import numpy as np
import pytest

from src.groups import parse_group
from src.groups.catalog import FiniteAbelian, IntLattice
from src.services.management.exceptions import ConfigParseError, GroupMismatchError, ResourceCapError


@pytest.mark.parametrize("radius, size", [(0, 1), (1, 3), (2, 5), (5, 11)])
def test_lattice_ball_sizes(z, radius, size):
    assert len(z.ball(radius)) == size


def test_ball_in_z2(z2):
    assert len(z2.ball(2)) == 13


def test_free_group_sphere_sizes(f2):
    assert [len(f2.sphere(n)) for n in range(4)] == [1, 4, 12, 36]


def test_free_group_reduces_words(f2):
    assert f2.word("abBA") == f2.identity
    assert f2.multiply(f2.word("ab"), f2.word("Ba")) == f2.word("aa")


def test_free_group_format_round_trip(f2):
    g = f2.word("abAB")
    assert f2.format(g) == "abAB"
    assert f2.word_length(g) == 4


def test_heisenberg_commutator(heisenberg):
    a, b = heisenberg.element(1, 0, 0), heisenberg.element(0, 1, 0)
    commutator = heisenberg.product([a, b, heisenberg.inverse(a), heisenberg.inverse(b)])
    assert commutator == heisenberg.element(0, 0, 1)
    assert heisenberg.word_length(commutator) == 4


def test_heisenberg_inverse(heisenberg):
    g = heisenberg.element(2, -3, 5)
    assert heisenberg.inverse(g) == heisenberg.element(-2, 3, -5 + 2 * -3)
    assert heisenberg.multiply(g, heisenberg.inverse(g)) == heisenberg.identity


def test_finite_abelian_lengths(z8):
    assert z8.word_length(z8.element(5)) == 3
    assert z8.diameter() == 4
    assert len(z8.elements()) == 8


def test_bfs_matches_closed_form(z2):
    for g in z2.ball(3):
        assert z2.bfs_word_length(g) == z2.word_length(g)


def test_ball_cap():
    with pytest.raises(ResourceCapError):
        IntLattice(2, ball_cap=10).ball(2)


def test_infinite_group_cannot_be_enumerated(z):
    with pytest.raises(ResourceCapError):
        z.elements()


def test_elements_of_other_group_are_rejected(z, z2):
    with pytest.raises(GroupMismatchError):
        z.multiply(z.identity, z2.identity)


@pytest.mark.parametrize(
    "spec, signature",
    [
        ("intlattice(2)", "intlattice(2)"),
        ("free(2)", "free(2)"),
        ("heisenberg", "heisenberg"),
        ("FiniteAbelian(4, 8)", "finiteabelian(4,8)"),
    ],
)
def test_parse_group(spec, signature):
    assert parse_group(spec).signature == signature


@pytest.mark.parametrize("spec", ["intlattice", "free(x)", "heisenberg(2)", "torus(2)", "free(2"])
def test_parse_group_rejects(spec):
    with pytest.raises(ConfigParseError):
        parse_group(spec)


def test_groups_compare_by_signature():
    assert IntLattice(1) == IntLattice(1)
    assert FiniteAbelian([8]) != FiniteAbelian([4])


def _symmetric_generators(group):
    return sorted({s for g in group.generators for s in (g, group.inverse(g))}, key=lambda g: g.coords)


@pytest.mark.parametrize("fixture, max_length", [("f2", 5), ("heisenberg", 6)])
def test_word_length_matches_word_enumeration(request, fixture, max_length):
    group = request.getfixturevalue(fixture)
    letters = _symmetric_generators(group)
    shortest = {group.identity: 0}
    for length in range(1, max_length + 1):
        for word in itertools.product(letters, repeat=length):
            shortest.setdefault(group.product(word), length)
    assert set(shortest) == set(group.ball(max_length))
    for g, length in shortest.items():
        assert group.word_length(g) == length


def test_heisenberg_associativity(heisenberg):
    ball = heisenberg.ball(2)
    for x in ball:
        for y in ball:
            xy = heisenberg.multiply(x, y)
            for z in ball:
                assert heisenberg.multiply(xy, z) == heisenberg.multiply(x, heisenberg.multiply(y, z))


@pytest.mark.parametrize("fixture", ["z2", "f2", "heisenberg"])
def test_word_metric_axioms_on_random_triples(request, fixture):
    group = request.getfixturevalue(fixture)
    ball = group.ball(6)
    rng = np.random.default_rng(11)
    for i, j, k in rng.integers(0, len(ball), size=(500, 3)):
        x, y, z = ball[int(i)], ball[int(j)], ball[int(k)]
        assert group.distance(x, y) == group.distance(y, x)
        assert (group.distance(x, y) == 0) == (x == y)
        assert group.distance(x, y) <= group.distance(x, z) + group.distance(z, y)
