import numpy as np
import pytest

from src.chains.box import (
    BoxFamily,
    BoxPoint,
    BoxSpace,
    box_distance,
    component_separation,
    describe_components,
    family_rows,
    sample_points,
    verify_box_metric,
)
from src.services.management.exceptions import ChainError, PreconditionError


def test_cross_component_distance(z_chain):
    space = BoxSpace(z_chain)
    x = BoxPoint(2, z_chain.quotient(2).element(1))
    y = BoxPoint(3, z_chain.quotient(3).element(3))
    assert space.distance(x, y) == 1 + 3 + 2 + 3
    assert box_distance(space, y, x) == space.distance(x, y)


def test_inside_component_distance_is_quotient_distance(z_chain):
    space = BoxSpace(z_chain)
    q = z_chain.quotient(4)
    assert space.distance(BoxPoint(4, q.element(1)), BoxPoint(4, q.element(15))) == 2


@pytest.mark.parametrize("n, m", [(1, 2), (2, 5), (6, 3)])
def test_component_separation(z_chain, n, m):
    assert component_separation(BoxSpace(z_chain), n, m) == n + m


def test_component_separation_needs_two_levels(z_chain):
    with pytest.raises(PreconditionError):
        component_separation(BoxSpace(z_chain), 2, 2)


def test_family_distance_stays_inside_components(z_chain):
    family = BoxFamily(z_chain)
    with pytest.raises(PreconditionError):
        family.distance(family.identity_point(1), family.identity_point(2))


def test_family_level_selection(z_chain):
    family = BoxFamily(z_chain, [5, 3, 3])
    assert family.levels == (3, 5)
    with pytest.raises(ChainError):
        family.component(4)
    with pytest.raises(ChainError):
        BoxFamily(z_chain, [7])


@pytest.mark.parametrize("fixture", ["z_chain", "f2_chain"])
def test_box_metric_axioms(request, fixture):
    space = BoxSpace(request.getfixturevalue(fixture))
    report = verify_box_metric(space, samples=500, radius=2)
    assert report.ok
    assert report.triples_checked == 500


def test_box_metric_exhaustive_points(z_chain):
    space = BoxSpace(z_chain, [1, 2, 3])
    points = sample_points(space, 4)
    report = verify_box_metric(space, samples=0, exhaustive_points=points)
    assert report.ok
    assert report.triples_checked == len(points) ** 3


def test_describe_components(f2_chain, z_chain):
    lcs = describe_components(BoxFamily(f2_chain))
    assert [(c.tag, c.bounded, c.size) for c in lcs] == [("intlattice(2)", False, None), ("heisenberg", False, None)]
    pow2 = describe_components(BoxFamily(z_chain, [1, 2]))
    assert [(c.size, c.bounded) for c in pow2] == [(2, True), (4, True)]


def test_family_rows(z_chain):
    rows = family_rows(BoxFamily(z_chain, [2]), radius=5)
    assert rows == [(2, "(0)", 0), (2, "(1)", 1), (2, "(3)", 1), (2, "(2)", 2)]
    assert BoxFamily(z_chain).all_bounded


class LevelBlindBoxSpace(BoxSpace):
    """Cross-component distance l_n(x) + l_m(y), without the n + m term"""

    def distance(self, p, q):
        if p.level == q.level:
            return super().distance(p, q)
        return self.length(p) + self.length(q)


def test_box_metric_rejects_level_blind_cross_distance(z_chain):
    space = LevelBlindBoxSpace(z_chain, (2, 3, 4))
    identities = [space.identity_point(n) for n in space.levels]
    report = verify_box_metric(space, samples=0, exhaustive_points=identities)
    assert not report.ok
    assert (identities[0], identities[1]) in report.indiscernibles

    sampled = verify_box_metric(space, samples=2000, rng=np.random.default_rng(5), radius=2)
    assert sampled.indiscernibles
    honest = verify_box_metric(BoxSpace(z_chain, (2, 3, 4)), samples=2000, rng=np.random.default_rng(5), radius=2)
    assert honest.ok
