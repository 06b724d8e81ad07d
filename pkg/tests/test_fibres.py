import pytest

from src.hilbert.cocycles import lattice_cocycle
from src.hilbert.vectors import HilbertVec
from src.pipeline.fibres import FibreField
from src.services.management.exceptions import ConfigurationError, PreconditionError


@pytest.fixture
def field(z, z_chain):
    return FibreField(z_chain, lattice_cocycle(1, z))


def test_canonical_form_uses_the_coset_representative(z, field):
    p = field.canonicalize(2, z.element(5), HilbertVec({0: 3}))
    assert p.x == z.element(1)
    assert p.y == HilbertVec({0: -1})
    assert field.canonicalize(2, p.x, p.y) == p


def test_orbit_moves_fix_the_orbit(z, field):
    p = field.canonicalize(2, z.element(1), HilbertVec({0: -1}))
    assert field.act(z.element(4), p) == p
    assert field.act(z.element(-8), p) == p
    with pytest.raises(PreconditionError):
        field.act(z.element(1), p)


def test_section_and_fibre_distance(z, z_chain, field):
    coset = z_chain.project(2, z.element(1))
    s = field.section(2, coset)
    assert s.y == HilbertVec({0: 1})
    q = field.canonicalize(2, z.element(1), HilbertVec({0: 2}))
    p = field.canonicalize(2, z.element(5), HilbertVec({0: 3}))
    assert field.distance_sq(p, q) == 9
    assert field.distance_sq(field.act(z.element(4), p), q) == 9
    other = field.section(2, z_chain.project(2, z.element(2)))
    with pytest.raises(PreconditionError):
        field.distance_sq(p, other)


def test_cocycle_must_act_on_the_chain_parent(z2, z_chain):
    with pytest.raises(ConfigurationError):
        FibreField(z_chain, lattice_cocycle(2, z2))
