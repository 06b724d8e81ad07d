import pytest

from src.chains.chain import lcs_chain, pow2_chain
from src.groups.catalog import FiniteAbelian, FreeGroup, Heisenberg, IntLattice
from src.hilbert.cocycles import free_wall_cocycle, lattice_cocycle
from src.pipeline.forward import forward
from src.utils.settings import get_settings


@pytest.fixture(autouse=True)
def fast_settings(monkeypatch):
    monkeypatch.setenv("BOXHAAG_CND_SAMPLES", "400")
    monkeypatch.setenv("BOXHAAG_METRIC_SAMPLES", "300")
    monkeypatch.setenv("BOXHAAG_METRIC_SAMPLE_RADIUS", "3")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def z():
    return IntLattice(1)


@pytest.fixture
def z2():
    return IntLattice(2)


@pytest.fixture
def f2():
    return FreeGroup(2)


@pytest.fixture
def heisenberg():
    return Heisenberg()


@pytest.fixture
def z8():
    return FiniteAbelian([8])


@pytest.fixture
def z_chain(z):
    return pow2_chain(z, 6)


@pytest.fixture
def f2_chain(f2):
    return lcs_chain(f2, 2)


@pytest.fixture
def z_cert(z, z_chain):
    return forward(z, z_chain, lattice_cocycle(1, z), 8)


@pytest.fixture
def f2_cert(f2, f2_chain):
    return forward(f2, f2_chain, free_wall_cocycle(2, f2), 2)
