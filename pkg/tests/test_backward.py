from fractions import Fraction

import pytest

from src.groups.catalog import Heisenberg
from src.pipeline.backward import (
    KernelTable,
    PsiTable,
    build_phi,
    build_psi,
    defect_bound,
    limit_psi,
    verify_limit_psi,
)
from src.pipeline.means import FoelnerMean, UniformMean, parse_mean
from src.services.management.exceptions import ConfigParseError, ConfigurationError, InputError, PreconditionError, ScopeError


def squares(group, radius):
    return {g: Fraction(g.coords[0] ** 2) for g in group.ball(radius)}


def test_kernel_level_and_values(z_chain, z_cert):
    kernel = KernelTable(z_cert, 4)
    assert kernel.level == 4
    q = z_chain.quotient(4)
    assert kernel(q.element(0), q.element(3)) == 9
    assert kernel(q.element(15), q.element(2)) == 9
    assert kernel(q.element(0), q.element(4)) == 0
    assert kernel(q.element(5), q.element(5)) == 0
    assert not kernel.sandwich_violations


def test_phi_on_uniform_mean(z_chain, z_cert):
    kernel = KernelTable(z_cert, 4)
    q = z_chain.quotient(4)
    assert build_phi(kernel, UniformMean(), q.element(2)).value == 4
    assert build_phi(kernel, UniformMean(), q.identity).value == 0
    with pytest.raises(ScopeError):
        build_phi(kernel, UniformMean(), q.element(5))


def test_psi_is_the_square_on_z(z, z_chain, z_cert):
    result = build_psi(z, z_chain, z_cert, 6, UniformMean())
    assert result.table.level == 5
    assert result.table.values == squares(z, 5)
    assert result.local_cnd.verdict
    assert not result.envelope_violations
    assert result.ok


def test_psi_vanishes_outside_the_open_ball(z, z_chain, z_cert):
    table = build_psi(z, z_chain, z_cert, 4, UniformMean()).table
    assert table.value(z.element(7)) == 0
    assert table.rows()[0] == ("(0)", 0, 0, 0)
    assert all(table.symmetry_defect(g) == 0 for g in table.values)


def test_psi_on_free_group_with_foelner_mean(f2, f2_chain, f2_cert):
    mean = FoelnerMean(2)
    result = build_psi(f2, f2_chain, f2_cert, 2, mean)
    table = result.table
    assert table.level == 2
    assert table.value(f2.identity) == 0
    for generator in f2.generators:
        assert table.value(generator) == 1
        assert table.symmetry_defect(generator) <= table.defect_bounds[generator]
    assert table.defect_bounds[f2.word("a")] == mean.defect(Heisenberg(), Heisenberg().element(-1, 0, 0))
    assert result.local_cnd.verdict
    assert table.mean == "foelner:2"


def test_limit_stabilizes(z, z_chain, z_cert):
    tables = [build_psi(z, z_chain, z_cert, r, UniformMean()).table for r in (4, 6, 8)]
    limit = limit_psi(tables)
    assert limit.radius == 6
    assert limit.values == squares(z, 5)
    assert set(limit.flags) == {z.element(c) for c in (-7, -6, 6, 7)}
    check = verify_limit_psi(limit, z_cert.controls)
    assert check.ok
    assert check.flagged == 4


def test_limit_flags_disagreements(z):
    first = PsiTable(z, 3, 1, squares(z, 2))
    changed = squares(z, 4)
    changed[z.element(1)] = Fraction(5)
    limit = limit_psi([first, PsiTable(z, 5, 2, changed)])
    assert z.element(1) in limit.flags
    assert "not stabilized" in limit.flags[z.element(1)]
    with pytest.raises(ScopeError):
        limit.value(z.element(1))


def test_limit_of_nothing(z):
    limit = limit_psi([], z)
    assert limit.group is z
    assert limit.values == {}
    assert limit.flags == {}
    with pytest.raises(InputError):
        limit_psi([])


def test_limit_needs_increasing_radii(z):
    table = PsiTable(z, 3, 1, squares(z, 2))
    with pytest.raises(InputError):
        limit_psi([table, table])


def test_foelner_defect_decreases(heisenberg):
    a = heisenberg.element(1, 0, 0)
    b = heisenberg.element(0, 1, 0)
    for g in (a, b):
        defects = [FoelnerMean(n).defect(heisenberg, g) for n in (1, 2, 4)]
        assert defects == sorted(defects, reverse=True)
        assert defects[-1] < defects[0]


@pytest.mark.parametrize(
    "size, bound_a, bound_b",
    [
        (2, Fraction(2, 5), Fraction(138, 225)),
        (4, Fraction(2, 9), Fraction(914, 2673)),
        (6, Fraction(2, 13), Fraction(2906, 12337)),
        (8, Fraction(2, 17), Fraction(6690, 37281)),
    ],
)
def test_foelner_defect_bound_values(heisenberg, size, bound_a, bound_b):
    mean = FoelnerMean(size)
    a, b = heisenberg.element(1, 0, 0), heisenberg.element(0, 1, 0)
    assert defect_bound(mean, heisenberg, a, Fraction(1)) == bound_a
    assert defect_bound(mean, heisenberg, b, Fraction(1)) == bound_b
    assert defect_bound(mean, heisenberg, b, Fraction(4)) == 4 * bound_b


def test_foelner_defect_bound_shrinks(heisenberg):
    for g in (heisenberg.element(1, 0, 0), heisenberg.element(0, 1, 0), heisenberg.element(1, 1, 0)):
        bounds = [defect_bound(FoelnerMean(n), heisenberg, g, Fraction(2)) for n in (2, 4, 6, 8)]
        assert all(later < earlier for earlier, later in zip(bounds, bounds[1:]))


def test_phi_carries_the_defect_bound(f2_chain, f2_cert):
    kernel = KernelTable(f2_cert, 2)
    q = f2_chain.quotient(2)
    b = q.element(0, 1, 0)
    phi = build_phi(kernel, FoelnerMean(2), b)
    assert phi.value == 1
    assert phi.defect_bound == Fraction(138, 225)
    assert build_phi(kernel, UniformMean(), f2_chain.quotient(2).identity).defect_bound == 0


def test_foelner_defect_in_the_lattice(z2):
    assert FoelnerMean(2).defect(z2, z2.element(1, 0)) == Fraction(2, 5)


def test_uniform_mean(z8):
    assert UniformMean().average(z8, lambda t: Fraction(t.coords[0])) == Fraction(7, 2)
    assert UniformMean().defect(z8, z8.element(1)) == 0


def test_uniform_mean_needs_finite_quotient(z):
    with pytest.raises(PreconditionError):
        UniformMean().support(z)


@pytest.mark.parametrize("spec, label", [("uniform", "uniform"), ("Foelner:3", "foelner:3")])
def test_parse_mean(spec, label):
    assert parse_mean(spec).label == label


@pytest.mark.parametrize("spec", ["foelner:x", "median"])
def test_parse_mean_rejects(spec):
    with pytest.raises(ConfigParseError):
        parse_mean(spec)


def test_foelner_size_must_be_positive():
    with pytest.raises(ConfigurationError):
        FoelnerMean(0)
