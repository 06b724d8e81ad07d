import pytest

from src.chains.chain import (
    SeparationFailure,
    check_local_isometry,
    coset_minimum_length,
    coset_minimum_table,
    lcs_chain,
    pow2_chain,
    quotient_length,
    separation_certificate,
    separation_table,
    spot_check_chain,
)
from src.chains.parsing import parse_chain
from src.groups.catalog import FiniteAbelian
from src.services.management.exceptions import ChainError, ConfigParseError, ConfigurationError


def test_pow2_projection_and_representatives(z, z_chain):
    q3 = z_chain.quotient(3)
    assert z_chain.project(3, z.element(11)) == q3.element(3)
    # the midpoint residue is lifted to the negative side
    assert z_chain.representative(4, z_chain.quotient(4).element(8)) == z.element(-8)
    assert z_chain.representative(4, z_chain.quotient(4).element(7)) == z.element(7)


def test_levels_are_numbered_from_one(z_chain):
    assert [space.level for space in z_chain.levels] == [1, 2, 3, 4, 5, 6]
    with pytest.raises(ChainError):
        z_chain.space(0)
    with pytest.raises(ChainError):
        z_chain.space(7)


@pytest.mark.parametrize("radius, level", [(0, 1), (1, 1), (2, 2), (6, 3), (12, 4), (24, 5), (63, 6)])
def test_pow2_separation(z_chain, radius, level):
    assert separation_certificate(z_chain, radius) == level


def test_pow2_separation_fails_beyond_depth(z, z_chain):
    outcome = separation_certificate(z_chain, 64)
    assert isinstance(outcome, SeparationFailure)
    assert outcome.witness is not None
    assert z_chain.contains(6, outcome.witness)


@pytest.mark.parametrize("radius, level", [(3, 1), (6, 2), (7, 2)])
def test_lcs_separation(f2_chain, radius, level):
    assert separation_certificate(f2_chain, radius) == level


def test_lcs_separation_fails_at_double_commutators(f2_chain):
    assert isinstance(separation_certificate(f2_chain, 8), SeparationFailure)


def test_separation_table_rows(z_chain):
    rows = separation_table(z_chain, 4)
    assert rows == [(0, 1), (1, 1), (2, 2), (3, 2), (4, 3)]


def test_lcs_quotients(f2, f2_chain):
    commutator = f2.word("abAB")
    assert f2_chain.project(1, commutator) == f2_chain.quotient(1).identity
    assert f2_chain.project(2, commutator) == f2_chain.quotient(2).element(0, 0, 1)
    assert quotient_length(f2_chain, 1, commutator) == 0
    assert quotient_length(f2_chain, 2, commutator) == 4


def test_lcs_representatives_project_back(f2_chain, heisenberg):
    for q in heisenberg.ball(3):
        assert f2_chain.project(2, f2_chain.representative(2, q)) == q


def test_quotient_length_matches_coset_minimum(f2, f2_chain):
    for g in f2.ball(3):
        for n in (1, 2):
            assert quotient_length(f2_chain, n, g) == coset_minimum_length(f2_chain, n, g)


def test_pow2_quotient_length_on_ball_8(z, z_chain):
    for n in range(1, z_chain.depth + 1):
        for g in z.ball(8):
            assert quotient_length(z_chain, n, g) == coset_minimum_length(z_chain, n, g)


@pytest.mark.parametrize("fixture, levels", [("z_chain", (1, 2, 3, 4, 5, 6)), ("f2_chain", (1, 2))])
def test_quotient_length_matches_coset_table(request, fixture, levels):
    chain = request.getfixturevalue(fixture)
    ball = chain.parent.ball(8)
    for n in levels:
        table = coset_minimum_table(chain, n, 8)
        assert set(table) == {chain.project(n, g) for g in ball}
        for g in ball:
            assert quotient_length(chain, n, g) == table[chain.project(n, g)]


def test_coset_table_on_the_dyadic_quotient(z_chain):
    table = coset_minimum_table(z_chain, 4, 8)
    q4 = z_chain.quotient(4)
    assert len(table) == 16
    assert table[q4.element(8)] == 8
    assert table[q4.element(9)] == 7
    assert table[q4.element(15)] == 1


def test_local_isometry(z_chain):
    assert check_local_isometry(z_chain, 4, 8) == ()
    broken = check_local_isometry(z_chain, 3, 8)
    assert broken
    assert all(abs(u.coords[0]) >= 5 for u in broken)


@pytest.mark.parametrize("fixture", ["z_chain", "f2_chain"])
def test_spot_check_chain_passes(request, fixture):
    report = spot_check_chain(request.getfixturevalue(fixture), radius=3, conjugator_radius=2, pair_samples=100)
    assert report.ok


def test_pow2_on_finite_abelian():
    chain = pow2_chain(FiniteAbelian([12]), 3)
    assert [space.size for space in chain.levels] == [2, 4, 4]


def test_lcs_needs_free_group_of_rank_two(z):
    with pytest.raises(ConfigurationError):
        lcs_chain(z, 2)


def test_pow2_not_defined_for_heisenberg(heisenberg):
    with pytest.raises(ConfigurationError):
        pow2_chain(heisenberg, 2)


@pytest.mark.parametrize("spec, depth", [("pow2(levels=6)", 6), ("pow2(3)", 3), ("lcs(levels=2)", 2)])
def test_parse_chain(f2, z, spec, depth):
    group = f2 if spec.startswith("lcs") else z
    assert parse_chain(spec, group).depth == depth


@pytest.mark.parametrize("spec", ["pow2", "pow2(depth=3)", "pow2(levels=x)", "tower(levels=2)"])
def test_parse_chain_rejects(z, spec):
    with pytest.raises(ConfigParseError):
        parse_chain(spec, z)
