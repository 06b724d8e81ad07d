from fractions import Fraction

import pytest

from src.chains.box import BoxPoint
from src.fibred.certificate import CertificateView, OverlapFailure, OverlapWitness, Trivialization
from src.fibred.verifier import in_scope_subsets, overlapping_pairs, verify_condition1, verify_condition2
from src.hilbert.cocycles import lattice_cocycle
from src.hilbert.isometries import OrthogonalMatrix
from src.hilbert.vectors import HilbertVec
from src.pipeline.forward import ForwardCertificate
from src.services.management.exceptions import PreconditionError, ScopeError


def arc(chain, level: int, *residues: int) -> tuple[BoxPoint, ...]:
    quotient = chain.quotient(level)
    return tuple(BoxPoint(level, quotient.element(c)) for c in residues)


class ReflectedTrivialization(Trivialization):
    """Composes t_C(x) with a reflection at one point of C"""

    def __init__(self, base: Trivialization, point: BoxPoint):
        self.base = base
        self.subset = base.subset
        self.point = point
        self.reflection = OrthogonalMatrix.reflection((0,), axis=0)

    def apply(self, x, p):
        image = self.base.apply(x, p)
        return self.reflection.apply(image) if x == self.point else image

    def inverse(self, x, v):
        return self.base.inverse(x, self.reflection.apply(v) if x == self.point else v)


class ReflectingView(CertificateView):
    def __init__(self, base, subset, point):
        super().__init__(base, label="reflected")
        self.target = tuple(sorted(subset))
        self.point = point

    def trivialize(self, subset, r):
        triv = self.base.trivialize(subset, r)
        if tuple(sorted(set(subset))) == self.target:
            return ReflectedTrivialization(triv, self.point)
        return triv


class ScaledTrivialization(Trivialization):
    def __init__(self, base: Trivialization, factor):
        self.base = base
        self.subset = base.subset
        self.factor = Fraction(factor)

    def apply(self, x, p):
        return self.base.apply(x, p) * self.factor

    def inverse(self, x, v):
        return self.base.inverse(x, v * (1 / self.factor))


class RewrappedView(CertificateView):
    """Replaces t_C on one subset by `wrap(t_C)`"""

    def __init__(self, base, subset, wrap):
        super().__init__(base, label="rewrapped")
        self.target = tuple(sorted(subset))
        self.wrap = wrap

    def trivialize(self, subset, r):
        triv = self.base.trivialize(subset, r)
        return self.wrap(triv) if tuple(sorted(set(subset))) == self.target else triv


def test_required_levels(z_cert):
    assert [z_cert.required_level(r) for r in (2, 4, 8)] == [3, 4, 5]
    assert z_cert.exclusion(4) == frozenset({1, 2, 3})
    with pytest.raises(ScopeError):
        z_cert.required_level(9)


def test_lcs_required_levels(f2_cert):
    assert f2_cert.required_level(1) == 1
    assert f2_cert.required_level(2) == 2
    assert f2_cert.exclusion(2) == frozenset({1})


def test_radius_beyond_chain_depth(z, z_chain):
    with pytest.raises(ScopeError):
        ForwardCertificate(z_chain, lattice_cocycle(1, z), 22)


def test_basepoint_is_smallest_representative(z, z_chain, z_cert):
    assert z_cert.basepoint(arc(z_chain, 4, 6, 7, 8, 9)) == z.element(6)
    assert z_cert.basepoint(arc(z_chain, 4, 8, 9, 10, 11)) == z.element(-5)


def test_section_images_are_lift_translations(z, z_chain, z_cert):
    subset = arc(z_chain, 4, 6, 7, 8, 9)
    _, lifts = z_cert.lifts(subset, 4)
    triv = z_cert.trivialize(subset, 4)
    for x in subset:
        assert triv.apply(x, z_cert.section(x)) == HilbertVec(enumerate(lifts[x].coords))
    assert [lifts[x] for x in subset] == [z.element(c) for c in (6, 7, 8, 9)]


def test_condition1_distances(z_chain, z_cert):
    subset = arc(z_chain, 4, 0, 1, 2, 3)
    report = verify_condition1(z_cert, 4, 4, subset)
    assert report.ok
    assert len(report.pairs) == 6
    far = next(p for p in report.pairs if p.distance == 3)
    assert far.dist_sq == 9
    assert report.distance_matrix()[0][3] == 9


def test_condition1_wraps_around_the_quotient(z_chain, z_cert):
    report = verify_condition1(z_cert, 4, 4, arc(z_chain, 4, 14, 15, 0, 1))
    assert report.ok
    assert max(p.dist_sq for p in report.pairs) == 9


def test_condition1_on_free_group(f2, f2_chain, f2_cert):
    heisenberg = f2_chain.quotient(2)
    subset = (BoxPoint(2, heisenberg.identity), BoxPoint(2, heisenberg.element(1, 0, 0)))
    report = verify_condition1(f2_cert, 2, 2, subset)
    assert report.ok
    assert report.pairs[0].dist_sq == 1


def test_corrupted_upper_control_fails(z_chain, z_cert):
    corrupted = CertificateView(z_cert, controls=z_cert.controls.with_upper(z_cert.controls.upper_sq.lowered(1)))
    report = verify_condition1(corrupted, 4, 4, arc(z_chain, 4, 0, 1, 2, 3))
    assert not report.ok
    assert report.violations


def test_excluded_level_is_out_of_scope(z_chain, z_cert):
    with pytest.raises(ScopeError):
        verify_condition1(z_cert, 2, 4, arc(z_chain, 2, 0, 1))


def test_large_subsets_are_rejected(z_chain, z_cert):
    with pytest.raises(PreconditionError):
        verify_condition1(z_cert, 4, 4, arc(z_chain, 4, 0, 1, 2, 3, 4))


def test_overlap_transition_is_a_translation(z_chain, z_cert):
    c1, c2 = arc(z_chain, 4, 6, 7, 8, 9), arc(z_chain, 4, 8, 9, 10, 11)
    outcome = verify_condition2(z_cert, 4, 4, c1, c2)
    assert isinstance(outcome, OverlapWitness)
    assert outcome.translation == HilbertVec({0: 16})
    assert not outcome.is_identity


def test_overlap_with_itself_is_identity(z_chain, z_cert):
    c1 = arc(z_chain, 4, 0, 1, 2)
    outcome = verify_condition2(z_cert, 4, 4, c1, c1)
    assert isinstance(outcome, OverlapWitness)
    assert outcome.is_identity


def test_overlap_transition_is_recorded_as_a_matrix(z_chain, z_cert):
    c1, c2 = arc(z_chain, 4, 6, 7, 8, 9), arc(z_chain, 4, 8, 9, 10, 11)
    outcome = verify_condition2(z_cert, 4, 4, c1, c2)
    assert isinstance(outcome.transition.linear, OrthogonalMatrix)
    assert outcome.transition.linear.rows == ((1,),)
    assert outcome.transition(HilbertVec({0: 1})) == HilbertVec({0: 17})


def test_reflection_on_a_whole_subset_is_an_allowed_transition(z_chain, z_cert):
    c1, c2 = arc(z_chain, 4, 6, 7, 8, 9), arc(z_chain, 4, 8, 9, 10, 11)
    reflection = OrthogonalMatrix.reflection((0,), axis=0)

    class Reflected(Trivialization):
        def __init__(self, base):
            self.base = base
            self.subset = base.subset

        def apply(self, x, p):
            return reflection.apply(self.base.apply(x, p))

        def inverse(self, x, v):
            return self.base.inverse(x, reflection.apply(v))

    outcome = verify_condition2(RewrappedView(z_cert, c2, Reflected), 4, 4, c1, c2)
    assert isinstance(outcome, OverlapWitness)
    assert outcome.transition.linear.rows == ((-1,),)
    assert outcome.translation == HilbertVec({0: 16})


def test_scaled_trivialization_has_no_orthogonal_transition(z_chain, z_cert):
    c1, c2 = arc(z_chain, 4, 6, 7, 8, 9), arc(z_chain, 4, 8, 9, 10, 11)
    outcome = verify_condition2(RewrappedView(z_cert, c2, lambda t: ScaledTrivialization(t, 2)), 4, 4, c1, c2)
    assert isinstance(outcome, OverlapFailure)
    assert outcome.reason.startswith("transition linear part")


def test_reflected_trivialization_is_caught(z_chain, z_cert):
    c1, c2 = arc(z_chain, 4, 6, 7, 8, 9), arc(z_chain, 4, 8, 9, 10, 11)
    offending = BoxPoint(4, z_chain.quotient(4).element(9))
    broken = ReflectingView(z_cert, c2, offending)
    outcome = verify_condition2(broken, 4, 4, c1, c2)
    assert isinstance(outcome, OverlapFailure)
    assert outcome.offending == offending
    assert outcome.reference == BoxPoint(4, z_chain.quotient(4).element(8))
    assert outcome.residual > 0


def test_disjoint_subsets_are_rejected(z_chain, z_cert):
    with pytest.raises(PreconditionError):
        verify_condition2(z_cert, 4, 4, arc(z_chain, 4, 0, 1), arc(z_chain, 4, 5, 6))


def test_exhaustive_subsets_of_a_small_quotient(z_cert):
    subsets = in_scope_subsets(z_cert, 4, 4, exhaustive_limit=64)
    assert len(subsets) == 16
    assert all(len(subset) == 4 for subset in subsets)
    pairs = overlapping_pairs(subsets)
    assert all(set(subsets[i]) & set(subsets[j]) for i, j in pairs)
    assert len(pairs) == 16 * 4


def test_sampled_subsets_of_an_unbounded_component(f2_cert):
    subsets = in_scope_subsets(f2_cert, 2, 2, exhaustive_limit=64)
    assert subsets
    assert all(len(subset) == 2 for subset in subsets)
    for subset in subsets:
        report = verify_condition1(f2_cert, 2, 2, subset)
        assert len(report.pairs) == 1
        assert report.ok
    pairs = overlapping_pairs(subsets)
    assert any(i != j for i, j in pairs)
    for i, j in pairs:
        assert isinstance(verify_condition2(f2_cert, 2, 2, subsets[i], subsets[j]), OverlapWitness)


def test_fibre_distance_is_preserved(z_chain, z_cert):
    x = BoxPoint(4, z_chain.quotient(4).element(3))
    triv = z_cert.trivialize(arc(z_chain, 4, 3), 4)
    p = triv.inverse(x, HilbertVec({0: Fraction(1, 2)}))
    q = triv.inverse(x, HilbertVec({0: 5}))
    assert z_cert.fibre_distance_sq(x, p, q) == Fraction(81, 4)
