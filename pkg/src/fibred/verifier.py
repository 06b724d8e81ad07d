from __future__ import annotations

import logging
from collections.abc import Sequence
from fractions import Fraction

import numpy as np

from src.chains.box import BoxPoint
from src.fibred.certificate import (
    Condition1Report,
    FibredCCE,
    OverlapFailure,
    OverlapWitness,
    PairRecord,
    Trivialization,
    subset_level,
)
from src.hilbert.cnd import local_subsets
from src.hilbert.isometries import AffineIsometry, OrthogonalMatrix
from src.hilbert.vectors import HilbertVec, Key
from src.services.management.exceptions import InputError, PreconditionError, ScopeError

logger = logging.getLogger(__name__)


def _basis_vectors(vectors: Sequence[HilbertVec]) -> list[HilbertVec]:
    keys = set()
    for v in vectors:
        keys.update(v.support())
    return [HilbertVec.basis(key) for key in sorted(keys, key=repr)]


def _check_subset(emb: FibredCCE, level: int, r: int, subset: Sequence[BoxPoint]) -> tuple[BoxPoint, ...]:
    emb.check_scope(level, r)
    if subset_level(subset) != level:
        raise PreconditionError(f"Subset does not lie in component {level}")
    ordered = tuple(sorted(set(subset)))
    diameter = emb.diameter(ordered)
    if diameter >= r:
        raise PreconditionError(f"Subset has diameter {diameter}, not below r={r}")
    return ordered


def _fibre_isometry_failures(
    emb: FibredCCE, triv: Trivialization, x: BoxPoint, image: HilbertVec
) -> list[str]:
    failures = []
    targets = [HilbertVec()] + _basis_vectors([image])
    fibre_points = [emb.section(x)]
    for v in targets:
        p = triv.inverse(x, v)
        if triv.apply(x, p) != v:
            failures.append(f"t_C({x}) is not inverted by its inverse on {v!r}")
        fibre_points.append(p)
    images = [triv.apply(x, p) for p in fibre_points]
    for i in range(len(fibre_points)):
        for j in range(i + 1, len(fibre_points)):
            if emb.fibre_distance_sq(x, fibre_points[i], fibre_points[j]) != (images[i] - images[j]).norm_sq():
                failures.append(f"t_C({x}) does not preserve the fibre metric on sample pair ({i}, {j})")
    return failures


def verify_condition1(emb: FibredCCE, level: int, r: int, subset: Sequence[BoxPoint]) -> Condition1Report:
    """
    rho_1(d(x, y))^2 <= |t_C(x)s(x) - t_C(y)s(y)|^2 <= rho_2(d(x, y))^2 for all
    pairs of C, together with spot checks that each t_C(x) is an isometry of Y_x
    onto H.
    """
    ordered = _check_subset(emb, level, r, subset)
    triv = emb.trivialize(ordered, r)
    images = {x: triv.apply(x, emb.section(x)) for x in ordered}
    report = Condition1Report(level=level, radius=r, subset=ordered)
    for i, x in enumerate(ordered):
        for y in ordered[i + 1:]:
            d = emb.family.distance(x, y)
            if d > emb.controls.max_argument:
                raise ScopeError(f"Distance {d} exceeds the control tables (0..{emb.controls.max_argument})")
            report.pairs.append(
                PairRecord(
                    x=x,
                    y=y,
                    distance=d,
                    dist_sq=(images[x] - images[y]).norm_sq(),
                    lower_sq=emb.controls.lower_sq(d),
                    upper_sq=emb.controls.upper_sq(d),
                )
            )
    for x in ordered:
        report.isometry_failures.extend(_fibre_isometry_failures(emb, triv, x, images[x]))
    if not report.ok:
        logger.debug("Condition 1 fails on level %d, r=%d, C=%s", level, r, ordered)
    return report


def verify_condition2(
    emb: FibredCCE,
    level: int,
    r: int,
    subset1: Sequence[BoxPoint],
    subset2: Sequence[BoxPoint],
) -> OverlapWitness | OverlapFailure:
    """t_C1(x) o t_C2(x)^-1 is one and the same affine isometry for every x in C1 and C2"""
    c1 = _check_subset(emb, level, r, subset1)
    c2 = _check_subset(emb, level, r, subset2)
    common = sorted(set(c1) & set(c2))
    if not common:
        raise PreconditionError("Subsets do not overlap")
    t1, t2 = emb.trivialize(c1, r), emb.trivialize(c2, r)

    anchors = []
    for x in common:
        section = emb.section(x)
        anchors.append(t1.apply(x, section))
        anchors.append(t2.apply(x, section))
    samples = list(dict.fromkeys([HilbertVec()] + sorted(set(anchors), key=repr) + _basis_vectors(anchors)))

    def transition(x: BoxPoint) -> list[HilbertVec]:
        return [t1.apply(x, t2.inverse(x, v)) for v in samples]

    reference = common[0]
    expected = transition(reference)
    for x in common[1:]:
        for sample, want, got in zip(samples, expected, transition(x)):
            if want != got:
                return OverlapFailure(
                    reason="transition maps differ between overlap points",
                    offending=x,
                    reference=reference,
                    sample=sample,
                    residual=(want - got).norm_sq(),
                )
    affine = _matrix_transition(samples, expected)
    if isinstance(affine, OverlapFailure):
        return affine
    if affine is None:
        for i in range(len(samples)):
            for j in range(i + 1, len(samples)):
                if (expected[i] - expected[j]).norm_sq() != (samples[i] - samples[j]).norm_sq():
                    return OverlapFailure(
                        reason="transition map is not an isometry on the samples",
                        reference=reference,
                        sample=samples[j],
                    )
    else:
        for sample, want in zip(samples, expected):
            got = affine(sample)
            if got != want:
                return OverlapFailure(
                    reason="transition map is not affine on the samples",
                    reference=reference,
                    sample=sample,
                    residual=(want - got).norm_sq(),
                )
    return OverlapWitness(
        subset1=c1,
        subset2=c2,
        samples=tuple(samples),
        images=tuple(expected),
        residual=Fraction(0),
        transition=affine,
    )


def _matrix_transition(
    samples: Sequence[HilbertVec], images: Sequence[HilbertVec]
) -> AffineIsometry | OverlapFailure | None:
    """
    (b, A) with b the image of 0 and A an exact orthogonal matrix on the sample
    keys, when the linear part maps their span into itself; None otherwise.
    """
    keys = sorted({key for p in samples for key in p.support()}, key=repr)
    columns: dict[Key, HilbertVec] = {}
    for p, image in zip(samples, images):
        support = p.support()
        if len(support) == 1:
            (key,) = support
            if p == HilbertVec.basis(key):
                columns[key] = image - images[0]
    if not keys or set(columns) != set(keys):
        return None
    if any(not column.support() <= set(keys) for column in columns.values()):
        return None
    rows = [[columns[j][i] for j in keys] for i in keys]
    try:
        matrix = OrthogonalMatrix(keys, rows)
    except InputError as exc:
        return OverlapFailure(reason=f"transition linear part: {exc}")
    affine = AffineIsometry(images[0], matrix)
    if not affine.preserves_inner_products(samples):
        return OverlapFailure(reason="transition linear part does not preserve inner products")
    return affine


def in_scope_subsets(
    emb: FibredCCE,
    level: int,
    r: int,
    exhaustive_limit: int,
    sample_count: int = 20,
    sample_radius: int = 3,
    cliques_per_centre: int = 4,
    rng: np.random.Generator | None = None,
) -> list[tuple[BoxPoint, ...]]:
    """
    Maximal subsets of diameter < r of a component. Small bounded components
    are enumerated exhaustively; otherwise the maximal subsets through seeded
    random centres are taken from the ball of radius r - 1 around each centre.
    """
    emb.check_scope(level, r)
    space = emb.family.component(level)
    quotient = space.quotient
    if space.is_bounded and (space.size or 0) <= exhaustive_limit:
        cliques = local_subsets(quotient, list(space.points()), r)
        return [tuple(BoxPoint(level, q) for q in clique) for clique in cliques]
    rng = rng or np.random.default_rng(0)
    centres = space.ball(sample_radius)
    picks = sorted({int(i) for i in rng.integers(0, len(centres), size=sample_count)})
    subsets: dict[tuple[BoxPoint, ...], None] = {}
    for i in picks:
        centre = centres[i]
        pool = quotient.ball_around(centre, r - 1)
        for clique in local_subsets(quotient, pool, r, containing=centre, limit=cliques_per_centre):
            subsets.setdefault(tuple(sorted(BoxPoint(level, q) for q in clique)), None)
    return list(subsets)


def overlapping_pairs(subsets: Sequence[tuple[BoxPoint, ...]]) -> list[tuple[int, int]]:
    members = [set(s) for s in subsets]
    return [
        (i, j)
        for i in range(len(subsets))
        for j in range(i, len(subsets))
        if members[i] & members[j]
    ]
