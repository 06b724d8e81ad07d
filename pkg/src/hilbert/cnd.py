from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from typing import Any

import networkx as nx
import numpy as np

from src.groups.base import Group
from src.groups.elements import GroupElement
from src.services.management.exceptions import InputError, ScopeError
from src.utils.settings import get_settings

logger = logging.getLogger(__name__)

Kernel = Callable[[Any, Any], Fraction] | Mapping[tuple[Any, Any], Fraction]

_COEFFICIENT_RANGE = 10
_WITNESS_SCALE = 10 ** 9


@dataclass(frozen=True)
class CndVerdict:
    verdict: bool
    extremal_eigenvalue: float
    samples: int
    agreement: bool
    tie_broken: bool = False
    positive_witness: tuple[int, ...] | None = None
    witness_value: Fraction | None = None


def _kernel_matrix(points: Sequence[Any], kernel: Kernel) -> list[list[Fraction]]:
    lookup = kernel.__getitem__ if isinstance(kernel, Mapping) else None
    matrix = []
    for p in points:
        row = []
        for q in points:
            try:
                value = lookup((p, q)) if lookup else kernel(p, q)
            except KeyError as exc:
                raise ScopeError(f"Kernel has no entry for ({p!r}, {q!r})") from exc
            row.append(Fraction(value))
        matrix.append(row)
    return matrix


def _quadratic_form(matrix: list[list[Fraction]], coefficients: Sequence[int]) -> Fraction:
    return sum(
        (coefficients[i] * coefficients[j] * matrix[i][j] for i in range(len(matrix)) for j in range(len(matrix))),
        Fraction(0),
    )


def _sampled_forms(
    matrix: list[list[Fraction]], rng: np.random.Generator, samples: int
) -> tuple[np.ndarray, np.ndarray]:
    """Exact values of sum a_i a_j k_ij over random integer mean-zero vectors, scaled by the common denominator"""
    m = len(matrix)
    denominator = math.lcm(*(value.denominator for row in matrix for value in row))
    scaled = [[int(value * denominator) for value in row] for row in matrix]
    coefficients = rng.integers(-_COEFFICIENT_RANGE, _COEFFICIENT_RANGE + 1, size=(samples, m))
    coefficients[:, -1] = -coefficients[:, :-1].sum(axis=1)
    peak = max((abs(v) for row in scaled for v in row), default=0)
    bound = peak * (m * _COEFFICIENT_RANGE) ** 2 * m * m
    dtype = np.int64 if bound < 2 ** 62 else object
    kernel = np.array(scaled, dtype=dtype)
    lambdas = coefficients.astype(dtype)
    forms = ((lambdas @ kernel) * lambdas).sum(axis=1)
    return coefficients, forms


def cnd_check(
    points: Sequence[Any],
    kernel: Kernel,
    tol: float | None = None,
    samples: int | None = None,
    rng: np.random.Generator | None = None,
) -> CndVerdict:
    """
    Conditional negative definiteness of a symmetric zero-diagonal kernel on
    finitely many points: P K P is negative semidefinite for the centring
    projection P. The eigenvalue verdict is cross-checked by exact quadratic
    forms on random integer mean-zero vectors and on a rounded top
    eigenvector; inside the tolerance band the exact forms decide.
    """
    settings = get_settings()
    tol = settings.eigen_tolerance if tol is None else tol
    samples = settings.cnd_samples if samples is None else samples
    rng = rng or np.random.default_rng(settings.seed)

    matrix = _kernel_matrix(points, kernel)
    m = len(matrix)
    for i in range(m):
        if matrix[i][i] != 0:
            raise InputError(f"Kernel diagonal is not zero at {points[i]!r}")
        for j in range(i + 1, m):
            if matrix[i][j] != matrix[j][i]:
                raise InputError(f"Kernel is not symmetric at ({points[i]!r}, {points[j]!r})")
    if m < 2:
        return CndVerdict(verdict=True, extremal_eigenvalue=0.0, samples=0, agreement=True)

    dense = np.array([[float(v) for v in row] for row in matrix])
    centring = np.eye(m) - np.full((m, m), 1.0 / m)
    eigenvalues, eigenvectors = np.linalg.eigh(centring @ dense @ centring)
    extremal = float(eigenvalues[-1])

    witness, witness_value = None, None
    if samples:
        coefficients, forms = _sampled_forms(matrix, rng, samples)
        positive = np.flatnonzero(forms > 0)
        if positive.size:
            index = int(positive[0])
            witness = tuple(int(c) for c in coefficients[index])
            witness_value = _quadratic_form(matrix, witness)
    if witness is None:
        top = eigenvectors[:, -1]
        rounded = [int(round(float(c) * _WITNESS_SCALE)) for c in top]
        rounded[-1] = -sum(rounded[:-1])
        value = _quadratic_form(matrix, rounded)
        if value > 0:
            witness, witness_value = tuple(rounded), value

    tie_broken = abs(extremal) <= tol
    if tie_broken:
        verdict = witness is None
        agreement = True
    else:
        verdict = extremal < 0
        agreement = (witness is None) == verdict
    logger.debug("CND check on %d points: eigenvalue %.3e, verdict %s", m, extremal, verdict)
    return CndVerdict(
        verdict=verdict,
        extremal_eigenvalue=extremal,
        samples=samples,
        agreement=agreement,
        tie_broken=tie_broken,
        positive_witness=witness,
        witness_value=witness_value,
    )


@dataclass
class CndFunctionVerdict:
    verdict: bool
    subsets_checked: int
    worst_eigenvalue: float
    failing_subsets: list[tuple[GroupElement, ...]] = field(default_factory=list)
    max_asymmetry: Fraction = Fraction(0)
    disagreements: int = 0


def local_subsets(
    group: Group,
    pool: Sequence[GroupElement],
    radius: int,
    containing: GroupElement | None = None,
    limit: int | None = None,
) -> list[tuple[GroupElement, ...]]:
    """
    Maximal subsets of `pool` with all pairwise distances < radius, deterministically
    ordered. With `containing` only the cliques through that element are listed,
    at most `limit` of them.
    """
    graph = nx.Graph()
    graph.add_nodes_from(pool)
    for i, g in enumerate(pool):
        for h in pool[i + 1:]:
            if group.distance(g, h) < radius:
                graph.add_edge(g, h)
    order = {g: i for i, g in enumerate(pool)}
    found = nx.find_cliques(graph, nodes=None if containing is None else [containing])
    cliques = [tuple(sorted(clique, key=order.__getitem__)) for clique in islice(found, limit)]
    return sorted(cliques, key=lambda clique: [order[g] for g in clique])


def cnd_function_check(
    group: Group,
    psi: Mapping[GroupElement, Fraction],
    local_radius: int | None = None,
    *,
    pool: Sequence[GroupElement] | None = None,
    exhaustive: bool = True,
    symmetrize: bool = False,
    subset_size: int | None = None,
    subset_count: int | None = None,
    samples_per_subset: int = 500,
    tol: float | None = None,
    rng: np.random.Generator | None = None,
) -> CndFunctionVerdict:
    """
    CND of k(g, h) = psi(g^-1 h). With `local_radius` only subsets of diameter
    < local_radius are tested (r-local CND); otherwise subsets are global.
    The pool defaults to ball(R // 2) where R is the largest length in the
    table, so every needed product has an entry.
    """
    settings = get_settings()
    rng = rng or np.random.default_rng(settings.seed)
    subset_size = subset_size or settings.cnd_subset_size
    subset_count = subset_count or settings.cnd_subset_count

    max_asymmetry = Fraction(0)
    for g, value in psi.items():
        inverse = group.inverse(g)
        if inverse not in psi:
            raise ScopeError(f"psi has no entry for the inverse of {group.format(g)}")
        max_asymmetry = max(max_asymmetry, abs(value - psi[inverse]))
    if max_asymmetry and not symmetrize:
        raise InputError(f"psi is not symmetric under inversion (defect {max_asymmetry})")

    def kernel(g: GroupElement, h: GroupElement) -> Fraction:
        u = group.multiply(group.inverse(g), h)
        if u not in psi:
            raise ScopeError(f"psi has no entry for {group.format(u)}")
        if symmetrize:
            return (psi[u] + psi[group.inverse(u)]) / 2
        return psi[u]

    if pool is None:
        table_radius = max((group.word_length(g) for g in psi), default=0)
        pool = group.ball(table_radius // 2)
    pool = list(pool)

    if local_radius is not None:
        subsets = local_subsets(group, pool, local_radius)
        if not exhaustive:
            picks = rng.permutation(len(subsets))[:subset_count]
            subsets = [subsets[int(i)] for i in sorted(picks)]
    elif exhaustive:
        subsets = [tuple(pool)]
    else:
        size = min(subset_size, len(pool))
        subsets = [
            tuple(pool[int(i)] for i in sorted(rng.choice(len(pool), size=size, replace=False)))
            for _ in range(subset_count)
        ]

    result = CndFunctionVerdict(
        verdict=True, subsets_checked=0, worst_eigenvalue=-math.inf, max_asymmetry=max_asymmetry
    )
    for subset in subsets:
        outcome = cnd_check(subset, kernel, tol=tol, samples=samples_per_subset, rng=rng)
        result.subsets_checked += 1
        result.worst_eigenvalue = max(result.worst_eigenvalue, outcome.extremal_eigenvalue)
        if not outcome.agreement:
            result.disagreements += 1
        if not outcome.verdict:
            result.verdict = False
            result.failing_subsets.append(subset)
    if not result.subsets_checked:
        result.worst_eigenvalue = 0.0
    logger.info(
        "CND function check (%s): %d subsets, worst eigenvalue %.3e, verdict %s",
        "global" if local_radius is None else f"local r={local_radius}",
        result.subsets_checked,
        result.worst_eigenvalue,
        result.verdict,
    )
    return result
