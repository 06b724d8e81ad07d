from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field

import numpy as np

from src.groups.base import Coords, Group
from src.groups.catalog import FiniteAbelian, FreeGroup, Heisenberg, IntLattice
from src.groups.elements import GroupElement
from src.services.management.exceptions import ChainError, ConfigurationError

logger = logging.getLogger(__name__)

FINITE = "finite"
FOELNER_BOXES = "foelner-boxes"


@dataclass(frozen=True)
class QuotientSpace:
    """
    G/G_n with the word metric of the image generators. Quotient groups are
    catalog groups whose default generating set is the image of the parent's.
    """
    level: int
    quotient: Group
    witness: str
    _project: Callable[[Coords], Coords] = field(repr=False, compare=False)
    _represent: Callable[[Coords], Coords] = field(repr=False, compare=False)

    @property
    def tag(self) -> str:
        return self.quotient.signature

    @property
    def is_bounded(self) -> bool:
        return self.quotient.is_finite

    @property
    def size(self) -> int | None:
        return self.quotient.order

    def length(self, q: GroupElement) -> int:
        return self.quotient.word_length(q)

    def distance(self, p: GroupElement, q: GroupElement) -> int:
        return self.quotient.distance(p, q)

    def points(self) -> tuple[GroupElement, ...]:
        return self.quotient.elements()

    def ball(self, radius: int) -> tuple[GroupElement, ...]:
        return self.quotient.ball(radius)

    def diameter(self) -> int | None:
        return self.quotient.diameter()


class Chain:
    """
    Nested chain of normal subgroups G_1 > G_2 > ... > G_N of a parent group,
    given through the quotient maps pi_n: G -> G/G_n. Only levels 1..N are
    available; trivial intersection is certified per radius by
    `separation_certificate`.
    """

    def __init__(self, parent: Group, tag: str, levels: Iterable[QuotientSpace]):
        self.parent = parent
        self.tag = tag
        self.levels = tuple(levels)
        if not self.levels:
            raise ChainError("A chain needs at least one level")
        for expected, space in enumerate(self.levels, start=1):
            if space.level != expected:
                raise ChainError(f"Chain levels must be numbered 1..N, got {space.level} at {expected}")

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def signature(self) -> str:
        return f"{self.tag}(levels={self.depth})"

    def space(self, n: int) -> QuotientSpace:
        if not 1 <= n <= self.depth:
            raise ChainError(f"Level {n} outside the certified depth 1..{self.depth} of {self.signature}")
        return self.levels[n - 1]

    def quotient(self, n: int) -> Group:
        return self.space(n).quotient

    def project(self, n: int, g: GroupElement) -> GroupElement:
        self.parent._check(g)
        space = self.space(n)
        return GroupElement(space.quotient.signature, space._project(g.coords))

    def representative(self, n: int, q: GroupElement) -> GroupElement:
        """Deterministic preimage of a quotient element"""
        space = self.space(n)
        space.quotient._check(q)
        return self.parent.element(*space._represent(q.coords))

    def contains(self, n: int, g: GroupElement) -> bool:
        """Membership in G_n"""
        return self.project(n, g) == self.quotient(n).identity

    def __repr__(self) -> str:
        return f"Chain({self.parent.signature}, {self.signature})"


def _centred(c: int, m: int) -> int:
    """Residue in (-m/2, m/2]; the midpoint goes to the negative side"""
    r = c % m
    if 2 * r >= m and m > 1:
        r -= m
    return r


def pow2_chain(group: Group, levels: int) -> Chain:
    """
    G_n = (2^n Z)^d for IntLattice(d); for FiniteAbelian(m_1..m_k) the level n
    quotient is Z/gcd(2^n, m_i) in each factor.
    """
    if levels < 1:
        raise ConfigurationError("pow2 chain needs levels >= 1")
    spaces = []
    if isinstance(group, IntLattice):
        for n in range(1, levels + 1):
            modulus = 2 ** n
            quotient = FiniteAbelian([modulus] * group.rank, ball_cap=group.ball_cap)
            spaces.append(
                QuotientSpace(
                    level=n,
                    quotient=quotient,
                    witness=FINITE,
                    _project=lambda c, m=modulus: tuple(x % m for x in c),
                    _represent=lambda c, m=modulus: tuple(_centred(x, m) for x in c),
                )
            )
    elif isinstance(group, FiniteAbelian):
        for n in range(1, levels + 1):
            moduli = tuple(math.gcd(2 ** n, m) for m in group.moduli)
            quotient = FiniteAbelian(moduli, ball_cap=group.ball_cap)
            spaces.append(
                QuotientSpace(
                    level=n,
                    quotient=quotient,
                    witness=FINITE,
                    _project=lambda c, ms=moduli: tuple(x % m for x, m in zip(c, ms)),
                    _represent=lambda c, ms=moduli: tuple(_centred(x, m) for x, m in zip(c, ms)),
                )
            )
    else:
        raise ConfigurationError(f"pow2 chain is not defined for {group.signature}")
    logger.debug("Built pow2 chain on %s with %d levels", group.signature, levels)
    return Chain(group, "pow2", spaces)


def _abelianize(word: Coords) -> Coords:
    x = sum(1 if letter == 1 else -1 for letter in word if abs(letter) == 1)
    y = sum(1 if letter == 2 else -1 for letter in word if abs(letter) == 2)
    return (x, y)


_HEISENBERG_IMAGES = {1: (1, 0, 0), -1: (-1, 0, 0), 2: (0, 1, 0), -2: (0, -1, 0)}


def _heisenberg_image(word: Coords) -> Coords:
    x, y, z = 0, 0, 0
    for letter in word:
        u, v, w = _HEISENBERG_IMAGES[letter]
        x, y, z = x + u, y + v, z + w + x * v
    return (x, y, z)


def _power(letter: int, exponent: int) -> list[int]:
    return [letter if exponent > 0 else -letter] * abs(exponent)


def _lattice_word(coords: Coords) -> Coords:
    """a^x b^y"""
    x, y = coords
    return tuple(_power(1, x) + _power(2, y))


def _heisenberg_word(coords: Coords) -> Coords:
    """a^x b^y [a,b]^w with (x, y, xy + w) the target and [a,b] = a b a^-1 b^-1"""
    x, y, z = coords
    w = z - x * y
    commutator = [1, 2, -1, -2] if w > 0 else [2, 1, -2, -1]
    return tuple(_power(1, x) + _power(2, y) + commutator * abs(w))


def lcs_chain(group: Group, levels: int = 2) -> Chain:
    """
    Lower central series of F_2 truncated at depth 2: G_1 = [F, F] with
    quotient Z^2 and G_2 = [F, [F, F]] with quotient the Heisenberg group.
    """
    if not isinstance(group, FreeGroup) or group.rank != 2:
        raise ConfigurationError(f"lcs chain is only available for free(2), got {group.signature}")
    if not 1 <= levels <= 2:
        raise ConfigurationError("lcs chain is certified for levels 1..2 only")
    spaces = [
        QuotientSpace(
            level=1,
            quotient=IntLattice(2, ball_cap=group.ball_cap),
            witness=FOELNER_BOXES,
            _project=_abelianize,
            _represent=_lattice_word,
        )
    ]
    if levels == 2:
        spaces.append(
            QuotientSpace(
                level=2,
                quotient=Heisenberg(ball_cap=group.ball_cap),
                witness=FOELNER_BOXES,
                _project=_heisenberg_image,
                _represent=_heisenberg_word,
            )
        )
    return Chain(group, "lcs", spaces)


def quotient_length(chain: Chain, n: int, g: GroupElement) -> int:
    """l_n([g]) as the word length of pi_n(g) on the image generators"""
    return chain.quotient(n).word_length(chain.project(n, g))


def coset_minimum_length(chain: Chain, n: int, g: GroupElement) -> int:
    """min{l(x) : x in ball(l(g)), pi_n(x) = pi_n(g)}; every coset minimizer lies in that ball"""
    target = chain.project(n, g)
    radius = chain.parent.word_length(g)
    for x in chain.parent.ball(radius):
        if chain.project(n, x) == target:
            return chain.parent.word_length(x)
    raise ChainError(f"{g!r} is missing from its own coset search")


def coset_minimum_table(chain: Chain, n: int, radius: int) -> dict[GroupElement, int]:
    """
    min l over each coset of G_n met by ball(radius), in one pass; exact for
    every coset listed since its minimizer lies in the same ball.
    """
    table: dict[GroupElement, int] = {}
    for x in chain.parent.ball(radius):
        table.setdefault(chain.project(n, x), chain.parent.word_length(x))
    return table


@dataclass(frozen=True)
class SeparationFailure:
    radius: int
    depth: int
    witness: GroupElement | None
    reason: str


def separation_certificate(chain: Chain, radius: int) -> int | SeparationFailure:
    """Smallest level n with ball(radius) intersect G_n = {1}"""
    if radius < 0:
        raise ConfigurationError("Separation radius must be non-negative")
    ball = chain.parent.ball(radius)
    identity = chain.parent.identity
    witness = None
    for n in range(1, chain.depth + 1):
        witness = next((g for g in ball if g != identity and chain.contains(n, g)), None)
        if witness is None:
            logger.debug("%s separates radius %d at level %d", chain.signature, radius, n)
            return n
    return SeparationFailure(
        radius=radius,
        depth=chain.depth,
        witness=witness,
        reason=f"no level up to {chain.depth} separates ball({radius})",
    )


def separation_table(chain: Chain, max_radius: int) -> list[tuple[int, int | None]]:
    rows = []
    for radius in range(max_radius + 1):
        result = separation_certificate(chain, radius)
        rows.append((radius, result if isinstance(result, int) else None))
    return rows


def check_local_isometry(chain: Chain, n: int, r: int) -> tuple[GroupElement, ...]:
    """
    Elements u of ball(r - 1) with l_n(pi_n(u)) != l(u). By left invariance this
    is the same as pi_n failing to be isometric on some set of diameter < r.
    """
    return tuple(
        u
        for u in chain.parent.ball(r - 1)
        if quotient_length(chain, n, u) != chain.parent.word_length(u)
    )


@dataclass
class ChainSpotCheck:
    nesting: list[GroupElement] = field(default_factory=list)
    normality: list[tuple[GroupElement, GroupElement]] = field(default_factory=list)
    homomorphism: list[tuple[GroupElement, GroupElement]] = field(default_factory=list)
    lipschitz: list[GroupElement] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.nesting or self.normality or self.homomorphism or self.lipschitz)


def spot_check_chain(
    chain: Chain,
    radius: int = 4,
    conjugator_radius: int = 4,
    pair_samples: int = 500,
    rng: np.random.Generator | None = None,
) -> ChainSpotCheck:
    """Nesting, normality, homomorphism and 1-Lipschitz spot checks on ball(radius)"""
    rng = rng or np.random.default_rng(0)
    parent = chain.parent
    ball = parent.ball(radius)
    conjugators = parent.ball(conjugator_radius)
    report = ChainSpotCheck()
    for n in range(1, chain.depth + 1):
        for g in ball:
            if quotient_length(chain, n, g) > parent.word_length(g):
                report.lipschitz.append(g)
            if not chain.contains(n, g):
                continue
            if n > 1 and not chain.contains(n - 1, g):
                report.nesting.append(g)
            for x in conjugators:
                if not chain.contains(n, parent.conjugate(g, x)):
                    report.normality.append((g, x))
        if ball:
            q = chain.quotient(n)
            picks = rng.integers(0, len(ball), size=(pair_samples, 2))
            for i, j in picks:
                g, h = ball[int(i)], ball[int(j)]
                lhs = chain.project(n, parent.multiply(g, h))
                rhs = q.multiply(chain.project(n, g), chain.project(n, h))
                if lhs != rhs:
                    report.homomorphism.append((g, h))
    return report
