from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from src.chains.chain import Chain
from src.groups.elements import GroupElement
from src.hilbert.cocycles import Cocycle
from src.hilbert.vectors import HilbertVec
from src.services.management.exceptions import ConfigurationError, PreconditionError


@dataclass(frozen=True)
class FibrePoint:
    """
    Orbit [(x, y)] of G_n acting by g(x, y) = (gx, alpha(g)y), stored with x the
    fixed representative of the coset.
    """
    level: int
    coset: GroupElement
    x: GroupElement
    y: HilbertVec


class FibreField:
    """Hilbert fibres H_[a] over the cosets of every chain level"""

    def __init__(self, chain: Chain, cocycle: Cocycle):
        if cocycle.group != chain.parent:
            raise ConfigurationError(
                f"Cocycle acts on {cocycle.group.signature}, chain lives on {chain.parent.signature}"
            )
        self.chain = chain
        self.cocycle = cocycle
        self.group = chain.parent

    def canonicalize(self, level: int, x: GroupElement, y: HilbertVec) -> FibrePoint:
        coset = self.chain.project(level, x)
        rep = self.chain.representative(level, coset)
        if rep == x:
            return FibrePoint(level, coset, rep, y)
        move = self.group.multiply(rep, self.group.inverse(x))
        return FibrePoint(level, coset, rep, self.cocycle.act(move, y))

    def section(self, level: int, coset: GroupElement) -> FibrePoint:
        """s([a]) = [(a, b(a))]"""
        rep = self.chain.representative(level, coset)
        return FibrePoint(level, coset, rep, self.cocycle.translation(rep))

    def act(self, g: GroupElement, p: FibrePoint) -> FibrePoint:
        if not self.chain.contains(p.level, g):
            raise PreconditionError(f"{self.group.format(g)} is not in G_{p.level}")
        return self.canonicalize(p.level, self.group.multiply(g, p.x), self.cocycle.act(g, p.y))

    def distance_sq(self, p: FibrePoint, q: FibrePoint) -> Fraction:
        """|y' - alpha(x' x^-1)(y)|^2 inside one fibre"""
        if p.level != q.level or p.coset != q.coset:
            raise PreconditionError("Fibre distance needs two points of the same fibre")
        move = self.group.multiply(q.x, self.group.inverse(p.x))
        return (q.y - self.cocycle.act(move, p.y)).norm_sq()
