from __future__ import annotations

import math
from collections.abc import Sequence

from src.groups.base import Coords, Group
from src.groups.elements import GroupElement
from src.services.management.exceptions import ConfigurationError


class IntLattice(Group):
    """Z^d with generators +-e_i"""

    tag = "intlattice"

    def __init__(self, rank: int, ball_cap: int | None = None):
        if rank < 1:
            raise ConfigurationError(f"Lattice rank must be >= 1, got {rank}")
        self.rank = rank
        super().__init__(ball_cap)

    @property
    def signature(self) -> str:
        return f"intlattice({self.rank})"

    def _identity_coords(self) -> Coords:
        return (0,) * self.rank

    def _generator_coords(self) -> list[Coords]:
        gens = []
        for i in range(self.rank):
            unit = [0] * self.rank
            unit[i] = 1
            gens.append(tuple(unit))
            unit[i] = -1
            gens.append(tuple(unit))
        return gens

    def _normalize(self, coords: Sequence[int]) -> Coords:
        if len(coords) != self.rank:
            raise ConfigurationError(f"{self.signature} expects {self.rank} coordinates")
        return tuple(int(c) for c in coords)

    def _multiply_coords(self, a: Coords, b: Coords) -> Coords:
        return tuple(x + y for x, y in zip(a, b))

    def _inverse_coords(self, a: Coords) -> Coords:
        return tuple(-x for x in a)

    def _closed_form_length(self, g: GroupElement) -> int | None:
        return sum(abs(c) for c in g.coords)


class FiniteAbelian(Group):
    """Z/m_1 x ... x Z/m_k with generators +-e_i (deduplicated when m_i = 2)"""

    tag = "finiteabelian"

    def __init__(self, moduli: Sequence[int], ball_cap: int | None = None):
        moduli = tuple(int(m) for m in moduli)
        if not moduli or any(m < 1 for m in moduli):
            raise ConfigurationError(f"Moduli must be positive integers, got {moduli}")
        self.moduli = moduli
        super().__init__(ball_cap)

    @property
    def signature(self) -> str:
        return "finiteabelian(" + ",".join(str(m) for m in self.moduli) + ")"

    @property
    def is_finite(self) -> bool:
        return True

    @property
    def order(self) -> int | None:
        return math.prod(self.moduli)

    def _identity_coords(self) -> Coords:
        return (0,) * len(self.moduli)

    def _generator_coords(self) -> list[Coords]:
        gens = []
        for i, m in enumerate(self.moduli):
            if m == 1:
                continue
            unit = [0] * len(self.moduli)
            unit[i] = 1
            gens.append(tuple(unit))
            unit[i] = m - 1
            gens.append(tuple(unit))
        return gens

    def _normalize(self, coords: Sequence[int]) -> Coords:
        if len(coords) != len(self.moduli):
            raise ConfigurationError(f"{self.signature} expects {len(self.moduli)} residues")
        return tuple(int(c) % m for c, m in zip(coords, self.moduli))

    def _multiply_coords(self, a: Coords, b: Coords) -> Coords:
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def _inverse_coords(self, a: Coords) -> Coords:
        return tuple((-x) % m for x, m in zip(a, self.moduli))

    def _closed_form_length(self, g: GroupElement) -> int | None:
        return sum(min(c, m - c) for c, m in zip(g.coords, self.moduli))


class FreeGroup(Group):
    """
    Free group on k generators. Words are tuples of signed generator indices
    (1..k, negative for inverses), always freely reduced.
    """

    tag = "free"

    def __init__(self, rank: int, ball_cap: int | None = None):
        if rank < 1:
            raise ConfigurationError(f"Free group rank must be >= 1, got {rank}")
        self.rank = rank
        super().__init__(ball_cap)

    @property
    def signature(self) -> str:
        return f"free({self.rank})"

    def _identity_coords(self) -> Coords:
        return ()

    def _generator_coords(self) -> list[Coords]:
        gens = []
        for i in range(1, self.rank + 1):
            gens.append((i,))
            gens.append((-i,))
        return gens

    def _normalize(self, coords: Sequence[int]) -> Coords:
        word: list[int] = []
        for letter in coords:
            letter = int(letter)
            if letter == 0 or abs(letter) > self.rank:
                raise ConfigurationError(f"Invalid letter {letter} for {self.signature}")
            if word and word[-1] == -letter:
                word.pop()
            else:
                word.append(letter)
        return tuple(word)

    def _multiply_coords(self, a: Coords, b: Coords) -> Coords:
        word = list(a)
        for letter in b:
            if word and word[-1] == -letter:
                word.pop()
            else:
                word.append(letter)
        return tuple(word)

    def _inverse_coords(self, a: Coords) -> Coords:
        return tuple(-letter for letter in reversed(a))

    def _closed_form_length(self, g: GroupElement) -> int | None:
        return len(g.coords)

    def word(self, text: str) -> GroupElement:
        """Parse 'abAB' style words; uppercase letters are inverses, '1' is the identity"""
        letters = []
        for ch in text.replace(" ", ""):
            if ch == "1":
                continue
            index = ord(ch.lower()) - ord("a") + 1
            if not 1 <= index <= self.rank:
                raise ConfigurationError(f"Invalid generator '{ch}' for {self.signature}")
            letters.append(-index if ch.isupper() else index)
        return self.element(*letters)

    def format(self, g: GroupElement) -> str:
        if not g.coords:
            return "1"
        return "".join(
            chr(ord("a") + abs(letter) - 1).upper() if letter < 0 else chr(ord("a") + letter - 1)
            for letter in g.coords
        )


class Heisenberg(Group):
    """
    Integer Heisenberg group in the normal form (x, y, z) with
    (x, y, z)(x', y', z') = (x + x', y + y', z + z' + x*y'),
    generated by a = (1, 0, 0) and b = (0, 1, 0).
    """

    tag = "heisenberg"

    def __init__(self, ball_cap: int | None = None):
        super().__init__(ball_cap)

    @property
    def signature(self) -> str:
        return "heisenberg"

    def _identity_coords(self) -> Coords:
        return (0, 0, 0)

    def _generator_coords(self) -> list[Coords]:
        return [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]

    def _normalize(self, coords: Sequence[int]) -> Coords:
        if len(coords) != 3:
            raise ConfigurationError("heisenberg expects a triple (x, y, z)")
        return tuple(int(c) for c in coords)

    def _multiply_coords(self, a: Coords, b: Coords) -> Coords:
        x, y, z = a
        u, v, w = b
        return (x + u, y + v, z + w + x * v)

    def _inverse_coords(self, a: Coords) -> Coords:
        x, y, z = a
        return (-x, -y, -z + x * y)
