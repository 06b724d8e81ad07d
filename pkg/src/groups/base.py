from __future__ import annotations

import logging
import threading
from abc import ABC, abstractmethod
from collections.abc import Iterable, Sequence

from src.groups.elements import GroupElement
from src.services.management.exceptions import GroupMismatchError, ResourceCapError
from src.utils.settings import get_settings

logger = logging.getLogger(__name__)

Coords = tuple[int, ...]


class Group(ABC):
    """
    Finitely generated group with exact arithmetic and the word metric of a
    symmetric generating set.

    Balls are grown by breadth-first search on the Cayley graph (right
    multiplication by generators) and memoized sphere by sphere. Growth is
    guarded by a lock so that concurrent readers always see whole spheres.
    """

    tag: str = ""

    def __init__(self, ball_cap: int | None = None):
        self._ball_cap = ball_cap or get_settings().max_ball_size
        identity = GroupElement(self.signature, self._identity_coords())
        self._identity = identity
        self._generators = self._build_generators()
        self._spheres: list[tuple[GroupElement, ...]] = [(identity,)]
        self._lengths: dict[GroupElement, int] = {identity: 0}
        self._exhausted = not self._generators
        self._lock = threading.Lock()

    @property
    @abstractmethod
    def signature(self) -> str:
        ...

    @abstractmethod
    def _identity_coords(self) -> Coords:
        ...

    @abstractmethod
    def _generator_coords(self) -> list[Coords]:
        ...

    @abstractmethod
    def _normalize(self, coords: Sequence[int]) -> Coords:
        ...

    @abstractmethod
    def _multiply_coords(self, a: Coords, b: Coords) -> Coords:
        ...

    @abstractmethod
    def _inverse_coords(self, a: Coords) -> Coords:
        ...

    def _closed_form_length(self, g: GroupElement) -> int | None:
        return None

    def format(self, g: GroupElement) -> str:
        return "(" + ",".join(str(c) for c in g.coords) + ")"

    @property
    def is_finite(self) -> bool:
        return False

    @property
    def order(self) -> int | None:
        return None

    @property
    def identity(self) -> GroupElement:
        return self._identity

    @property
    def generators(self) -> tuple[GroupElement, ...]:
        return self._generators

    @property
    def ball_cap(self) -> int:
        return self._ball_cap

    def element(self, *coords: int) -> GroupElement:
        return GroupElement(self.signature, self._normalize(coords))

    def contains(self, g: GroupElement) -> bool:
        return g.group == self.signature

    def _check(self, *elements: GroupElement) -> None:
        for g in elements:
            if g.group != self.signature:
                raise GroupMismatchError(
                    f"Element {g!r} does not belong to group {self.signature}"
                )

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        self._check(g, h)
        return GroupElement(self.signature, self._multiply_coords(g.coords, h.coords))

    def inverse(self, g: GroupElement) -> GroupElement:
        self._check(g)
        return GroupElement(self.signature, self._inverse_coords(g.coords))

    def product(self, elements: Iterable[GroupElement]) -> GroupElement:
        result = self._identity
        for g in elements:
            result = self.multiply(result, g)
        return result

    def power(self, g: GroupElement, n: int) -> GroupElement:
        if n < 0:
            return self.power(self.inverse(g), -n)
        result = self._identity
        base = g
        while n:
            if n & 1:
                result = self.multiply(result, base)
            base = self.multiply(base, base)
            n >>= 1
        return result

    def conjugate(self, g: GroupElement, x: GroupElement) -> GroupElement:
        """x g x^-1"""
        return self.multiply(self.multiply(x, g), self.inverse(x))

    def word_length(self, g: GroupElement) -> int:
        self._check(g)
        closed = self._closed_form_length(g)
        if closed is not None:
            return closed
        return self.bfs_word_length(g)

    def bfs_word_length(self, g: GroupElement) -> int:
        self._check(g)
        known = self._lengths.get(g)
        if known is not None:
            return known
        radius = len(self._spheres)
        while True:
            self._grow_to(radius)
            known = self._lengths.get(g)
            if known is not None:
                return known
            if self._exhausted:
                raise GroupMismatchError(f"{g!r} is not reachable from the generators")
            radius += 1

    def distance(self, x: GroupElement, y: GroupElement) -> int:
        return self.word_length(self.multiply(self.inverse(x), y))

    def sort_key(self, g: GroupElement) -> tuple[int, Coords]:
        return self.word_length(g), g.coords

    def sphere(self, n: int) -> tuple[GroupElement, ...]:
        if n < 0:
            return ()
        self._grow_to(n)
        if n < len(self._spheres):
            return self._spheres[n]
        return ()

    def ball(self, radius: int) -> tuple[GroupElement, ...]:
        """All g with l(g) <= radius, ordered by length then normal form"""
        if radius < 0:
            return ()
        self._grow_to(radius)
        result: list[GroupElement] = []
        for sphere in self._spheres[: radius + 1]:
            result.extend(sphere)
        return tuple(result)

    def ball_around(self, center: GroupElement, radius: int) -> tuple[GroupElement, ...]:
        """Left translate of the identity ball; the word metric is left-invariant"""
        return tuple(self.multiply(center, g) for g in self.ball(radius))

    def elements(self) -> tuple[GroupElement, ...]:
        if not self.is_finite:
            raise ResourceCapError(f"{self.signature} is infinite and cannot be enumerated")
        radius = 0
        while not self._exhausted:
            radius += 1
            self._grow_to(radius)
        return self.ball(len(self._spheres) - 1)

    def diameter(self) -> int | None:
        if not self.is_finite:
            return None
        self.elements()
        return len(self._spheres) - 1

    def _build_generators(self) -> tuple[GroupElement, ...]:
        seen: list[GroupElement] = []
        for coords in self._generator_coords():
            g = GroupElement(self.signature, self._normalize(coords))
            if g != self._identity and g not in seen:
                seen.append(g)
        return tuple(seen)

    def _grow_to(self, radius: int) -> None:
        if radius < len(self._spheres) or self._exhausted:
            return
        with self._lock:
            while len(self._spheres) <= radius and not self._exhausted:
                frontier = self._spheres[-1]
                fresh: set[GroupElement] = set()
                for g in frontier:
                    for s in self._generators:
                        h = GroupElement(self.signature, self._multiply_coords(g.coords, s.coords))
                        if h not in self._lengths and h not in fresh:
                            fresh.add(h)
                if not fresh:
                    self._exhausted = True
                    break
                if len(self._lengths) + len(fresh) > self._ball_cap:
                    raise ResourceCapError(
                        f"Ball of radius {len(self._spheres)} in {self.signature} exceeds "
                        f"the cap of {self._ball_cap} elements"
                    )
                n = len(self._spheres)
                ordered = tuple(sorted(fresh, key=lambda e: e.coords))
                for h in ordered:
                    self._lengths[h] = n
                self._spheres.append(ordered)
                logger.debug("%s: sphere %d has %d elements", self.signature, n, len(ordered))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Group) and other.signature == self.signature

    def __hash__(self) -> int:
        return hash(self.signature)

    def __repr__(self) -> str:
        return f"Group({self.signature})"
