from __future__ import annotations

from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping
from fractions import Fraction
from typing import Any

Key = Hashable
Scalar = int | Fraction


class HilbertVec:
    """
    Finitely supported vector of a real Hilbert space with exact rational
    entries. Zero entries are never stored, so equality is structural and the
    empty vector is the origin.
    """

    __slots__ = ("_entries", "_hash")

    def __init__(self, entries: Mapping[Key, Scalar] | Iterable[tuple[Key, Scalar]] = ()):
        if isinstance(entries, Mapping):
            entries = entries.items()
        data: dict[Key, Fraction] = {}
        for key, value in entries:
            if value == 0:
                continue
            total = data.get(key, Fraction(0)) + Fraction(value)
            if total == 0:
                data.pop(key, None)
            else:
                data[key] = total
        self._entries = data
        self._hash: int | None = None

    @classmethod
    def zero(cls) -> HilbertVec:
        return cls()

    @classmethod
    def basis(cls, key: Key, coefficient: Scalar = 1) -> HilbertVec:
        return cls(((key, coefficient),))

    def __getitem__(self, key: Key) -> Fraction:
        return self._entries.get(key, Fraction(0))

    def __iter__(self) -> Iterator[Key]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def items(self) -> Iterable[tuple[Key, Fraction]]:
        return self._entries.items()

    def support(self) -> frozenset[Key]:
        return frozenset(self._entries)

    def sorted_items(self) -> list[tuple[Key, Fraction]]:
        return sorted(self._entries.items(), key=lambda item: _sort_token(item[0]))

    def __add__(self, other: HilbertVec) -> HilbertVec:
        merged = dict(self._entries)
        for key, value in other.items():
            total = merged.get(key, Fraction(0)) + value
            if total == 0:
                merged.pop(key, None)
            else:
                merged[key] = total
        return HilbertVec._from_clean(merged)

    def __neg__(self) -> HilbertVec:
        return HilbertVec._from_clean({k: -v for k, v in self._entries.items()})

    def __sub__(self, other: HilbertVec) -> HilbertVec:
        return self + (-other)

    def __mul__(self, scalar: Scalar) -> HilbertVec:
        if scalar == 0:
            return HilbertVec()
        return HilbertVec._from_clean({k: v * scalar for k, v in self._entries.items()})

    __rmul__ = __mul__

    def inner(self, other: HilbertVec) -> Fraction:
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        return sum((value * large[key] for key, value in small.items()), Fraction(0))

    def norm_sq(self) -> Fraction:
        return sum((value * value for value in self._entries.values()), Fraction(0))

    def map_keys(self, key_map: Callable[[Key], tuple[Key, int]]) -> HilbertVec:
        """Apply a signed permutation of basis keys"""
        mapped: dict[Key, Fraction] = {}
        for key, value in self._entries.items():
            new_key, sign = key_map(key)
            mapped[new_key] = value * sign
        return HilbertVec._from_clean(mapped)

    @classmethod
    def _from_clean(cls, data: dict[Key, Fraction]) -> HilbertVec:
        vec = cls.__new__(cls)
        vec._entries = data
        vec._hash = None
        return vec

    def __eq__(self, other: object) -> bool:
        return isinstance(other, HilbertVec) and self._entries == other._entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._entries.items()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{key!r}: {value}" for key, value in self.sorted_items())
        return f"HilbertVec({{{body}}})"


def distance_sq(u: HilbertVec, v: HilbertVec) -> Fraction:
    return (u - v).norm_sq()


def _sort_token(key: Any) -> tuple[str, Any]:
    # keys inside one space share a type; the type name keeps mixed supports sortable
    return type(key).__name__, key
