from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from src.hilbert.vectors import HilbertVec, Key
from src.services.management.exceptions import InputError


class LinearPart(ABC):
    """Linear isometry of the sparse Hilbert space"""

    @abstractmethod
    def apply(self, v: HilbertVec) -> HilbertVec:
        ...

    def compose(self, inner: LinearPart) -> LinearPart:
        """self o inner"""
        if isinstance(inner, IdentityLinear):
            return self
        if isinstance(self, IdentityLinear):
            return inner
        return ComposedLinear(self, inner)

    def __call__(self, v: HilbertVec) -> HilbertVec:
        return self.apply(v)


class IdentityLinear(LinearPart):
    def apply(self, v: HilbertVec) -> HilbertVec:
        return v

    def __repr__(self) -> str:
        return "IdentityLinear()"


class SignedPermutation(LinearPart):
    """Maps each basis key k to sign * e_{k'}; `key_map(k) = (k', sign)`"""

    def __init__(self, key_map: Callable[[Key], tuple[Key, int]], label: str = ""):
        self._key_map = key_map
        self.label = label

    def apply(self, v: HilbertVec) -> HilbertVec:
        return v.map_keys(self._key_map)

    def __repr__(self) -> str:
        return f"SignedPermutation({self.label})"


class OrthogonalMatrix(LinearPart):
    """
    Exact orthogonal matrix acting on the span of `keys`; vectors outside the
    span are left unchanged.
    """

    def __init__(self, keys: Sequence[Key], rows: Sequence[Sequence[int | Fraction]]):
        self.keys = tuple(keys)
        self.rows = tuple(tuple(Fraction(x) for x in row) for row in rows)
        size = len(self.keys)
        if len(self.rows) != size or any(len(row) != size for row in self.rows):
            raise InputError("Orthogonal matrix must be square over its keys")
        for i in range(size):
            for j in range(size):
                dot = sum((self.rows[i][k] * self.rows[j][k] for k in range(size)), Fraction(0))
                if dot != (1 if i == j else 0):
                    raise InputError("Matrix is not orthogonal")
        self._index = {key: i for i, key in enumerate(self.keys)}

    @classmethod
    def reflection(cls, keys: Sequence[Key], axis: Key) -> OrthogonalMatrix:
        """Reflection negating the `axis` coordinate"""
        rows = [[(-1 if k == axis else 1) if k == j else 0 for j in keys] for k in keys]
        return cls(keys, rows)

    def apply(self, v: HilbertVec) -> HilbertVec:
        inside = [v[key] for key in self.keys]
        outside = ((k, value) for k, value in v.items() if k not in self._index)
        mapped = (
            (self.keys[i], sum((self.rows[i][j] * inside[j] for j in range(len(self.keys))), Fraction(0)))
            for i in range(len(self.keys))
        )
        return HilbertVec(list(outside) + list(mapped))

    def transpose(self) -> OrthogonalMatrix:
        size = len(self.keys)
        return OrthogonalMatrix(self.keys, [[self.rows[j][i] for j in range(size)] for i in range(size)])


class ComposedLinear(LinearPart):
    def __init__(self, outer: LinearPart, inner: LinearPart):
        self.outer = outer
        self.inner = inner

    def apply(self, v: HilbertVec) -> HilbertVec:
        return self.outer.apply(self.inner.apply(v))

    def __repr__(self) -> str:
        return f"{self.outer!r} o {self.inner!r}"


@dataclass(frozen=True)
class AffineIsometry:
    """x -> b + L(x)"""
    translation: HilbertVec
    linear: LinearPart

    def __call__(self, v: HilbertVec) -> HilbertVec:
        return self.translation + self.linear.apply(v)

    def compose(self, other: AffineIsometry) -> AffineIsometry:
        """(b, L) o (b', L') = (b + L(b'), L o L')"""
        return AffineIsometry(
            translation=self.translation + self.linear.apply(other.translation),
            linear=self.linear.compose(other.linear),
        )

    @classmethod
    def identity(cls) -> AffineIsometry:
        return cls(HilbertVec(), IdentityLinear())

    @classmethod
    def translation_by(cls, v: HilbertVec) -> AffineIsometry:
        return cls(v, IdentityLinear())

    def preserves_inner_products(self, samples: Iterable[HilbertVec]) -> bool:
        samples = list(samples)
        images = [self.linear.apply(p) for p in samples]
        for i, u in enumerate(samples):
            for j in range(i, len(samples)):
                if images[i].inner(images[j]) != u.inner(samples[j]):
                    return False
        return True

    def agrees_with(self, other: AffineIsometry, samples: Iterable[HilbertVec]) -> bool:
        return all(self(p) == other(p) for p in samples)
