from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class GroupElement:
    """
    Exact element in normal form.

    `group` is the signature of the owning group (e.g. "free(2)"); `coords`
    holds the variant-specific normal form: an integer vector for lattices,
    a freely reduced word of signed generator indices for free groups, the
    triple (x, y, z) for the Heisenberg group and a residue vector for finite
    abelian groups.
    """
    group: str
    coords: tuple[int, ...]

    def __repr__(self) -> str:
        return f"{self.group}{list(self.coords)}"
