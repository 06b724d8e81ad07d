from src.groups.base import Group
from src.groups.catalog import FiniteAbelian, FreeGroup, Heisenberg, IntLattice
from src.groups.elements import GroupElement
from src.groups.parsing import parse_group


def multiply(g: GroupElement, h: GroupElement, group: Group) -> GroupElement:
    return group.multiply(g, h)


def word_length(group: Group, g: GroupElement) -> int:
    return group.word_length(g)


def ball(group: Group, radius: int) -> tuple[GroupElement, ...]:
    return group.ball(radius)


__all__ = [
    "FiniteAbelian",
    "FreeGroup",
    "Group",
    "GroupElement",
    "Heisenberg",
    "IntLattice",
    "ball",
    "multiply",
    "parse_group",
    "word_length",
]
