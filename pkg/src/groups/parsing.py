import re

from src.groups.base import Group
from src.groups.catalog import FiniteAbelian, FreeGroup, Heisenberg, IntLattice
from src.services.management.exceptions import ConfigParseError

_SPEC_PATTERN = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def split_spec(spec: str) -> tuple[str, list[str]]:
    """'name(a, b=c)' -> ('name', ['a', 'b=c'])"""
    match = _SPEC_PATTERN.match(spec.lower())
    if not match:
        raise ConfigParseError(f"Malformed constructor spec: '{spec}'")
    name, args = match.group(1), match.group(2)
    if not args:
        return name, []
    return name, [part.strip() for part in args.split(",") if part.strip()]


def _int_args(spec: str, args: list[str]) -> list[int]:
    try:
        return [int(a) for a in args]
    except ValueError as exc:
        raise ConfigParseError(f"Non-integer parameter in '{spec}'") from exc


def parse_group(spec: str, ball_cap: int | None = None) -> Group:
    """Build a catalog group from `intlattice(2)`, `free(2)`, `heisenberg`, `finiteabelian(8,8)`"""
    name, args = split_spec(spec)
    if name == "intlattice":
        values = _int_args(spec, args)
        if len(values) != 1:
            raise ConfigParseError("intlattice takes exactly one rank parameter")
        return IntLattice(values[0], ball_cap=ball_cap)
    if name == "free":
        values = _int_args(spec, args)
        if len(values) != 1:
            raise ConfigParseError("free takes exactly one rank parameter")
        return FreeGroup(values[0], ball_cap=ball_cap)
    if name == "heisenberg":
        if args:
            raise ConfigParseError("heisenberg takes no parameters")
        return Heisenberg(ball_cap=ball_cap)
    if name == "finiteabelian":
        values = _int_args(spec, args)
        if not values:
            raise ConfigParseError("finiteabelian needs at least one modulus")
        return FiniteAbelian(values, ball_cap=ball_cap)
    raise ConfigParseError(f"Unknown group constructor '{name}'")
