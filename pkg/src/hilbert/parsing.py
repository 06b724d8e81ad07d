from src.groups.base import Group
from src.groups.catalog import FiniteAbelian, FreeGroup, IntLattice
from src.groups.parsing import split_spec
from src.hilbert.cocycles import Cocycle, free_wall_cocycle, lattice_cocycle, regular_cocycle
from src.services.management.exceptions import ConfigParseError, ConfigurationError


def default_cocycle(group: Group) -> str:
    """Catalog cocycle for a group when the run config names none"""
    if isinstance(group, IntLattice):
        return "lattice"
    if isinstance(group, FreeGroup):
        return "free-wall"
    if isinstance(group, FiniteAbelian):
        return "regular"
    raise ConfigurationError(f"No default cocycle is known for {group.signature}")


def parse_cocycle(spec: str | None, group: Group) -> Cocycle:
    """`lattice`, `free-wall` or `regular` acting on an already parsed group"""
    name, args = split_spec((spec or default_cocycle(group)).replace("-", "_"))
    if args:
        raise ConfigParseError(f"Cocycle '{spec}' takes no parameters")
    if name == "lattice":
        if not isinstance(group, IntLattice):
            raise ConfigurationError(f"Lattice cocycle cannot act on {group.signature}")
        return lattice_cocycle(group.rank, group)
    if name == "free_wall":
        if not isinstance(group, FreeGroup):
            raise ConfigurationError(f"Free wall cocycle cannot act on {group.signature}")
        return free_wall_cocycle(group.rank, group)
    if name == "regular":
        return regular_cocycle(group)
    raise ConfigParseError(f"Unknown cocycle constructor '{spec}'")
