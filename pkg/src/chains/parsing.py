from src.chains.chain import Chain, lcs_chain, pow2_chain
from src.groups.base import Group
from src.groups.parsing import split_spec
from src.services.management.exceptions import ConfigParseError


def _levels(spec: str, args: list[str]) -> int:
    if len(args) != 1:
        raise ConfigParseError(f"Chain spec '{spec}' needs exactly one 'levels=N' argument")
    key, _, value = args[0].partition("=")
    if not value:
        key, value = "levels", key
    if key.strip() != "levels":
        raise ConfigParseError(f"Unknown chain parameter '{key}' in '{spec}'")
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigParseError(f"Non-integer level count in '{spec}'") from exc


def parse_chain(spec: str, group: Group) -> Chain:
    """`pow2(levels=6)` or `lcs(levels=2)` over an already parsed group"""
    name, args = split_spec(spec)
    if name == "pow2":
        return pow2_chain(group, _levels(spec, args))
    if name == "lcs":
        return lcs_chain(group, _levels(spec, args))
    raise ConfigParseError(f"Unknown chain constructor '{name}'")
