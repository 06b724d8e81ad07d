import logging
from dataclasses import dataclass

from src.chains.chain import Chain
from src.chains.parsing import parse_chain
from src.groups.base import Group
from src.groups.parsing import parse_group
from src.hilbert.cocycles import Cocycle
from src.hilbert.parsing import parse_cocycle
from src.pipeline.means import MeanProvider, UniformMean, parse_mean
from src.services.management.exceptions import ConfigurationError
from src.services.management.schemas import RunConfig
from src.utils.settings import get_settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CatalogBundle:
    group: Group
    chain: Chain
    cocycle: Cocycle | None


class CatalogService:
    """Named constructors: resolves the group, chain, cocycle and mean a run config refers to"""

    def __init__(self):
        self._settings = get_settings()

    def build(self, config: RunConfig, with_cocycle: bool = True) -> CatalogBundle:
        if not config.group or not config.chain:
            raise ConfigurationError("Run config needs both a group and a chain")
        group = parse_group(config.group, ball_cap=config.ball_cap or self._settings.max_ball_size)
        chain = parse_chain(config.chain, group)
        cocycle = parse_cocycle(config.cocycle, group) if with_cocycle else None
        logger.info(
            "Catalog: %s / %s / %s",
            group.signature,
            chain.signature,
            cocycle.signature if cocycle else "-",
        )
        return CatalogBundle(group=group, chain=chain, cocycle=cocycle)

    def mean(self, config: RunConfig, chain: Chain, level: int | None = None) -> MeanProvider:
        """Config mean, else uniform on finite quotients and Foelner boxes otherwise"""
        if config.mean:
            return parse_mean(config.mean)
        levels = [level] if level is not None else range(1, chain.depth + 1)
        if all(chain.quotient(n).is_finite for n in levels):
            return UniformMean()
        return parse_mean(f"foelner:{self._settings.foelner_default_size}")
