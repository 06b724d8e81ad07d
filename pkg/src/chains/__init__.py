from src.chains.box import (
    BoxFamily,
    BoxPoint,
    BoxSpace,
    box_distance,
    component_separation,
    verify_box_metric,
)
from src.chains.chain import (
    Chain,
    QuotientSpace,
    SeparationFailure,
    check_local_isometry,
    coset_minimum_length,
    lcs_chain,
    pow2_chain,
    quotient_length,
    separation_certificate,
    separation_table,
)
from src.chains.parsing import parse_chain

__all__ = [
    "BoxFamily",
    "BoxPoint",
    "BoxSpace",
    "Chain",
    "QuotientSpace",
    "SeparationFailure",
    "box_distance",
    "check_local_isometry",
    "component_separation",
    "coset_minimum_length",
    "lcs_chain",
    "parse_chain",
    "pow2_chain",
    "quotient_length",
    "separation_certificate",
    "separation_table",
    "verify_box_metric",
]
