from src.coarse.maps import (
    CoarseMap,
    CoarseMapFamily,
    CoarseReport,
    controls_from_csv,
    csv_maps,
    csv_source_levels,
    doubling_maps,
    identity_maps,
    maps_from_csv,
    verify_coarse,
)
from src.coarse.pullback import PullbackCertificate, pullback_fibred

__all__ = [
    "CoarseMap",
    "CoarseMapFamily",
    "CoarseReport",
    "PullbackCertificate",
    "controls_from_csv",
    "csv_maps",
    "csv_source_levels",
    "doubling_maps",
    "identity_maps",
    "maps_from_csv",
    "pullback_fibred",
    "verify_coarse",
]
