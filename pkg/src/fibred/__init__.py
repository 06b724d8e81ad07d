from src.fibred.certificate import (
    CertificateScope,
    CertificateView,
    FibredCCE,
    OverlapFailure,
    OverlapWitness,
    Trivialization,
)
from src.fibred.controls import ControlPair, MonotoneTable
from src.fibred.transfer import (
    BoxRegion,
    BoxSpaceCertificate,
    TransferFailure,
    boxspace_to_family,
    family_to_boxspace,
    verify_box_condition1,
    verify_box_condition2,
)
from src.fibred.verifier import verify_condition1, verify_condition2

__all__ = [
    "BoxRegion",
    "BoxSpaceCertificate",
    "CertificateScope",
    "CertificateView",
    "ControlPair",
    "FibredCCE",
    "MonotoneTable",
    "OverlapFailure",
    "OverlapWitness",
    "TransferFailure",
    "Trivialization",
    "boxspace_to_family",
    "family_to_boxspace",
    "verify_box_condition1",
    "verify_box_condition2",
    "verify_condition1",
    "verify_condition2",
]
