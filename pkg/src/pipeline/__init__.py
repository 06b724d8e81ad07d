from src.pipeline.backward import (
    KernelTable,
    PsiResult,
    PsiTable,
    build_phi,
    build_psi,
    limit_psi,
    verify_limit_psi,
)
from src.pipeline.fibres import FibreField, FibrePoint
from src.pipeline.forward import BasepointTrivialization, ForwardCertificate, forward
from src.pipeline.means import FoelnerMean, MeanProvider, UniformMean, parse_mean

__all__ = [
    "BasepointTrivialization",
    "FibreField",
    "FibrePoint",
    "FoelnerMean",
    "ForwardCertificate",
    "KernelTable",
    "MeanProvider",
    "PsiResult",
    "PsiTable",
    "UniformMean",
    "build_phi",
    "build_psi",
    "forward",
    "limit_psi",
    "parse_mean",
    "verify_limit_psi",
]
