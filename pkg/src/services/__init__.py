import importlib
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from src.services.box_service import BoxService
    from src.services.catalog import CatalogService
    from src.services.config_loader import ConfigService
    from src.services.embedding_service import EmbeddingService
    from src.services.kernel_service import KernelService
    from src.services.output_files import OutputService

# Service classes are resolved lazily: domain modules (e.g. src.groups.base)
# import src.services.management.*, which initialises this package; eager
# imports here would re-enter those domain modules mid-initialisation.
_LAZY = {
    "BoxService": "src.services.box_service",
    "CatalogService": "src.services.catalog",
    "ConfigService": "src.services.config_loader",
    "EmbeddingService": "src.services.embedding_service",
    "KernelService": "src.services.kernel_service",
    "OutputService": "src.services.output_files",
}


def __getattr__(name: str):
    if name in _LAZY:
        value = getattr(importlib.import_module(_LAZY[name]), name)
        globals()[name] = value
        return value
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def get_config_service() -> "ConfigService":
    return __getattr__("ConfigService")()


def get_catalog_service() -> "CatalogService":
    return __getattr__("CatalogService")()


def get_output_service(root: str) -> "OutputService":
    return __getattr__("OutputService")(root)


def get_box_service() -> "BoxService":
    return __getattr__("BoxService")(get_catalog_service())


def get_embedding_service() -> "EmbeddingService":
    return __getattr__("EmbeddingService")(get_catalog_service())


def get_kernel_service() -> "KernelService":
    return __getattr__("KernelService")(get_catalog_service())

__all__ = [
    "BoxService",
    "CatalogService",
    "ConfigService",
    "EmbeddingService",
    "KernelService",
    "OutputService",
    "get_box_service",
    "get_catalog_service",
    "get_config_service",
    "get_embedding_service",
    "get_kernel_service",
    "get_output_service",
]
