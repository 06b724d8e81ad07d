from argparse import Namespace

from src.services import get_config_service, get_output_service
from src.services.management.schemas import RunConfig
from src.services.output_files import OutputService
from src.utils.settings import get_settings


def get_run_config(args: Namespace) -> RunConfig:
    """Config file values with command-line flags on top"""
    overrides = {
        "seed": args.seed,
        "tolerance": args.tol,
        "out": args.out,
        "mean": args.mean,
        "manifest": getattr(args, "manifest", None),
    }
    return get_config_service().load(args.config, overrides)


def get_output(config: RunConfig) -> OutputService:
    return get_output_service(config.out or get_settings().output_dir)
