import argparse
import logging
from collections.abc import Callable, Sequence

from src.cli.dependencies import get_output, get_run_config
from src.cli.exception import exit_code_for, exit_code_for_summary
from src.services import get_box_service, get_embedding_service, get_kernel_service
from src.services.management.exceptions import ToolkitError
from src.services.management.schemas import Report, RunConfig
from src.services.output_files import OutputService

logger = logging.getLogger(__name__)

Handler = Callable[[RunConfig, OutputService], Report]


def boxfam(config: RunConfig, output: OutputService) -> Report:
    return get_box_service().boxfam(config, output)


def forward(config: RunConfig, output: OutputService) -> Report:
    return get_embedding_service().forward(config, output)


def backward(config: RunConfig, output: OutputService) -> Report:
    return get_kernel_service().backward(config, output)


def verify_cert(config: RunConfig, output: OutputService) -> Report:
    return get_embedding_service().verify_certificate(config, output)


def pullback(config: RunConfig, output: OutputService) -> Report:
    return get_embedding_service().pullback(config, output)


COMMANDS: dict[str, tuple[Handler, str]] = {
    "boxfam": (boxfam, "Box family tables, d' axioms and separation tables"),
    "forward": (forward, "Certificate from a proper cocycle, verified and written as a manifest"),
    "backward": (backward, "psi_r tables and their stabilized limit from a certificate"),
    "verify-cert": (verify_cert, "Re-verify a certificate manifest"),
    "pullback": (pullback, "Certificate pulled back along coarse maps, verified"),
}


def _mean(value: str) -> str:
    text = value.strip().lower()
    name, _, size = text.partition(":")
    if text == "uniform" or (name == "foelner" and size.isdigit()):
        return text
    raise argparse.ArgumentTypeError("expected 'uniform' or 'foelner:N'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="boxhaag", description="Box families and the Haagerup property")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--config", metavar="PATH", help="key = value run config")
        sub.add_argument("--seed", type=int, help="process-wide random seed")
        sub.add_argument("--tol", type=float, help="eigenvalue tolerance")
        sub.add_argument("--out", metavar="DIR", help="output directory")
        sub.add_argument("--mean", type=_mean, help="uniform or foelner:N")
        if name == "verify-cert":
            sub.add_argument("--manifest", metavar="PATH", help="certificate manifest to verify")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler, _ = COMMANDS[args.command]
    try:
        config = get_run_config(args)
        report = handler(config, get_output(config))
    except ToolkitError as exc:
        code = exit_code_for(exc)
        logger.error("%s aborted (%s): %s", args.command, type(exc).__name__, exc)
        return int(code)
    failed = [record.name for record in report.checks if not record.verdict]
    if failed:
        logger.warning("%s: %d failing checks, first: %s", args.command, len(failed), failed[0])
    return int(exit_code_for_summary(report.summary))
