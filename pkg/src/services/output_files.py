import csv
import io
import logging
import tempfile
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from pydantic import BaseModel

from src.services.management.exceptions import FileAccessError

logger = logging.getLogger(__name__)


class OutputService:
    """Atomic writers for reports, manifests and CSV tables under one output directory"""

    def __init__(self, root: Path | str):
        self.root = Path(root)

    def path(self, name: str) -> Path:
        return self.root / name

    def write_file(self, name: str, content: str) -> Path:
        target = self.path(name)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            with tempfile.NamedTemporaryFile(
                mode="w",
                encoding="utf-8",
                newline="",
                delete=False,
                dir=str(target.parent),
            ) as tmp_file:
                tmp_file.write(content)
                temp_path = Path(tmp_file.name)
            temp_path.replace(target)
        except (PermissionError, OSError) as exc:
            raise FileAccessError(str(exc)) from exc
        logger.debug("Wrote %s", target)
        return target

    def write_model(self, name: str, model: BaseModel) -> Path:
        return self.write_file(name, model.model_dump_json(indent=2) + "\n")

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if cell is None else str(cell) for cell in row])
        return self.write_file(name, buffer.getvalue())

    @staticmethod
    def read_file(path: Path | str) -> str:
        try:
            return Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise FileAccessError(str(exc)) from exc
