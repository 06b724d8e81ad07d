from pathlib import Path
from typing import Any

from pydantic import ValidationError

from src.services.management.exceptions import ConfigParseError, ConfigurationError
from src.services.management.schemas import RunConfig


class ConfigService:
    """Reads `key = value` run configs and validates them into RunConfig"""

    def load(self, path: Path | str | None, overrides: dict[str, Any] | None = None) -> RunConfig:
        values: dict[str, Any] = {}
        if path is not None:
            values.update(self.parse_text(self._read(Path(path))))
        for key, value in (overrides or {}).items():
            if value is not None:
                values[key] = value
        return self.validate(values)

    def parse_text(self, text: str) -> dict[str, str]:
        values: dict[str, str] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip().lower().replace("-", "_"), value.strip()
            if not sep or not key:
                raise ConfigParseError(f"Line {number}: expected 'key = value', got '{raw.strip()}'")
            if key in values:
                raise ConfigParseError(f"Line {number}: duplicate key '{key}'")
            if key not in RunConfig.model_fields:
                raise ConfigParseError(f"Line {number}: unknown key '{key}'")
            values[key] = value
        return values

    @staticmethod
    def validate(values: dict[str, Any]) -> RunConfig:
        try:
            return RunConfig.model_validate(values)
        except ValidationError as exc:
            raise ConfigurationError(str(exc)) from exc

    @staticmethod
    def _read(path: Path) -> str:
        try:
            return path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigurationError(f"Cannot read run config {path}: {exc}") from exc
