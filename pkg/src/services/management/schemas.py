from fractions import Fraction
from typing import Any

from pydantic import BaseModel, Field, field_validator, model_validator

SCHEMA_VERSION = "1.0"

MAP_KINDS = ("identity", "doubling", "csv")


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [part.strip() for part in value.replace(";", ",").split(",") if part.strip()]
    return value


class RunConfig(BaseModel):
    """Validation model for one CLI run; file keys and flag overrides land here"""
    group: str | None = Field(default=None, min_length=1, description="Catalog group constructor")
    chain: str | None = Field(default=None, min_length=1, description="Chain constructor over the group")
    cocycle: str | None = Field(default=None, description="Cocycle constructor, catalog default when empty")
    max_radius: int = Field(default=4, ge=1, description="Largest certified radius r")
    radii: list[int] = Field(default_factory=list, description="Radii of the psi_r tables")
    levels: list[int] | None = Field(default=None, description="Component levels in scope")
    ball_cap: int | None = Field(default=None, ge=1, description="Resource cap on Cayley balls")
    mean: str | None = Field(default=None, description="uniform or foelner:N")
    tolerance: float | None = Field(default=None, gt=0, description="Eigenvalue tolerance")
    seed: int | None = Field(default=None, ge=0)
    out: str | None = Field(default=None, description="Output directory")
    maps: str = Field(default="identity", description="Coarse maps for pullback runs")
    map_table: str | None = Field(default=None, description="CSV with the coarse map table")
    control_table: str | None = Field(default=None, description="CSV with the m, M controls")
    manifest: str | None = Field(default=None, description="Certificate manifest for verify-cert")
    net_constant: int | None = Field(default=None, ge=0)
    finiteness_bound: int = Field(default=1, ge=1, description="Bound on maps sharing a target level")
    corrupt_upper: str | None = Field(default=None, description="Amount subtracted from rho_2^2")

    @field_validator("radii", "levels", mode="before")
    @classmethod
    def split_lists(cls, v: Any) -> Any:
        return _split_list(v)

    @field_validator("radii")
    @classmethod
    def validate_radii(cls, v: list[int]) -> list[int]:
        if any(r < 1 for r in v):
            raise ValueError("radii must be positive")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError(f"radii must be strictly increasing, got {v}")
        return v

    @field_validator("levels")
    @classmethod
    def validate_levels(cls, v: list[int] | None) -> list[int] | None:
        if v is not None and any(n < 1 for n in v):
            raise ValueError("levels are numbered from 1")
        return v

    @field_validator("maps")
    @classmethod
    def validate_maps(cls, v: str) -> str:
        kind = v.strip().lower()
        if kind not in MAP_KINDS:
            raise ValueError(f"maps must be one of {', '.join(MAP_KINDS)}")
        return kind

    @model_validator(mode="after")
    def validate_csv_maps(self) -> "RunConfig":
        if self.maps == "csv" and (self.map_table is None or self.control_table is None):
            raise ValueError("csv maps need both map_table and control_table")
        return self

    @field_validator("corrupt_upper")
    @classmethod
    def validate_corruption(cls, v: str | None) -> str | None:
        if v is None:
            return v
        try:
            amount = Fraction(v)
        except ValueError as exc:
            raise ValueError(f"corrupt_upper must be a rational number, got '{v}'") from exc
        if amount <= 0:
            raise ValueError("corrupt_upper must be positive")
        return v


class CheckRecord(BaseModel):
    """One verdict of a report"""
    name: str
    clause: str
    verdict: bool
    witnesses: list[str] = Field(default_factory=list)
    numbers: dict[str, int | float | str | None] = Field(default_factory=dict)


class Report(BaseModel):
    schema_version: str = SCHEMA_VERSION
    command: str
    metadata: dict[str, Any] = Field(default_factory=dict)
    checks: list[CheckRecord] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)
    summary: bool = True


class CertificateManifest(BaseModel):
    """Controls, exclusions and scope of a certificate plus the constructor of its oracle"""
    schema_version: str = SCHEMA_VERSION
    constructor: dict[str, Any]
    lower_sq: list[str] = Field(..., min_length=1)
    upper_sq: list[str] = Field(..., min_length=1)
    exclusions: dict[str, list[int]] = Field(default_factory=dict)
    max_radius: int = Field(..., ge=1)
    levels: list[int] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)

    @field_validator("lower_sq", "upper_sq")
    @classmethod
    def validate_rationals(cls, v: list[str]) -> list[str]:
        for entry in v:
            try:
                Fraction(entry)
            except ValueError as exc:
                raise ValueError(f"Control entry '{entry}' is not a rational number") from exc
        return v

    @field_validator("schema_version")
    @classmethod
    def validate_version(cls, v: str) -> str:
        if v != SCHEMA_VERSION:
            raise ValueError(f"Unsupported manifest schema {v}, expected {SCHEMA_VERSION}")
        return v
