from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    app_name: str = Field(default="Box Haagerup Toolkit")
    debug: bool = Field(default=False)
    log_level: str = Field(default="INFO")

    max_ball_size: int = Field(default=500_000, ge=1)

    eigen_tolerance: float = Field(default=1e-9, gt=0)
    cocycle_check_radius: int = Field(default=2, ge=0)

    cnd_samples: int = Field(default=10_000, ge=0)
    cnd_subset_size: int = Field(default=5, ge=2)
    cnd_subset_count: int = Field(default=200, ge=1)

    metric_samples: int = Field(default=10_000, ge=0)
    metric_sample_radius: int = Field(default=5, ge=0)

    exhaustive_quotient_limit: int = Field(default=64, ge=1)
    unboundedness_threshold: int = Field(default=3, ge=0)

    seed: int = Field(default=0, ge=0)
    workers: int = Field(default=1, ge=1)
    output_dir: str = Field(default="out")
    foelner_default_size: int = Field(default=2, ge=1)

    model_config = SettingsConfigDict(
        env_prefix="BOXHAAG_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )


@lru_cache
def get_settings() -> Settings:
    return Settings()
