"""
Configuration management for QPG
"""

import psutil
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


def _logical_cores() -> int:
    return psutil.cpu_count(logical=True) or 1


class Settings(BaseSettings):
    """Runtime settings loaded from environment variables (prefix QPG_)"""

    # Worker pool
    threads: int = Field(default_factory=_logical_cores)

    # Logging
    log_level: str = Field("INFO")
    log_json: bool = Field(False)

    # Experiment defaults
    output_dir: str = Field("./results")
    oracle_restarts: int = Field(50)
    equilibrium_tol: float = Field(1e-6)

    model_config = SettingsConfigDict(
        env_prefix="QPG_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    @field_validator("threads")
    @classmethod
    def _at_least_one_thread(cls, v: int) -> int:
        return max(1, v)

    @field_validator("log_level")
    @classmethod
    def _upper_level(cls, v: str) -> str:
        return v.upper()


# Global settings instance
settings = Settings()
