"""
Core configuration settings for the entanglement toolkit
"""

from functools import lru_cache

from pydantic import BaseModel, ConfigDict, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Tolerances(BaseModel):
    """Numerical tolerances, all relative to the Frobenius norm of the input"""

    model_config = ConfigDict(frozen=True)

    hermitian: float = Field(default=1e-10, gt=0, description="Hermiticity tolerance")
    eig: float = Field(default=1e-9, gt=0, description="Eigen-residual tolerance")
    psd: float = Field(default=1e-9, gt=0, description="Positivity tolerance")
    rank: float = Field(default=1e-9, gt=0, description="Rank / span tolerance")


DEFAULT_TOLERANCES = Tolerances()


class Settings(BaseSettings):
    """Application settings with environment variable support"""

    model_config = SettingsConfigDict(
        env_prefix="ENTANGLE_",
        env_file=".env",
        env_file_encoding="utf-8",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    app_name: str = "entangle"
    environment: str = Field(default="development")

    # Logging
    log_level: str = Field(default="WARNING")
    log_format: str = Field(default="console", pattern="^(console|json)$")

    # Execution
    threads: int = Field(default=1, ge=1, description="Parallelism cap (ENTANGLE_THREADS)")
    seed: int = Field(default=0, ge=0, description="Root seed for every random draw")
    ambient_cap: int = Field(default=4096, ge=1, description="Largest ambient dimension accepted")

    # CHSH see-saw
    chsh_restarts: int = Field(default=20, ge=1)
    chsh_max_iter: int = Field(default=500, ge=1)

    # k=2 witness search
    witness_restarts: int = Field(default=8, ge=1)
    witness_max_iter: int = Field(default=200, ge=1)

    tolerances: Tolerances = Field(default_factory=Tolerances)

    @property
    def is_production(self) -> bool:
        return self.environment.lower() == "production"

    def with_overrides(self, **overrides) -> "Settings":
        """Copy of the settings with CLI overrides applied (None values ignored)"""
        tolerance_keys = {"hermitian", "eig", "psd", "rank"}
        tol_updates = {
            key: value for key, value in overrides.items()
            if key in tolerance_keys and value is not None
        }
        updates = {
            key: value for key, value in overrides.items()
            if key not in tolerance_keys and value is not None
        }
        if tol_updates:
            updates["tolerances"] = Tolerances(**{**self.tolerances.model_dump(), **tol_updates})
        return self.model_copy(update=updates)


@lru_cache()
def get_settings() -> Settings:
    """Get cached application settings"""
    return Settings()
