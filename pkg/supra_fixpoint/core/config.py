import json
from typing import Annotated, Any, Dict, List, Optional, Union

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, NoDecode, SettingsConfigDict


class Settings(BaseSettings):
    """Library and CLI settings.

    This class uses Pydantic's BaseSettings which automatically reads from environment variables.
    Environment variables take precedence over values defined in the class.

    Example:
        If you define SUPRA_SAMPLES=1000 in your environment, it will override the default
        value of 100000 for every sampled check.
    """
    # REPORT SETTINGS
    schema_version: str = "supra-fixpoint/1"

    # LOGGING SETTINGS
    log_level: str = "WARNING"
    log_file: Optional[str] = None

    # AXIOM CHECKS
    # Absolute tolerance on the triple defect
    axiom_tolerance: float = Field(1e-9, ge=0)
    # Tolerance on d(x, x) = 0 and on symmetry
    diagonal_tolerance: float = Field(1e-12, ge=0)
    samples: int = Field(100_000, ge=1)
    seed: int = 0

    # SOLVER SETTINGS
    step_tol: float = Field(1e-12, gt=0)
    max_iter: int = Field(100_000, ge=1)
    # Step distances above this value abort the iteration
    divergence_ceiling: float = Field(1e12, gt=0)
    q_cap: int = Field(10_000, ge=2)
    series_max_terms: int = Field(1_000_000, ge=1)
    # Consecutive ratio observations needed to accept or reject a series
    series_patience: int = Field(10, ge=1)
    ball_samples: int = Field(1000, ge=1)

    # COMPARISON FUNCTIONS
    membership_margin: float = Field(1e-6, ge=0)
    vanish_tol: float = Field(1e-6, gt=0)
    membership_n_max: int = Field(10_000_000, ge=1)
    ratio_window: int = Field(64, ge=2)
    # NoDecode lets the validator below split comma lists instead of JSON-decoding them
    ratio_probe_depths: Annotated[List[int], NoDecode] = [1000, 1_000_000, 1_000_000_000]
    t_grid: Annotated[List[float], NoDecode] = [1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0]

    # DISCRETE EXAMPLE
    discrete_n: int = Field(200, ge=2)
    lemma_samples: int = Field(100_000, ge=1)

    model_config = SettingsConfigDict(
        env_prefix="SUPRA_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
    )

    @field_validator("t_grid", "ratio_probe_depths", mode="before")
    @classmethod
    def assemble_number_list(cls, v: Union[str, List[Any]]) -> Union[List[Any], str]:
        """Parse comma-separated numbers from the environment into a list."""
        if isinstance(v, str) and v.startswith("["):
            return json.loads(v)
        if isinstance(v, str):
            return [i.strip() for i in v.split(",") if i.strip()]
        if isinstance(v, (list, tuple)):
            return list(v)
        raise ValueError(v)


# Create a global settings instance
settings = Settings()


def get_settings_dict() -> Dict[str, Any]:
    """Return settings as a dictionary, e.g. for echoing into reports."""
    return settings.model_dump()


def get_setting(key: str, default: Any = None) -> Any:
    """Get a specific setting by key with an optional default value."""
    return getattr(settings, key, default)
