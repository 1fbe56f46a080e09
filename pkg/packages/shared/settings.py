# packages/shared/settings.py
from __future__ import annotations

from typing import List, Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="BWEIBULL_",
        extra="ignore",
    )

    # ------------ Harmony Search defaults ------------
    HS_MEMORY_SIZE: int = 30
    HS_HMCR: float = 0.95
    HS_PAR: float = 0.3
    # bandwidth per parameter = fraction * (high - low)
    HS_BANDWIDTH_FRACTION: float = 0.05
    HS_MAX_ITERATIONS: int = 10000

    # ------------ Parameter box (alpha, beta, delta) ------------
    ALPHA_LOW: float = 1e-3
    ALPHA_HIGH: float = 15.0
    BETA_LOW: float = 1e-3
    BETA_HIGH: float = 15.0
    DELTA_LOW: float = -15.0
    DELTA_HIGH: float = 15.0

    Q_GRID: List[float] = Field(
        default_factory=lambda: [0.75, 0.8, 0.85, 0.87, 0.9, 0.95, 0.99, 1.0]
    )

    # ------------ Local polish ------------
    POLISH_MAX_STEPS: int = 200
    POLISH_TOP_K: int = 5

    # ------------ Numerics ------------
    QUAD_EPSABS: float = 1e-12
    QUAD_EPSREL: float = 1e-11
    QUAD_LIMIT: int = 250
    MGF_MAX_TERMS: int = 500
    MGF_RTOL: float = 1e-14
    TSALLIS_MAX_TERMS: int = 300
    SHANNON_MAX_TERMS: int = 60
    SE_COND_LIMIT: float = 1e12
    MODALITY_GRID_POINTS: int = 2048

    # ------------ Runtime ------------
    MAX_WORKERS: int = 1
    DEFAULT_SEED: int = 42
    LOG_LEVEL: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    LOG_JSON: bool = False
    REPORT_INCLUDE_TIMING: bool = False

    def default_bounds(self) -> List[tuple[float, float]]:
        return [
            (self.ALPHA_LOW, self.ALPHA_HIGH),
            (self.BETA_LOW, self.BETA_HIGH),
            (self.DELTA_LOW, self.DELTA_HIGH),
        ]


settings = Settings()
