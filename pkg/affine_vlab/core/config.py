import os
from pathlib import Path

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    PROJECT_NAME: str = "affine-vlab"
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"

    # Worker pool cap for restarts, verify checks and chunked reductions
    AFFINE_VLAB_THREADS: int = max(1, os.cpu_count() or 1)

    # Quadrature defaults
    DEFAULT_DIRECTIONS_2D: int = 128
    DEFAULT_DIRECTIONS_3D: int = 266

    # Cells per reduction chunk in the energy kernels
    CHUNK_CELLS: int = 8192

    # Degeneracy thresholds
    PSI_DEGENERACY: float = 1e-30
    FIELD_ZERO_TOL: float = 1e-14

    class Config:
        env_file = str(Path(__file__).parent.parent.parent / ".env")

    @property
    def worker_count(self) -> int:
        return max(1, int(self.AFFINE_VLAB_THREADS))


settings = Settings()
