from pydantic_settings import BaseSettings, SettingsConfigDict

class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file='.env', env_file_encoding='utf-8', env_prefix='LMSSC_')

    # Protocol defaults (k=15, 20 trials, rates 10/20/30/50%, 100 iterations, 1e-5 on F)
    NEIGHBOR_COUNT: int = 15
    TRIALS: int = 20
    LABEL_RATES: list[float] = [0.1, 0.2, 0.3, 0.5]
    MAX_ITERS: int = 100
    F_REL_TOL: float = 1e-5

    # Artifact defaults, not taken from any published table
    BETA: float = 1.0
    GAMMA: float = 1.0
    LATENT_DIM: int = 10

    BASE_SEED: int = 0
    JOBS: int = 1

    LOG_FILE: str = "lmssc.log"
    LOG_LEVEL: str = "INFO"
    CHECK_INVARIANTS: bool = False

    MLFLOW_TRACKING_URI: str | None = None
    MLFLOW_EXPERIMENT: str = "lmssc"

settings = Settings()
