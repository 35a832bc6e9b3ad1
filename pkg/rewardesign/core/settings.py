from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Output
    OUTPUT_DIR: str = "runs"

    # Limiti di capacità
    # ORACLE_CAP: numero massimo di sequenze di azioni enumerabili (|A|^horizon)
    # DP_CAP: numero massimo di celle della tabella |S| x horizon x |A|
    ORACLE_CAP: int = 10_000_000
    DP_CAP: int = 50_000_000

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s — %(levelname)s — %(name)s — %(message)s"

    model_config = SettingsConfigDict(env_file=".env", env_prefix="REWARDESIGN_", extra="ignore")


settings = Settings()
