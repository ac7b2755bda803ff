from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    log_level: str = "INFO"
    data_dir: str = "data"
    results_dir: str = "results"
    bench_workers: int = 1

    class Config:
        env_prefix = "SMSVM_"
        env_file = ".env"
        extra = "ignore"


settings = Settings()
