import os
from functools import lru_cache
from typing import Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from src.core.errors import ConfigError

load_dotenv()

ENV_NAMES: Dict[str, str] = {
    "threads": "ENCLOSE_THREADS",
    "log_level": "ENCLOSE_LOG_LEVEL",
    "archive": "ENCLOSE_ARCHIVE",
}


class Settings(BaseModel):
    """Process-wide settings read from the environment (and a .env file)"""

    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    log_level: str = "WARNING"
    archive: Optional[str] = None

    @field_validator("log_level")
    @classmethod
    def _upper(cls, v: str) -> str:
        return v.upper()

    @classmethod
    def from_env(cls) -> "Settings":
        values = {key: os.environ[name] for key, name in ENV_NAMES.items() if os.getenv(name)}
        try:
            return cls(**values)
        except ValidationError as exc:
            error = exc.errors()[0]
            name = ENV_NAMES[str(error["loc"][0])]
            raise ConfigError(f"{name}={values.get(error['loc'][0])!r}: {error['msg']}", field=name) from exc


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings.from_env()
