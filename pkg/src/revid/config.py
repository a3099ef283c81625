"""Service configuration: JSON file plus environment-variable overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .errors import FormatError, IoError


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8750
    data_dir: str = "."
    weights_path: str | None = None
    catalog_path: str | None = None
    cors_origins: list = field(default_factory=list)


_ENV_PREFIX = "REVID_"


def load_config(path=None, env=None) -> ServiceConfig:
    """Build the config from an optional JSON file, then apply environment
    overrides (REVID_HOST, REVID_PORT, REVID_DATA_DIR, REVID_WEIGHTS,
    REVID_CATALOG, REVID_CORS_ORIGINS as a comma-separated list)."""
    cfg = ServiceConfig()
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise IoError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise FormatError(f"config is not valid JSON: {exc}") from exc
        cfg.host = doc.get("host", cfg.host)
        cfg.port = int(doc.get("port", cfg.port))
        cfg.data_dir = doc.get("data_dir", cfg.data_dir)
        cfg.weights_path = doc.get("weights_path", cfg.weights_path)
        cfg.catalog_path = doc.get("catalog_path", cfg.catalog_path)
        cfg.cors_origins = list(doc.get("cors_origins", cfg.cors_origins))

    env = os.environ if env is None else env
    if env.get(_ENV_PREFIX + "HOST"):
        cfg.host = env[_ENV_PREFIX + "HOST"]
    if env.get(_ENV_PREFIX + "PORT"):
        cfg.port = int(env[_ENV_PREFIX + "PORT"])
    if env.get(_ENV_PREFIX + "DATA_DIR"):
        cfg.data_dir = env[_ENV_PREFIX + "DATA_DIR"]
    if env.get(_ENV_PREFIX + "WEIGHTS"):
        cfg.weights_path = env[_ENV_PREFIX + "WEIGHTS"]
    if env.get(_ENV_PREFIX + "CATALOG"):
        cfg.catalog_path = env[_ENV_PREFIX + "CATALOG"]
    if env.get(_ENV_PREFIX + "CORS_ORIGINS"):
        cfg.cors_origins = [
            o.strip() for o in env[_ENV_PREFIX + "CORS_ORIGINS"].split(",") if o.strip()
        ]
    return cfg
