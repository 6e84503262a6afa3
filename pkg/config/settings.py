"""Configuration management"""

import logging
import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Dict, Optional


@dataclass
class NumericsConfig:
    """Tolerances and eigensolver selection"""
    predicate_tol: float = 1e-9
    residual_tol: float = 1e-7
    psd_clamp: float = 1e-9
    eig_backend: str = "lapack"
    jacobi_max_sweeps: int = 100


@dataclass
class CapacityConfig:
    """Hard caps that fail fast instead of allocating blindly"""
    max_qubits: int = 12
    max_circuit_qubits: int = 20
    max_charpoly_side: int = 64
    max_tna_bits: int = 40
    max_amplification: int = 64

    @property
    def max_dim(self) -> int:
        return 2 ** self.max_qubits


@dataclass
class ProtocolConfig:
    """Protocol simulation defaults"""
    seed: int = 0
    workers: int = 1
    seesaw_restarts: int = 4
    sdp_eps: float = 1e-9


@dataclass
class LoggingConfig:
    """Logging configuration"""
    level: str = "INFO"
    file: Optional[str] = None
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


@dataclass
class Config:
    """Main configuration class"""
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    capacity: CapacityConfig = field(default_factory=CapacityConfig)
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)


# env var -> (section, field, parser)
_ENV_FIELDS: Dict[str, tuple] = {
    "QSD_PREDICATE_TOL": ("numerics", "predicate_tol", float),
    "QSD_RESIDUAL_TOL": ("numerics", "residual_tol", float),
    "QSD_PSD_CLAMP": ("numerics", "psd_clamp", float),
    "QSD_EIG_BACKEND": ("numerics", "eig_backend", str),
    "QSD_JACOBI_MAX_SWEEPS": ("numerics", "jacobi_max_sweeps", int),
    "QSD_MAX_QUBITS": ("capacity", "max_qubits", int),
    "QSD_MAX_CIRCUIT_QUBITS": ("capacity", "max_circuit_qubits", int),
    "QSD_MAX_CHARPOLY_SIDE": ("capacity", "max_charpoly_side", int),
    "QSD_MAX_TNA_BITS": ("capacity", "max_tna_bits", int),
    "QSD_MAX_AMPLIFICATION": ("capacity", "max_amplification", int),
    "QSD_SEED": ("protocol", "seed", int),
    "QSD_WORKERS": ("protocol", "workers", int),
    "QSD_SEESAW_RESTARTS": ("protocol", "seesaw_restarts", int),
    "QSD_SDP_EPS": ("protocol", "sdp_eps", float),
    "QSD_LOG_LEVEL": ("logging", "level", str),
    "QSD_LOG_FILE": ("logging", "file", str),
}

EIG_BACKENDS = ("lapack", "jacobi")


def load_config(config_file: Optional[str] = None) -> Config:
    """
    Load configuration from environment and an optional file

    Environment variables are applied first; a JSON, YAML or .env file
    given here overrides them.

    Args:
        config_file: Path to config file (JSON, YAML, or .env)

    Returns:
        Config object
    """
    config = Config()

    _load_from_env(config)

    if config_file:
        path = Path(config_file)
        if path.exists():
            if path.suffix == ".json":
                _load_from_json(config, path)
            elif path.suffix in (".yaml", ".yml"):
                _load_from_yaml(config, path)
            elif path.name == ".env" or path.suffix == ".env":
                _load_from_dotenv(config, path)

    _validate(config)
    return config


def _set(config: Config, section: str, name: str, raw: Any, parser: Callable, source: str):
    from src.core.errors import ArgumentError

    try:
        value = parser(raw)
    except (TypeError, ValueError) as e:
        raise ArgumentError(f"{source}: cannot parse {raw!r} for {section}.{name}") from e
    setattr(getattr(config, section), name, value)


def _load_from_env(config: Config):
    """Load configuration from environment variables"""
    for var, (section, name, parser) in _ENV_FIELDS.items():
        if var in os.environ:
            _set(config, section, name, os.environ[var], parser, var)


def _apply_mapping(config: Config, data: Dict[str, Any], source: str):
    for section in ("numerics", "capacity", "protocol", "logging"):
        values = data.get(section) or {}
        target = getattr(config, section)
        for name, raw in values.items():
            if not hasattr(target, name):
                continue
            current = getattr(target, name)
            if raw is None:
                setattr(target, name, None)
                continue
            parser = type(current) if current is not None else str
            _set(config, section, name, raw, parser, source)


def _load_from_json(config: Config, file_path: Path):
    """Load configuration from JSON file"""
    import json

    with open(file_path, "r") as f:
        data = json.load(f)

    _apply_mapping(config, data, str(file_path))


def _load_from_yaml(config: Config, file_path: Path):
    """Load configuration from YAML file"""
    try:
        import yaml
    except ImportError:
        return

    with open(file_path, "r") as f:
        data = yaml.safe_load(f)

    if data:
        _apply_mapping(config, data, str(file_path))


def _load_from_dotenv(config: Config, file_path: Path):
    """Load configuration from .env file"""
    try:
        from dotenv import dotenv_values
    except ImportError:
        return

    values = dotenv_values(file_path)
    for var, (section, name, parser) in _ENV_FIELDS.items():
        if values.get(var) is not None:
            _set(config, section, name, values[var], parser, f"{file_path}:{var}")


def _validate(config: Config):
    from src.core.errors import ArgumentError

    if config.numerics.eig_backend not in EIG_BACKENDS:
        raise ArgumentError(
            f"eig_backend must be one of {EIG_BACKENDS}, got {config.numerics.eig_backend!r}"
        )
    if config.capacity.max_qubits < 1 or config.capacity.max_circuit_qubits < 1:
        raise ArgumentError("qubit capacities must be positive")
    if config.protocol.workers < 1:
        raise ArgumentError(f"workers must be >= 1, got {config.protocol.workers}")


def save_config(config: Config, config_file: str):
    """Save configuration to file"""
    import json
    from dataclasses import asdict

    with open(config_file, "w") as f:
        json.dump(asdict(config), f, indent=2)


def get_default_config() -> Config:
    """Get default configuration"""
    return Config()


def create_config_file(path: str = "config.json"):
    """Create a sample config file"""
    config = get_default_config()
    save_config(config, path)
    return path


# set by reload_config; takes precedence over QSD_CONFIG_FILE
_config_file: Optional[str] = None


@lru_cache(maxsize=1)
def get_config() -> Config:
    """Process-wide configuration, loaded once from the environment and config file"""
    return load_config(_config_file or os.environ.get("QSD_CONFIG_FILE"))


def configure_logging(settings: Optional[LoggingConfig] = None):
    """Attach handlers to the root logger according to ``settings``"""
    settings = settings or get_config().logging
    handlers: list = [logging.StreamHandler()]
    if settings.file:
        handlers.append(logging.FileHandler(settings.file))
    logging.basicConfig(
        level=getattr(logging, settings.level.upper(), logging.INFO),
        format=settings.format,
        handlers=handlers,
        force=True,
    )


def reload_config(config_file: Optional[str] = None) -> Config:
    """
    Drop the cached configuration and load it again

    ``config_file`` replaces the file of any earlier reload; without it the
    file named by QSD_CONFIG_FILE (if any) is used. The process environment
    is left untouched.
    """
    global _config_file
    _config_file = str(config_file) if config_file else None
    get_config.cache_clear()
    return get_config()
