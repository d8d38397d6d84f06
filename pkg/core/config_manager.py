"""
Configuration Manager for the interview script toolkit

Precedence, highest first: command-line overrides, environment variables
(``INTERVIEW_GEN_<SECTION>_<KEY>``), the YAML config file, built-in defaults.
"""
import os
import yaml
import logging
from copy import deepcopy
from dataclasses import dataclass, asdict, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from .exceptions import ConfigurationError


DEFAULT_CONFIG_PATH = "config/toolkit.yaml"
ENV_PREFIX = "INTERVIEW_GEN"
QUALITY_COMPONENTS = ("grammaticality", "non_redundancy", "focus", "coherence")


@dataclass
class BackendConfig:
    """Chat-completion backend configuration"""
    endpoint: str = "https://api.openai.com/v1/chat/completions"
    model: str = "gpt-4o"
    api_key_env: str = "INTERVIEW_GEN_API_KEY"
    timeout: float = 120.0
    max_retries: int = 3
    retry_delay: float = 1.0
    max_calls: int = 64

    def api_key(self) -> Optional[str]:
        """Read the bearer credential from the configured environment variable"""
        return os.getenv(self.api_key_env) or None


@dataclass
class GenerationSettings:
    """Prompt-chain generation settings"""
    temperature: float = 0.7
    max_tokens: int = 1500
    carry_over_turns: int = 6
    context_budget: int = 3000
    retrieval_k: int = 6
    chunk_tokens: int = 200
    token_factor: str = "4/3"
    repair_retries: int = 2
    default_section_turns: int = 6
    min_sections: int = 3
    max_sections: int = 12
    prompt_version: str = "v1"
    sample_script_in_context: bool = True

    @property
    def token_ratio(self) -> Fraction:
        return Fraction(self.token_factor)


@dataclass
class PathsConfig:
    """Filesystem locations"""
    knowledge_dir: str = "knowledge"
    output_dir: str = "output"
    log_dir: str = "logs"


@dataclass
class QualityConfig:
    """Quality scoring configuration"""
    scorer: str = "heuristic"
    weights: Dict[str, float] = None

    def __post_init__(self):
        if self.weights is None:
            self.weights = {name: 1.0 for name in QUALITY_COMPONENTS}


@dataclass
class AppConfig:
    """Complete toolkit configuration"""
    backend: BackendConfig
    generation: GenerationSettings
    paths: PathsConfig
    quality: QualityConfig

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


SECTIONS = {
    "backend": BackendConfig,
    "generation": GenerationSettings,
    "paths": PathsConfig,
    "quality": QualityConfig,
}

_TRUE_STRINGS = {"1", "true", "yes", "on"}
_FALSE_STRINGS = {"0", "false", "no", "off"}


class ConfigManager:
    """Layered configuration loading and validation"""

    def __init__(self, config_path: Optional[str] = None):
        self.explicit_path = config_path is not None
        self.config_path = Path(config_path or DEFAULT_CONFIG_PATH)
        self.logger = logging.getLogger(__name__)

    def load_config(self, overrides: Optional[Mapping[str, Any]] = None) -> AppConfig:
        """
        Load configuration from file, environment and overrides.

        Args:
            overrides: flat mapping of ``"section.key"`` to value, typically from
                command-line flags; ``None`` values are ignored.
        """
        layered: Dict[str, Dict[str, Any]] = {name: {} for name in SECTIONS}

        file_config = self._substitute_env_vars(self._load_yaml_config())
        self._merge(layered, file_config, source=str(self.config_path))
        self._merge(layered, self._env_overrides(), source="environment")
        self._merge(layered, self._unflatten(overrides or {}), source="command line")

        config = AppConfig(**{
            name: self._build_section(name, cls, layered[name])
            for name, cls in SECTIONS.items()
        })
        self._validate(config)
        self.logger.debug(f"Configuration resolved: {config.to_dict()}")
        return config

    def _load_yaml_config(self) -> Dict[str, Any]:
        """Load YAML configuration file"""
        if not self.config_path.exists():
            if self.explicit_path:
                raise ConfigurationError(f"Configuration file not found: {self.config_path}")
            self.logger.debug(f"No configuration file at {self.config_path}, using defaults")
            return {}

        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Invalid YAML in {self.config_path}: {e}")

        if not isinstance(data, dict):
            raise ConfigurationError(f"Configuration root must be a mapping: {self.config_path}")
        self.logger.info(f"Configuration loaded from {self.config_path}")
        return data

    def _substitute_env_vars(self, config: Dict[str, Any]) -> Dict[str, Any]:
        """Replace ${VAR} and ${VAR:default} placeholders in config"""
        def _substitute_recursive(obj):
            if isinstance(obj, dict):
                return {k: _substitute_recursive(v) for k, v in obj.items()}
            elif isinstance(obj, list):
                return [_substitute_recursive(item) for item in obj]
            elif isinstance(obj, str) and obj.startswith("${") and obj.endswith("}"):
                env_var = obj[2:-1]
                default_value = ""
                if ":" in env_var:
                    env_var, default_value = env_var.split(":", 1)
                return os.getenv(env_var, default_value)
            else:
                return obj

        return _substitute_recursive(config)

    def _env_overrides(self) -> Dict[str, Dict[str, Any]]:
        """Collect INTERVIEW_GEN_<SECTION>_<KEY> variables"""
        found: Dict[str, Dict[str, Any]] = {}
        for section, cls in SECTIONS.items():
            for f in fields(cls):
                env_name = f"{ENV_PREFIX}_{section}_{f.name}".upper()
                if env_name in os.environ:
                    found.setdefault(section, {})[f.name] = os.environ[env_name]
        return found

    @staticmethod
    def _unflatten(overrides: Mapping[str, Any]) -> Dict[str, Dict[str, Any]]:
        nested: Dict[str, Dict[str, Any]] = {}
        for dotted, value in overrides.items():
            if value is None:
                continue
            section, _, key = dotted.partition(".")
            if not key:
                raise ConfigurationError(f"Override must be 'section.key': {dotted!r}")
            nested.setdefault(section, {})[key] = value
        return nested

    def _merge(self, target: Dict[str, Dict[str, Any]], layer: Mapping[str, Any],
               source: str) -> None:
        for section, values in layer.items():
            if section not in SECTIONS:
                self.logger.warning(f"Ignoring unknown configuration section {section!r} from {source}")
                continue
            if not isinstance(values, Mapping):
                raise ConfigurationError(f"Section {section!r} from {source} must be a mapping")
            target[section].update(deepcopy(dict(values)))

    def _build_section(self, name: str, cls: type, values: Dict[str, Any]) -> Any:
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(values) - set(known))
        if unknown:
            raise ConfigurationError(f"Unknown key(s) in section {name!r}: {', '.join(unknown)}")
        coerced = {
            key: self._coerce(f"{name}.{key}", value, known[key].type)
            for key, value in values.items()
        }
        return cls(**coerced)

    @staticmethod
    def _coerce(key: str, value: Any, field_type: Any) -> Any:
        """Coerce file/env/flag values to the dataclass field type"""
        try:
            if field_type is bool:
                if isinstance(value, bool):
                    return value
                text = str(value).strip().lower()
                if text in _TRUE_STRINGS:
                    return True
                if text in _FALSE_STRINGS:
                    return False
                raise ValueError(f"not a boolean: {value!r}")
            if field_type is int:
                if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                    raise ValueError(f"not an integer: {value!r}")
                return int(value)
            if field_type is float:
                return float(value)
            if field_type is str:
                return str(value)
            # Dict[str, float] weights: mapping or "name=value,name=value"
            if isinstance(value, str):
                pairs = [item.split("=", 1) for item in value.split(",") if item.strip()]
                value = {k.strip(): v for k, v in pairs}
            return {str(k): float(v) for k, v in dict(value).items()}
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid value for {key}: {e}")

    def _validate(self, config: AppConfig) -> None:
        """Check numeric ranges and cross-field constraints"""
        issues: List[str] = []
        backend, gen, quality = config.backend, config.generation, config.quality

        if not backend.endpoint.startswith(("http://", "https://")):
            issues.append(f"backend.endpoint must be an http(s) URL: {backend.endpoint!r}")
        if not backend.model:
            issues.append("backend.model must be set")
        if backend.timeout <= 0:
            issues.append("backend.timeout must be positive")
        if backend.max_retries < 0 or backend.retry_delay < 0:
            issues.append("backend.max_retries and backend.retry_delay must be non-negative")
        if backend.max_calls <= 0:
            issues.append("backend.max_calls must be positive")

        if not 0 <= gen.temperature <= 2:
            issues.append("generation.temperature must lie in [0, 2]")
        for key in ("max_tokens", "context_budget", "retrieval_k"):
            if getattr(gen, key) <= 0:
                issues.append(f"generation.{key} must be positive")
        if gen.carry_over_turns < 0 or gen.repair_retries < 0:
            issues.append("generation.carry_over_turns and generation.repair_retries must be non-negative")
        if gen.chunk_tokens < 32:
            issues.append("generation.chunk_tokens must be at least 32")
        if gen.default_section_turns < 2:
            issues.append("generation.default_section_turns must be at least 2")
        if not 1 <= gen.min_sections <= gen.max_sections:
            issues.append("generation.min_sections must lie in [1, max_sections]")
        try:
            if gen.token_ratio <= 0:
                issues.append("generation.token_factor must be positive")
        except (ValueError, ZeroDivisionError):
            issues.append(f"generation.token_factor is not a number: {gen.token_factor!r}")

        if not quality.scorer:
            issues.append("quality.scorer must be set")
        unknown = sorted(set(quality.weights) - set(QUALITY_COMPONENTS))
        if unknown:
            issues.append(f"quality.weights has unknown component(s): {', '.join(unknown)}")
        if any(w < 0 for w in quality.weights.values()) or sum(quality.weights.values()) <= 0:
            issues.append("quality.weights must be non-negative with a positive sum")

        if issues:
            raise ConfigurationError("; ".join(issues))
