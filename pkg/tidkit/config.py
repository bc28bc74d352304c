"""Configuration helpers for tidkit.

Values resolve in order: explicit overrides (CLI flags) > TOML config file >
environment variables > defaults.
"""

from __future__ import annotations

import dataclasses
import os

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from tidkit.errors import PreconditionError


@dataclass(frozen=True)
class ServiceConfig:
    """Connection settings for one OpenAI-compatible endpoint."""

    base_url: str | None = None
    model: str = ""
    api_key_env_name: str = "OPENAI_API_KEY"
    request_timeout: float = 60.0
    max_retries: int = 3
    max_in_flight: int = 4

    def __post_init__(self) -> None:
        if self.max_in_flight < 1:
            raise PreconditionError("max_in_flight must be >= 1")
        if self.max_retries < 0:
            raise PreconditionError("max_retries must be >= 0")
        if self.request_timeout <= 0:
            raise PreconditionError("request_timeout must be positive")

    def api_key(self) -> str | None:
        return os.getenv(self.api_key_env_name) or None


@dataclass(frozen=True)
class PipelineConfig:
    workdir: Path = Path("./work")
    data_raw_dir: Path = Path("./data_raw")
    metadata_paths: tuple[str, ...] = ()
    reviews_paths: tuple[str, ...] = ()
    domain_tags: tuple[str, ...] = ()
    k_core: int = 5
    k_neighbors: int = 5
    tid_length: int = 5
    ks: tuple[int, ...] = (5, 10)
    seed: int = 42
    truncation: int = 20
    compression_k: int | None = None
    parse_retries: int = 3
    checkpoint_every: int = 500
    exemplar_feedback: bool = True
    max_new_tokens: int = 30
    temperature: float = 0.0
    per_step: bool = False
    gti_repeat: int = 1
    seq_repeat: int = 1
    pooled_metrics: bool = False
    brute_force: bool = False
    chat: ServiceConfig = field(default_factory=ServiceConfig)
    embedding: ServiceConfig = field(default_factory=ServiceConfig)

    def validate(self) -> "PipelineConfig":
        if self.tid_length < 1:
            raise PreconditionError("tid_length (N) must be >= 1")
        if self.k_neighbors < 1:
            raise PreconditionError("k_neighbors must be >= 1")
        if self.k_core < 1:
            raise PreconditionError("k_core must be >= 1")
        if not self.ks or any(k < 1 for k in self.ks):
            raise PreconditionError("ks must be a nonempty list of positive integers")
        if self.truncation < 2:
            raise PreconditionError("truncation must be >= 2")
        if self.compression_k is not None and self.compression_k < 1:
            raise PreconditionError("compression_k must be >= 1")
        if self.parse_retries < 1:
            raise PreconditionError("parse_retries must be >= 1")
        if len(self.metadata_paths) != len(self.reviews_paths):
            raise PreconditionError("metadata_paths and reviews_paths must pair up")
        return self

    def to_dict(self) -> dict[str, Any]:
        """Serializable, secret-free view used for config.resolved.json."""
        data = dataclasses.asdict(self)
        data["workdir"] = str(self.workdir)
        data["data_raw_dir"] = str(self.data_raw_dir)
        for key in ("metadata_paths", "reviews_paths", "domain_tags", "ks"):
            data[key] = list(data[key])
        return data


_PATH_FIELDS = {"workdir", "data_raw_dir"}
_TUPLE_FIELDS = {"metadata_paths", "reviews_paths", "domain_tags", "ks"}


def _env_path(key: str, default: str) -> Path:
    return Path(os.getenv(key, default)).expanduser().resolve()


def _env_service(prefix: str) -> dict[str, Any]:
    values: dict[str, Any] = {}
    base_url = os.getenv(f"TIDKIT_{prefix}_BASE_URL")
    model = os.getenv(f"TIDKIT_{prefix}_MODEL")
    if base_url:
        values["base_url"] = base_url
    if model:
        values["model"] = model
    return values


def _coerce(name: str, value: Any) -> Any:
    if name in _PATH_FIELDS:
        return Path(value).expanduser().resolve()
    if name in _TUPLE_FIELDS:
        if isinstance(value, str):
            value = [v.strip() for v in value.split(",") if v.strip()]
        items = tuple(value)
        if name != "ks":
            return items
        try:
            return tuple(int(v) for v in items)
        except (TypeError, ValueError) as exc:
            raise PreconditionError(f"ks must be integers, got {items}") from exc
    return value


def _merge_service(
    base: Mapping[str, Any], *layers: Mapping[str, Any]
) -> ServiceConfig:
    merged = dict(base)
    for layer in layers:
        if not isinstance(layer, Mapping):
            raise PreconditionError(f"Service settings must be a table, got {layer!r}")
        merged.update({k: v for k, v in layer.items() if v is not None})
    known = {f.name for f in dataclasses.fields(ServiceConfig)}
    unknown = set(merged) - known
    if unknown:
        raise PreconditionError(f"Unknown service config keys: {sorted(unknown)}")
    return ServiceConfig(**merged)


def load_config(
    config_path: Path | str | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> PipelineConfig:
    """Resolve a PipelineConfig from defaults, environment, file and overrides.

    Args:
        config_path: Optional TOML file with flat keys plus ``[chat]`` and
            ``[embedding]`` tables.
        overrides: Values from the command line; ``None`` entries are ignored.
    """
    values: dict[str, Any] = {
        "workdir": _env_path("TIDKIT_WORKDIR", "./work"),
        "data_raw_dir": _env_path("TIDKIT_DATA_RAW_DIR", "./data_raw"),
    }
    chat_layers: list[Mapping[str, Any]] = [_env_service("CHAT")]
    embed_layers: list[Mapping[str, Any]] = [_env_service("EMBED")]

    if config_path is not None:
        path = Path(config_path)
        try:
            file_values = tomllib.loads(path.read_text(encoding="utf-8"))
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise PreconditionError(f"Cannot read config file {path}: {exc}") from exc
        chat_layers.append(file_values.pop("chat", {}))
        embed_layers.append(file_values.pop("embedding", {}))
        values.update(file_values)

    overrides = dict(overrides or {})
    chat_layers.append(overrides.pop("chat", {}) or {})
    embed_layers.append(overrides.pop("embedding", {}) or {})
    values.update({k: v for k, v in overrides.items() if v is not None})

    known = {f.name for f in dataclasses.fields(PipelineConfig)}
    unknown = set(values) - known
    if unknown:
        raise PreconditionError(f"Unknown config keys: {sorted(unknown)}")

    resolved = {name: _coerce(name, value) for name, value in values.items()}
    resolved["chat"] = _merge_service({}, *chat_layers)
    resolved["embedding"] = _merge_service({}, *embed_layers)
    return PipelineConfig(**resolved).validate()
