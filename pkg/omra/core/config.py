"""用户目录下的 YAML/JSON 配置；环境变量 OMRA_CONFIG 只用来指定文件路径。

优先级：命令行参数 > 配置文件 > 内置默认值。
"""
from __future__ import annotations

import json
import logging
import os
from pathlib import Path
from typing import Any

from omra.core.errors import ConfigError

logger = logging.getLogger(__name__)

ENV_CONFIG = "OMRA_CONFIG"
_CONFIG_DIR = Path.home() / ".config" / "omra"
# 未显式指定时按此顺序查找
_CANDIDATES = ("config.yaml", "config.yml", "config.json")


def _env_path() -> Path | None:
    raw = os.environ.get(ENV_CONFIG, "").strip()
    return Path(raw).expanduser().resolve() if raw else None


def _is_json(path: Path) -> bool:
    return path.suffix.lower() == ".json"


def get_config_path() -> Path:
    """新建配置时的目标路径：OMRA_CONFIG，否则 ~/.config/omra/config.yaml。"""
    return _env_path() or _CONFIG_DIR / _CANDIDATES[0]


def _existing_config() -> Path | None:
    env = _env_path()
    if env is not None:
        return env if env.is_file() else None
    return next((p for p in (_CONFIG_DIR / n for n in _CANDIDATES) if p.is_file()), None)


def get_config_file_path() -> Path:
    """已存在的配置文件，没有则为 get_config_path()。"""
    return _existing_config() or get_config_path()


def _parse(path: Path) -> Any:
    text = path.read_text(encoding="utf-8")
    if _is_json(path):
        return json.loads(text)
    import yaml

    return yaml.safe_load(text) or {}


def load_config(explicit_path: Path | None = None) -> dict[str, Any]:
    """读不到、解析失败或顶层不是映射时返回空 dict 并记 warning，不抛异常。"""
    path = explicit_path.expanduser().resolve() if explicit_path is not None else _existing_config()
    if path is None or not path.is_file():
        return {}
    try:
        data = _parse(path)
    except Exception as e:
        logger.warning("Failed to load config from %s: %s", path, e)
        return {}
    if not isinstance(data, dict):
        logger.warning("Ignoring config %s: top level is not a mapping", path)
        return {}
    return data


def save_config(config: dict[str, Any], path: Path | None = None) -> Path:
    """按扩展名写 YAML 或 JSON；path 为空时写到 get_config_file_path()。"""
    path = (path or get_config_file_path()).expanduser().resolve()
    path.parent.mkdir(parents=True, exist_ok=True)
    if _is_json(path):
        text = json.dumps(config, indent=2, ensure_ascii=False) + "\n"
    else:
        import yaml

        text = yaml.safe_dump(config, allow_unicode=True, default_flow_style=False, sort_keys=False)
    path.write_text(text, encoding="utf-8")
    logger.debug("Saved config to %s", path)
    return path


def get_nested(data: dict[str, Any], key: str) -> Any:
    """点号键取值，如 encoder.q_base；路径中断时为 None。"""
    node: Any = data
    for part in key.strip().split("."):
        node = node.get(part) if isinstance(node, dict) else None
        if node is None:
            return None
    return node


def set_nested(data: dict[str, Any], key: str, value: Any) -> None:
    """点号键写值，缺失或非映射的中间层替换为新 dict。"""
    *parents, leaf = key.strip().split(".")
    node = data
    for part in parents:
        child = node.get(part)
        if not isinstance(child, dict):
            child = node[part] = {}
        node = child
    node[leaf] = value


_INT_KEYS = frozenset({
    "encoder.intra_period",
    "encoder.workers",
    "estimator.pyramid_levels",
    "estimator.block",
    "estimator.search_radius",
})
_FLOAT_KEYS = frozenset({"encoder.q_base", "encoder.lambda_scale", "encoder.lambda"})
_LIST_INT_KEYS = frozenset({"encoder.scales"})
_BOOL_KEYS = frozenset({"report.svg"})


def coerce_config_value(key: str, raw: str) -> Any:
    """根据键名将字符串转为合适类型；无法转换时保留原字符串。"""
    raw = raw.strip()
    try:
        if key in _LIST_INT_KEYS:
            return [int(x.strip()) for x in raw.split(",") if x.strip()]
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError:
        return raw
    if key in _BOOL_KEYS:
        return raw.lower() in ("1", "true", "yes", "on")
    return raw


def _pick(cli_value: Any, section: dict[str, Any], key: str, default: Any = None) -> Any:
    if cli_value is not None:
        return cli_value
    value = section.get(key)
    return default if value is None else value


def resolve_estimator_config(config: dict[str, Any], **overrides: Any):
    from omra.motion.flow import EstimatorConfig

    section = config.get("estimator") or {}
    if not isinstance(section, dict):
        raise ConfigError("config section 'estimator' must be a mapping")
    preset = _pick(overrides.pop("preset", None), section, "preset", "spy")
    params = {k: _pick(overrides.get(k), section, k) for k in ("pyramid_levels", "block", "search_radius")}
    try:
        return EstimatorConfig.from_preset(str(preset), **params)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid estimator config: {e}") from e


def resolve_encoder_config(config: dict[str, Any], **overrides: Any):
    """合并配置文件 encoder / estimator 段与命令行覆盖，构建并校验 EncoderConfig。

    overrides 键：q_base, lambda_scale, rd_lambda, intra_period, variant, scales, workers,
    preset, pyramid_levels, block, search_radius；值为 None 表示未在命令行给出。
    """
    from omra.engine.encoder import EncoderConfig, parse_scales, parse_variant

    section = config.get("encoder") or {}
    if not isinstance(section, dict):
        raise ConfigError("config section 'encoder' must be a mapping")
    estimator = resolve_estimator_config(
        config,
        preset=overrides.get("preset"),
        pyramid_levels=overrides.get("pyramid_levels"),
        block=overrides.get("block"),
        search_radius=overrides.get("search_radius"),
    )
    variant, fixed_scale = parse_variant(str(_pick(overrides.get("variant"), section, "variant", "omra")))
    scales = _pick(overrides.get("scales"), section, "scales", "1,2,4,8")
    try:
        return EncoderConfig(
            q_base=float(_pick(overrides.get("q_base"), section, "q_base", 12.0)),
            rd_lambda=_optional_float(_pick(overrides.get("rd_lambda"), section, "lambda")),
            lambda_scale=float(_pick(overrides.get("lambda_scale"), section, "lambda_scale", 0.85)),
            intra_period=int(_pick(overrides.get("intra_period"), section, "intra_period", 32)),
            variant=variant,
            fixed_scale=fixed_scale,
            scales=parse_scales(scales),
            estimator=estimator,
            workers=int(_pick(overrides.get("workers"), section, "workers", 1)),
        )
    except (TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"invalid encoder config: {e}") from e


def _optional_float(value: Any) -> float | None:
    return None if value is None else float(value)


__all__ = [
    "get_config_path",
    "get_config_file_path",
    "load_config",
    "save_config",
    "get_nested",
    "set_nested",
    "coerce_config_value",
    "resolve_estimator_config",
    "resolve_encoder_config",
]
