"""命令行文案（zh / en），语言取自 LANG。"""
from __future__ import annotations

import os
from typing import Any

from omra.core.i18n.cli import CLI_MESSAGES

DEFAULT_LANG = "en"
_LOCALE_VARS = ("LANG", "LANGUAGE", "LC_ALL")


def _locale_code(value: str) -> str:
    # "zh_CN.UTF-8" / "zh_CN:en_US" → "zh_cn"
    return value.split(":", 1)[0].split(".", 1)[0].strip().lower()


def lang_from_env() -> str:
    """第一个非空的 LANG / LANGUAGE / LC_ALL 决定语言；zh* 为中文，其余英文。"""
    value = next((v for v in (os.environ.get(k, "") for k in _LOCALE_VARS) if v), "")
    if not value:
        return DEFAULT_LANG
    return "zh" if _locale_code(value).startswith("zh") else "en"


def cli_t(key: str, **kwargs: Any) -> str:
    """按当前语言取文案并 format；缺键时回退英文，再回退键名本身。"""
    table = CLI_MESSAGES.get(lang_from_env(), CLI_MESSAGES[DEFAULT_LANG])
    template = table.get(key) or CLI_MESSAGES[DEFAULT_LANG].get(key, key)
    return template.format(**kwargs) if kwargs else template


__all__ = ["CLI_MESSAGES", "DEFAULT_LANG", "cli_t", "lang_from_env"]
