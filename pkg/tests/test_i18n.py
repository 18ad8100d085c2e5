from __future__ import annotations

from omra.core.i18n import CLI_MESSAGES, cli_t, lang_from_env


def test_language_from_env(monkeypatch):
    monkeypatch.setenv("LANG", "zh_CN.UTF-8")
    assert lang_from_env() == "zh"
    monkeypatch.setenv("LANG", "de_DE.UTF-8")
    assert lang_from_env() == "en"


def test_formatting_and_fallback(monkeypatch):
    assert cli_t("err_prefix", msg="boom") == "error: boom"
    assert cli_t("no_such_key") == "no_such_key"
    monkeypatch.setenv("LANG", "zh_CN.UTF-8")
    assert "boom" in cli_t("err_prefix", msg="boom")


def test_catalogues_share_keys():
    assert set(CLI_MESSAGES["zh"]) == set(CLI_MESSAGES["en"])
