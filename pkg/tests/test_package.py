from __future__ import annotations

import importlib
import pkgutil

import pytest

import omra

MODULES = sorted(m.name for m in pkgutil.walk_packages(omra.__path__, "omra."))


def test_engine_and_cli_import():
    engine = importlib.import_module("omra.engine")
    cli = importlib.import_module("omra.cli.main")
    assert callable(engine.decode_stream)
    assert callable(engine.encode_sequence)
    assert callable(cli.main)


@pytest.mark.parametrize("name", MODULES)
def test_exported_names_resolve(name):
    module = importlib.import_module(name)
    for attr in getattr(module, "__all__", ()):
        assert hasattr(module, attr), f"{name} exports missing {attr}"
