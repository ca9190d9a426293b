"""Bundled example fans, shipped as JSON fan files."""
from __future__ import annotations

import importlib.resources

NAMES = ("c3", "conifold", "kp2", "c3z3", "c3_bar", "kp2_bar", "c3z3_bar")


def read(name: str) -> str:
    """Contents of a bundled fan file by short name."""
    if name not in NAMES:
        raise KeyError(f"no bundled fan named {name!r}; have {NAMES}")
    return importlib.resources.files(__package__).joinpath(
        f"{name}.json").read_text()


def load(name: str):
    from ..fan import parse_stacky_fan
    return parse_stacky_fan(read(name))
