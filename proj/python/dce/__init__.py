"""Python access to the dynamical Casimir effect simulator.

Configs are plain dicts with the same layout as the CLI's JSON config files.
"""

import json

from . import _core
from ._core import (
    DegeneracyError,
    Error,
    IntegrationError,
    LabelError,
    SingularityError,
    ValidationError,
    perturbation,
)

__all__ = [
    "presets",
    "preset",
    "normalize",
    "run",
    "run_to",
    "read_csv",
    "perturbation",
    "Error",
    "ValidationError",
    "LabelError",
    "SingularityError",
    "DegeneracyError",
    "IntegrationError",
]


def presets():
    return list(_core.preset_ids())


def preset(preset_id):
    return json.loads(_core.preset_config(preset_id))


def normalize(config, overrides=()):
    """Validate a config dict and fill in defaults."""
    return json.loads(_core.normalize_config(json.dumps(config), list(overrides)))


def run(config, overrides=()):
    """Run a config in memory. Returns {"config", "files", "log"}; files maps names to text."""
    if isinstance(config, str):
        config = preset(config)
    r = _core.execute(json.dumps(config), list(overrides))
    r["config"] = json.loads(r["config"])
    return r


def run_to(config, out, overrides=()):
    """Run a config and write its CSV and JSON outputs to directory `out`."""
    if isinstance(config, str):
        config = preset(config)
    return _core.execute_to(json.dumps(config), str(out), list(overrides))


def read_csv(text):
    """Parse CSV output into {column: list of float or None}."""
    lines = text.strip().splitlines()
    head = lines[0].split(",")
    cols = {h: [] for h in head}
    for line in lines[1:]:
        for h, cell in zip(head, line.split(",")):
            try:
                cols[h].append(float(cell) if cell else None)
            except ValueError:
                cols[h].append(cell)
    return cols
