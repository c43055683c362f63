"""Lower bounds for the volume entropy of NPC graph manifolds."""

import json

from ._core import (
    Manifold,
    ParseError,
    ValidationError,
    delta_correction,
    distance_for_visual_angle,
    pants_sweep,
    run_cli,
    series,
    visual_angle,
)
from ._core import entropy_bound as _entropy_bound
from ._core import validate_text as _validate_text

__all__ = [
    "Manifold",
    "ParseError",
    "ValidationError",
    "delta_correction",
    "distance_for_visual_angle",
    "entropy_bound",
    "pants_sweep",
    "run_cli",
    "series",
    "validate",
    "visual_angle",
]


def validate(path):
    """Validation report of a manifold file as a dict."""
    with open(path, encoding="utf-8") as f:
        return _validate_text(f.read())


def entropy_bound(manifold, **options):
    """Entropy report as a dict (same schema as the CLI JSON)."""
    return json.loads(_entropy_bound(manifold, **options))
