"""
Model files, conservation laws and bundled reference fixtures.
"""
from .fixtures import FixtureSet, load_fixtures, resolve_model
from .laws import ConservationLaw
from .model_file import ModelFile, load_model, parse_expression, parse_model

__all__ = [
    "ConservationLaw",
    "FixtureSet",
    "ModelFile",
    "load_fixtures",
    "load_model",
    "parse_expression",
    "parse_model",
    "resolve_model",
]
