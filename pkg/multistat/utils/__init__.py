"""
Configuration utilities.
"""
from .config import MultistatConfig, load_config

__all__ = ["MultistatConfig", "load_config"]
