"""Configuration for the bottleneck arena."""

from .loader import DEFAULT_CONFIG_PATH, Config, load_config

__all__ = ["load_config", "Config", "DEFAULT_CONFIG_PATH"]
