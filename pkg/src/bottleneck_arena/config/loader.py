"""Configuration loader: YAML/JSON file plus environment override of search caps."""

import json
import logging
from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..errors import ConfigError
from ..models.reports import Schedule

logger = logging.getLogger(__name__)

# src/bottleneck_arena/config/loader.py -> project root
PROJECT_ROOT = Path(__file__).resolve().parents[3]
DEFAULT_CONFIG_PATH = PROJECT_ROOT / "config" / "config.yaml"


class Budgets(BaseModel):
    """Caps that turn exponential searches into explicit errors."""

    path_cap: int = Field(default=10**6, ge=1)
    search_node_cap: int = Field(default=10**7, ge=1)
    profile_cap: int = Field(default=10**7, ge=1)
    support_subset_cap: int = Field(default=10**5, ge=1)


class DynamicsConfig(BaseModel):
    schedule: Schedule = Field(default=Schedule.ROUND_ROBIN)
    max_steps: int = Field(default=10**6, ge=1)
    seed: int = Field(default=0, ge=0)


class GeneratorConfig(BaseModel):
    """Slack added to path length limits of random families."""

    grid_slack: int = Field(default=4, ge=0)
    random_slack: int = Field(default=2, ge=0)
    max_draws: int = Field(default=100, ge=1)


class OutputConfig(BaseModel):
    float_digits: int = Field(default=6, ge=1, le=17)


class Config(BaseModel):
    """Full workbench configuration."""

    budgets: Budgets = Field(default_factory=Budgets)
    dynamics: DynamicsConfig = Field(default_factory=DynamicsConfig)
    generators: GeneratorConfig = Field(default_factory=GeneratorConfig)
    workers: int = Field(default=1, ge=1)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Config":
        try:
            return cls(**data)
        except ValidationError as exc:
            raise ConfigError("invalid configuration", errors=exc.errors(include_url=False)) from exc

    def with_budget(self, budget: int) -> "Config":
        """Every cap in `budgets` replaced by one value."""
        caps = Budgets(path_cap=budget, search_node_cap=budget, profile_cap=budget, support_subset_cap=budget)
        return self.model_copy(update={"budgets": caps})


class BudgetOverride(BaseSettings):
    """BOTTLENECK_ARENA_BUDGET replaces every search cap when set."""

    model_config = SettingsConfigDict(env_prefix="BOTTLENECK_ARENA_")

    budget: Optional[int] = Field(default=None, ge=1)


def _apply_environment(config: Config) -> Config:
    try:
        override = BudgetOverride()
    except ValidationError as exc:
        raise ConfigError(
            "BOTTLENECK_ARENA_BUDGET must be a positive integer",
            errors=exc.errors(include_url=False),
        ) from exc
    if override.budget is None:
        return config
    logger.info("Search caps overridden from environment: %d", override.budget)
    return config.with_budget(override.budget)


def load_config(path: Optional[str | Path] = None) -> Config:
    """
    Load configuration from file (YAML or JSON).

    An explicit path must exist (FileNotFoundError otherwise); without one the
    default file is used when present, else built-in defaults.
    """
    if path is None:
        path = DEFAULT_CONFIG_PATH
        if not path.exists():
            logger.debug("No %s, using built-in defaults", path)
            return _apply_environment(Config())
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")

    with open(path, encoding="utf-8") as f:
        content = f.read()

    try:
        if path.suffix in (".yaml", ".yml"):
            data = yaml.safe_load(content) or {}
        else:
            data = json.loads(content)
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a mapping")

    return _apply_environment(Config.from_dict(data))
