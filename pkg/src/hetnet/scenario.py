"""Scenario files: YAML documents validated against a fixed schema.

Layout (unknown keys anywhere are rejected)::

    market:      {alpha, r0, n_m, n_f}                    # required
    providers:   [{total_bw, small_floor, density}, ...]  # 1 or 2 entries
    investment:  {i_s, lambda0}
    new_band:    {b1_legacy, b2_legacy, b_new, density, split: [b1n, b2n] | sweep: steps}
    output:      {format: csv, path}
"""

from __future__ import annotations

from pathlib import Path
from typing import List, Literal, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .core import MarketParams, ProviderConfig


class ScenarioError(ValueError):
    """The scenario file is missing, malformed, or fails validation."""


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MarketSection(_Section):
    alpha: float = Field(gt=0, lt=1)
    r0: float = Field(gt=0)
    n_m: float = Field(gt=0)
    n_f: float = Field(gt=0)


class ProviderSection(_Section):
    total_bw: float = Field(gt=0)
    small_floor: float = Field(default=0.0, ge=0)
    density: float = Field(default=0.0, ge=0)

    @model_validator(mode="after")
    def _floor_fits(self):
        if self.small_floor > self.total_bw:
            raise ValueError("small_floor must not exceed total_bw")
        return self


class InvestmentSection(_Section):
    i_s: float = Field(default=0.0, ge=0)
    lambda0: Optional[float] = Field(default=None, gt=1)


class NewBandSection(_Section):
    b1_legacy: float = Field(gt=0)
    b2_legacy: float = Field(gt=0)
    b_new: float = Field(ge=0)
    density: float = Field(gt=1)
    split: Optional[Tuple[float, float]] = None
    sweep: Optional[int] = Field(default=None, ge=2)

    @model_validator(mode="after")
    def _split_or_sweep(self):
        if self.split is not None and self.sweep is not None:
            raise ValueError("give either split or sweep, not both")
        if self.split is not None:
            if min(self.split) < 0:
                raise ValueError("split entries must be non-negative")
            if abs(sum(self.split) - self.b_new) > 1e-12 * max(self.b_new, 1.0):
                raise ValueError("split must sum to b_new")
        return self


class OutputSection(_Section):
    format: Literal["csv"] = "csv"
    path: Optional[str] = None


class ScenarioFile(_Section):
    market: MarketSection
    providers: List[ProviderSection] = Field(default_factory=list, max_length=2)
    investment: Optional[InvestmentSection] = None
    new_band: Optional[NewBandSection] = None
    output: OutputSection = Field(default_factory=OutputSection)

    def market_params(self) -> MarketParams:
        m = self.market
        try:
            return MarketParams(m.alpha, m.r0, m.n_m, m.n_f)
        except ValueError as exc:
            raise ScenarioError(f"market: {exc}") from None

    def provider_configs(self, count: int) -> List[ProviderConfig]:
        if len(self.providers) < count:
            raise ScenarioError(f"providers: this command needs {count} provider(s), got {len(self.providers)}")
        return [ProviderConfig(p.total_bw, p.small_floor, p.density) for p in self.providers[:count]]

    def require_investment(self) -> InvestmentSection:
        if self.investment is None:
            raise ScenarioError("investment: section is required for this command")
        return self.investment

    def require_new_band(self) -> NewBandSection:
        if self.new_band is None:
            raise ScenarioError("new_band: section is required for this command")
        return self.new_band


def _format_errors(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(part) for part in err["loc"]) or "<root>"
        lines.append(f"{loc}: {err['msg']}")
    return "; ".join(lines)


def parse_scenario(data) -> ScenarioFile:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a mapping at the top level")
    try:
        return ScenarioFile.model_validate(data)
    except ValidationError as exc:
        raise ScenarioError(_format_errors(exc)) from None


def load_scenario(path) -> ScenarioFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{path}: invalid YAML: {exc}") from None
    return parse_scenario(data)
