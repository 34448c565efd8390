"""Pipeline configuration, loaded from JSON or YAML. Unknown keys are rejected."""
from __future__ import annotations

import datetime as dt
import hashlib
import json
from pathlib import Path
from typing import List, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .cohort import ExclusionPolicy, ThresholdSpec
from .corpus import ObservationWindow
from .normalization import PositionWeights, WeightScheme

REPORT_FAMILIES = ("scores", "universities", "cohorts", "gaps", "university_report")
ReportFamily = Literal["scores", "universities", "cohorts", "gaps", "university_report"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class WindowConfig(_Strict):
    first_year: int = Field(2009, ge=1900, le=2200)
    last_year: int = Field(2013, ge=1900, le=2200)
    census_date: Optional[dt.date] = None

    @model_validator(mode="after")
    def _ordered(self):
        if self.first_year > self.last_year:
            raise ValueError("first_year must not exceed last_year")
        return self

    def to_window(self) -> ObservationWindow:
        return ObservationWindow(self.first_year, self.last_year, self.census_date)


class TripleConfig(_Strict):
    first: float = Field(ge=0, le=1)
    last: float = Field(ge=0, le=1)
    middle_pool: float = Field(ge=0, le=1)

    @model_validator(mode="after")
    def _sums_to_one(self):
        PositionWeights(self.first, self.last, self.middle_pool)
        return self


class WeightsConfig(_Strict):
    intramural: TripleConfig = TripleConfig(first=0.40, last=0.30, middle_pool=0.30)
    extramural: TripleConfig = TripleConfig(first=0.30, last=0.20, middle_pool=0.50)

    def to_scheme(self) -> WeightScheme:
        return WeightScheme(PositionWeights(**self.intramural.model_dump()),
                            PositionWeights(**self.extramural.model_dump()))


class ExclusionConfig(_Strict):
    min_obs_per_region_sds: int = Field(3, ge=1)
    min_universities_per_region_sds: int = Field(3, ge=1)
    min_staff_per_university_sds: int = Field(3, ge=1)
    min_professors_per_university_uda: int = Field(5, ge=1)
    min_professors_per_sds_university_overall: int = Field(10, ge=1)

    def to_policy(self) -> ExclusionPolicy:
        return ExclusionPolicy(**self.model_dump())


class ThresholdConfig(_Strict):
    bottom: List[float] = Field(default_factory=lambda: [10.0, 20.0])
    top: List[float] = Field(default_factory=lambda: [20.0, 10.0])
    top_cut: Optional[float] = Field(None, ge=0, le=100)

    @model_validator(mode="after")
    def _in_range(self):
        for k in [*self.bottom, *self.top]:
            if not 0 < k < 100:
                raise ValueError(f"percentile cut {k} outside (0, 100)")
        return self

    def to_spec(self) -> ThresholdSpec:
        return ThresholdSpec(tuple(self.bottom), tuple(self.top), self.top_cut)


class PipelineConfig(_Strict):
    window: WindowConfig = WindowConfig()
    weights: WeightsConfig = WeightsConfig()
    exclusions: ExclusionConfig = ExclusionConfig()
    thresholds: ThresholdConfig = ThresholdConfig()
    reports: List[ReportFamily] = Field(default_factory=lambda: list(REPORT_FAMILIES))
    output_dir: Optional[str] = None
    seed: int = 0
    workers: int = Field(1, ge=1)

    def digest(self) -> str:
        """Hash of everything that can change report content.

        ``output_dir`` and ``workers`` are left out: neither may change a byte
        of the bundle.
        """
        payload = self.model_dump(mode="json", exclude={"output_dir", "workers"})
        payload["reports"] = sorted(set(payload["reports"]))
        text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def load_config(path) -> PipelineConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() in (".yaml", ".yml"):
        data = yaml.safe_load(text) or {}
    else:
        data = json.loads(text) if text.strip() else {}
    return PipelineConfig.model_validate(data)
