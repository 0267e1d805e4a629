"""
情境、數值參數與偏差規格模型
"""
import hashlib
import json
import math
from typing import Annotated, Dict, Literal, Union
from pydantic import BaseModel, ConfigDict, Field, model_validator
from .physics_models import ControlBounds, Environment
from .spectrum_models import SpectrumModel
from ..physics.constants import (
    DEFAULT_DELTA_F_GHZ,
    DEFAULT_EPSILON,
    DEFAULT_F_CP_GHZ,
    DEFAULT_TAU_SW_US,
    DEFAULT_TEMPERATURE_K,
)


class Numerics(BaseModel):
    """數值參數"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    grid_points: int = Field(4001, ge=3)
    xtol_GHz: float = Field(1.0e-6, gt=0)
    step_bound: float = Field(0.05, gt=0)
    rate_cap: float = Field(1.0e6, gt=0)
    step_limit: int = Field(10_000_000, ge=1)
    time_limit_T1: float = Field(1.0e4, gt=0)
    drift_fraction: float = Field(0.25, gt=0, le=1.0)
    max_halvings: int = Field(30, ge=0)
    switch_decay: bool = False
    work_quadrature: Literal["exact", "trapezoid"] = "exact"
    seed: int = 0


class ResetProblem(BaseModel):
    """一次重置計算所需的全部不可變輸入"""

    model_config = ConfigDict(frozen=True)

    model: SpectrumModel
    env: Environment
    bounds: ControlBounds
    numerics: Numerics = Field(default_factory=Numerics)

    @property
    def drift_tolerance(self) -> float:
        """每步允許的控制頻率漂移，GHz"""
        return self.numerics.drift_fraction * self.bounds.grid_resolution(self.numerics.grid_points)


class Scenario(BaseModel):
    """使用者設定的情境（平面 JSON，numerics 為巢狀物件）"""

    model_config = ConfigDict(extra="forbid")

    name: str = "scenario"
    spectrum: str = "lz"
    spectrum_overrides: Dict[str, float] = Field(default_factory=dict)
    temperature_K: float = Field(DEFAULT_TEMPERATURE_K, gt=0)
    f_cp_GHz: float = Field(DEFAULT_F_CP_GHZ, gt=0)
    delta_f_GHz: float = Field(DEFAULT_DELTA_F_GHZ, gt=0)
    tau_sw_us: float = Field(DEFAULT_TAU_SW_US, ge=0)
    epsilon: float = Field(DEFAULT_EPSILON, gt=0, lt=0.5)
    control: str = "time_local"
    numerics: Numerics = Field(default_factory=Numerics)

    @model_validator(mode="after")
    def _check_names(self) -> "Scenario":
        if not (self.spectrum in ("lz", "prot", "mix", "jqf") or self.spectrum.startswith("tabulated:")):
            raise ValueError(f"未知的頻譜：{self.spectrum}")
        if not (self.control in ("time_local", "constant") or self.control.startswith("schedule:")):
            raise ValueError(f"未知的控制律：{self.control}")
        return self

    def environment(self) -> Environment:
        return Environment(temperature=self.temperature_K)

    def bounds(self) -> ControlBounds:
        return ControlBounds(
            f_cp=self.f_cp_GHz,
            delta_f=self.delta_f_GHz,
            tau_sw=self.tau_sw_us,
            epsilon=self.epsilon,
        )

    def canonical_json(self) -> str:
        """排序鍵的 JSON，用於內容雜湊"""
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def content_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()[:12]


class PopulationDeviation(BaseModel):
    """初始布居偏差 ρ(0) = diag(p, 1-p)"""

    kind: Literal["population"] = "population"
    p: float = Field(..., ge=0.0, le=1.0)


class CoherenceDeviation(BaseModel):
    """初始相干偏差 ρ(0) = [[1/2, c], [c*, 1/2]]"""

    kind: Literal["coherence"] = "coherence"
    c_abs: float = Field(..., ge=0.0, le=0.5)
    c_phase: float = 0.0

    @property
    def p_r(self) -> float:
        return self.c_abs * math.cos(self.c_phase)

    @property
    def p_i(self) -> float:
        return self.c_abs * math.sin(self.c_phase)


class ControlTimeDeviation(BaseModel):
    """控制時間偏差 t_f = τ_st + δτ"""

    kind: Literal["control_time"] = "control_time"
    delta_tau: float


DeviationSpec = Annotated[
    Union[PopulationDeviation, CoherenceDeviation, ControlTimeDeviation],
    Field(discriminator="kind"),
]
