"""
物理狀態與邊界模型
"""
from pydantic import BaseModel, ConfigDict, Field, model_validator
from ..physics.constants import (
    DEFAULT_DELTA_F_GHZ,
    DEFAULT_EPSILON,
    DEFAULT_F_CP_GHZ,
    DEFAULT_TAU_SW_US,
    H_OVER_KB_K_PER_GHZ,
)

POSITIVITY_TOLERANCE = 1.0e-12


class Environment(BaseModel):
    """熱環境（溫度與導出量）"""

    model_config = ConfigDict(frozen=True)

    temperature: float = Field(..., gt=0, description="溫度，單位 K")

    @property
    def ratio_per_GHz(self) -> float:
        """每 GHz 的 ħω/(k_B T)"""
        return H_OVER_KB_K_PER_GHZ / self.temperature


class ControlBounds(BaseModel):
    """頻率控制範圍、切換時間與重置精度"""

    model_config = ConfigDict(frozen=True)

    f_cp: float = Field(DEFAULT_F_CP_GHZ, gt=0, description="計算頻率，GHz")
    delta_f: float = Field(DEFAULT_DELTA_F_GHZ, gt=0, description="可調範圍半寬，GHz")
    tau_sw: float = Field(DEFAULT_TAU_SW_US, ge=0, description="切換時間，µs")
    epsilon: float = Field(DEFAULT_EPSILON, gt=0, lt=0.5, description="重置精度")

    @model_validator(mode="after")
    def _check_interval(self) -> "ControlBounds":
        if self.f_min <= 0:
            raise ValueError(f"f_min = f_cp - delta_f 必須大於 0，目前為 {self.f_min}")
        return self

    @property
    def f_min(self) -> float:
        return self.f_cp - self.delta_f

    @property
    def f_max(self) -> float:
        return self.f_cp + self.delta_f

    def grid_resolution(self, grid_points: int) -> float:
        """掃描網格間距"""
        return (self.f_max - self.f_min) / (grid_points - 1)


class QubitState(BaseModel):
    """二能階密度矩陣 (p_e, p_r, p_i)"""

    model_config = ConfigDict(frozen=True)

    p_e: float = Field(..., ge=0.0, le=1.0)
    p_r: float = 0.0
    p_i: float = 0.0

    @model_validator(mode="after")
    def _check_positivity(self) -> "QubitState":
        if self.coherence_sq > self.p_e * (1.0 - self.p_e) + POSITIVITY_TOLERANCE:
            raise ValueError("密度矩陣不滿足正定性：|ρ_eg|² > p_e(1-p_e)")
        return self

    @property
    def coherence_sq(self) -> float:
        return self.p_r * self.p_r + self.p_i * self.p_i

    @property
    def coherence_abs(self) -> float:
        return self.coherence_sq ** 0.5

    @property
    def determinant(self) -> float:
        """det ρ = p_e(1-p_e) - |ρ_eg|²"""
        return self.p_e * (1.0 - self.p_e) - self.coherence_sq
