"""
計算結果模型：軌跡、協態、功帳、報告
"""
from enum import Enum
from typing import Dict, List, Optional
import numpy as np
from pydantic import BaseModel, Field
from .physics_models import QubitState

TRAJECTORY_COLUMNS = ["t_us", "f_GHz", "p_e", "p_r", "p_i", "rate_per_us", "p_eq"]


class RateMaximum(BaseModel):
    """Γ 在控制區間上的最大值"""

    f: float
    rate: float
    capped: bool = False


class GuidelineReport(BaseModel):
    """頻譜設計準則報告"""

    spectrum: str
    f_cp: float
    f_st: float
    rate_cp: float
    rate_st: float
    contrast: Optional[float] = None
    trend_slope: float
    trend_sign: int
    increasing_trend: bool
    cap_hit: bool = False
    unit_note: Optional[str] = None


class TerminationCause(str, Enum):
    """積分終止原因"""

    PRECISION_REACHED = "precision_reached"
    STEP_LIMIT = "step_limit"
    TIME_LIMIT = "time_limit"


class Trajectory(BaseModel):
    """恢復過程軌跡

    第 k 個樣本的 f、rate、p_eq 為區段 [t_k, t_{k+1}) 所用的控制；
    最後一個樣本保存終端時刻的控制。
    """

    t: List[float] = Field(default_factory=list)
    f: List[float] = Field(default_factory=list)
    p_e: List[float] = Field(default_factory=list)
    p_r: List[float] = Field(default_factory=list)
    p_i: List[float] = Field(default_factory=list)
    rate: List[float] = Field(default_factory=list)
    p_eq: List[float] = Field(default_factory=list)
    tau_st: float = 0.0
    termination: TerminationCause = TerminationCause.PRECISION_REACHED
    steps: int = 0

    def append(self, t: float, f: float, p_e: float, p_r: float, p_i: float, rate: float, p_eq: float):
        """新增一個樣本"""
        self.t.append(t)
        self.f.append(f)
        self.p_e.append(p_e)
        self.p_r.append(p_r)
        self.p_i.append(p_i)
        self.rate.append(rate)
        self.p_eq.append(p_eq)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def reached_precision(self) -> bool:
        return self.termination == TerminationCause.PRECISION_REACHED

    @property
    def initial_state(self) -> QubitState:
        return QubitState(p_e=self.p_e[0], p_r=self.p_r[0], p_i=self.p_i[0])

    @property
    def final_state(self) -> QubitState:
        return QubitState(p_e=self.p_e[-1], p_r=self.p_r[-1], p_i=self.p_i[-1])

    def arrays(self) -> Dict[str, np.ndarray]:
        """各欄位轉為 numpy 陣列"""
        return {
            name: np.asarray(getattr(self, name), dtype=float)
            for name in ("t", "f", "p_e", "p_r", "p_i", "rate", "p_eq")
        }

    def rows(self) -> List[List[float]]:
        """CSV 資料列（欄位見 TRAJECTORY_COLUMNS）"""
        return [list(r) for r in zip(self.t, self.f, self.p_e, self.p_r, self.p_i, self.rate, self.p_eq)]


class CostateTrajectory(BaseModel):
    """協態 λ(t) 與控制哈密頓量 𝓗(t)"""

    t: List[float]
    lam: List[float]
    hamiltonian: List[float]


class PMPReport(BaseModel):
    """Pontryagin 最小原理檢驗報告"""

    max_abs_hamiltonian: float
    min_lambda: float
    lambda_positive: bool
    hamiltonian_ok: bool
    pointwise_minimal: bool
    checked_times: int
    violations: int
    worst_violation: float
    hamiltonian_tolerance: float
    minimality_tolerance: float

    @property
    def passed(self) -> bool:
        return self.lambda_positive and self.hamiltonian_ok and self.pointwise_minimal


class WorkLedger(BaseModel):
    """功帳（單位 k_B T；dS 單位 k_B）"""

    W_sw1: float
    W_st: float
    W_sw2: float
    W: float
    dU: float
    dS: float
    dF: float
    W_ex: float
    work_integral: float


class ResetReport(BaseModel):
    """切換–恢復–切換重置報告"""

    scenario: str = ""
    spectrum: str = ""
    temperature_K: float = 0.0
    control: str = ""
    termination: TerminationCause = TerminationCause.PRECISION_REACHED
    tau_st: float
    T1: Optional[float] = None
    T1_infinite: bool = False
    tau_st_over_T1: float
    T_reset: float
    W_sw1: float
    W_st: float
    W_sw2: float
    W: float
    dU: float
    dS: float
    dF: float
    W_ex: float
    W_ex_norm: float
    W_TL_norm: Optional[float] = None
    epsilon_min: float
    p_e_final: float = 0.0
    f_start_GHz: float = 0.0
    f_end_GHz: float = 0.0
    W_ex_approx_norm: float = 0.0
    below_tl_bound: Optional[bool] = None
    passive_reset_us: Optional[float] = None
    speedup: Optional[float] = None

    def summary_line(self) -> str:
        """一行摘要"""
        return (
            f"{self.scenario}: tau_st_us={self.tau_st:.6g} "
            f"tau_st_over_T1={self.tau_st_over_T1:.6g} W_ex_norm={self.W_ex_norm:.6g}"
        )


class SensitivityEntry(BaseModel):
    """單一偏差通道的靈敏度比較"""

    finite_difference: float
    dynamics_prediction: float
    stated_prediction: float
    dynamics_relative_error: float
    stated_relative_error: float


class SensitivityReport(BaseModel):
    """三種偏差通道的靈敏度報告"""

    eta_tau: float
    population: SensitivityEntry
    coherence: SensitivityEntry
    control_time: SensitivityEntry
    coherence_discrepancy: bool


class FidelityPoint(BaseModel):
    """保真度曲線上的一點"""

    deviation_value: float
    fidelity: float
    final_p_e: float
    final_coh_abs: float


class FidelityCurve(BaseModel):
    """沿單一偏差軸的保真度曲線"""

    axis: str
    points: List[FidelityPoint] = Field(default_factory=list)

    @property
    def min_fidelity(self) -> float:
        return min(p.fidelity for p in self.points)


class CalibrationResult(BaseModel):
    """溫度校準結果

    best_temperature_K 只擬合 fit_spectra；computed 與 residuals 列出所有目標在該溫度的結果。
    joint_* 為全部目標一起擬合時在掃描格點上的最佳值。
    """

    best_temperature_K: float
    objective: float
    fit_spectra: List[str]
    targets: Dict[str, float]
    computed: Dict[str, float]
    residuals: Dict[str, float]
    joint_temperature_K: float
    joint_objective: float
    joint_residuals: Dict[str, float]


class ErrorResponse(BaseModel):
    """錯誤回應模型"""

    error_code: str
    message: str
    user_message: str
