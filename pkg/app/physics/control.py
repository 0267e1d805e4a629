"""
控制律：時間局部最佳控制、峰值常數控制、固定排程，以及協態重建與最小原理檢驗
"""
import bisect
import math
from abc import ABC, abstractmethod
from typing import Annotated, Literal, Optional, Tuple, Union
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from .dynamics import cumulative_rate_integral
from .spectra import argmax_rate, eval_rate
from .thermo import equilibrium_population, thermal_ratio
from ..exceptions import DegenerateTransversalityError, NoDescentError
from ..models.result_models import CostateTrajectory, PMPReport, Trajectory
from ..models.scenario_models import ResetProblem
from ..utils.optimize import grid_golden_maximize

MINIMALITY_TOLERANCE = 1.0e-6
HAMILTONIAN_TOLERANCE = 1.0e-3
PMP_CHECK_TIMES = 64
PMP_ALTERNATIVES = 33


class ControlPolicy(ABC):
    """綁定到特定問題的控制律"""

    #: 是否依目前狀態選擇頻率（狀態回饋）
    feedback: bool = False

    @abstractmethod
    def frequency(self, t: float, p_e: float) -> float:
        """時刻 t、布居 p_e 下的控制頻率（GHz）"""

    def next_change(self, t: float) -> float:
        """t 之後下一個排程斷點；無則為 inf"""
        return math.inf


def optimal_frequency(
    p_e: float,
    problem: ResetProblem,
    grid_points: Optional[int] = None,
    xtol: Optional[float] = None,
) -> float:
    """ω*(p_e) = argmax Γ(f)(p_e - p_eq(f))，搜尋限制在 [f_min, f_max]"""
    if not 0.0 <= p_e <= 1.0:
        raise ValueError(f"p_e 必須介於 0 與 1 之間，目前為 {p_e}")
    model, env, bounds, numerics = problem.model, problem.env, problem.bounds, problem.numerics

    def objective(f):
        return eval_rate(model, f, numerics.rate_cap) * (p_e - equilibrium_population(thermal_ratio(f, env)))

    f_star, j_star = grid_golden_maximize(
        objective,
        bounds.f_min,
        bounds.f_max,
        grid_points or numerics.grid_points,
        xtol or numerics.xtol_GHz,
    )
    if j_star <= 0.0:
        raise NoDescentError(f"p_e = {p_e:.6g} 在所有容許頻率下都無法下降")
    return f_star


def constant_restore_frequency(problem: ResetProblem) -> float:
    """低溫極限下的常數恢復頻率 argmax Γ"""
    numerics = problem.numerics
    return argmax_rate(problem.model, problem.bounds, numerics.grid_points, numerics.rate_cap, numerics.xtol_GHz).f


class _FeedbackPolicy(ControlPolicy):
    feedback = True

    def __init__(self, problem: ResetProblem, grid_points: Optional[int], xtol: Optional[float]):
        self.problem = problem
        self.grid_points = grid_points
        self.xtol = xtol

    def frequency(self, t: float, p_e: float) -> float:
        return optimal_frequency(p_e, self.problem, self.grid_points, self.xtol)


class _ConstantPolicy(ControlPolicy):
    def __init__(self, f: float):
        self.f = f

    def frequency(self, t: float, p_e: float) -> float:
        return self.f


class _SchedulePolicy(ControlPolicy):
    def __init__(self, times: Tuple[float, ...], freqs: Tuple[float, ...]):
        self.times = times
        self.freqs = freqs

    def frequency(self, t: float, p_e: float) -> float:
        k = bisect.bisect_right(self.times, t) - 1
        return self.freqs[max(k, 0)]

    def next_change(self, t: float) -> float:
        k = bisect.bisect_right(self.times, t)
        return self.times[k] if k < len(self.times) else math.inf


class TimeLocalOptimal(BaseModel):
    """時間局部最佳控制：每步以目前 p_e 重新求 ω*(p_e)"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["time_local"] = "time_local"
    grid_points: Optional[int] = Field(None, ge=3)
    xtol: Optional[float] = Field(None, gt=0)

    def bind(self, problem: ResetProblem) -> ControlPolicy:
        return _FeedbackPolicy(problem, self.grid_points, self.xtol)

    def label(self) -> str:
        return "time_local"


class ConstantAtPeak(BaseModel):
    """常數控制於 argmax Γ"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["constant"] = "constant"

    def bind(self, problem: ResetProblem) -> ControlPolicy:
        return _ConstantPolicy(constant_restore_frequency(problem))

    def label(self) -> str:
        return "constant"


class FixedSchedule(BaseModel):
    """分段常數排程 (t_us, f_GHz)；第一個斷點之前沿用第一個頻率"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["schedule"] = "schedule"
    breakpoints: Tuple[Tuple[float, float], ...] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_breakpoints(self) -> "FixedSchedule":
        times = [b[0] for b in self.breakpoints]
        if times[0] < 0:
            raise ValueError("排程時間不可為負")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("排程時間必須嚴格遞增")
        return self

    def bind(self, problem: ResetProblem) -> ControlPolicy:
        bounds = problem.bounds
        for t, f in self.breakpoints:
            if not bounds.f_min <= f <= bounds.f_max:
                raise ValueError(f"排程頻率 {f} GHz（t = {t} µs）超出 [{bounds.f_min}, {bounds.f_max}]")
        times = tuple(b[0] for b in self.breakpoints)
        freqs = tuple(b[1] for b in self.breakpoints)
        return _SchedulePolicy(times, freqs)

    def label(self) -> str:
        return "schedule"

    @classmethod
    def from_trajectory(cls, trajectory: Trajectory) -> "FixedSchedule":
        """將軌跡的控制序列轉為排程（相鄰相同頻率合併）"""
        points = []
        for t, f in zip(trajectory.t, trajectory.f):
            if not points or f != points[-1][1]:
                points.append((t, f))
        return cls(breakpoints=tuple(points))


ControlLaw = Annotated[Union[TimeLocalOptimal, ConstantAtPeak, FixedSchedule], Field(discriminator="kind")]


def costate_along(trajectory: Trajectory, problem: ResetProblem) -> CostateTrajectory:
    """由橫截條件求 λ(τ_st)，再沿軌跡向後重建 λ(t) 與 𝓗(t)"""
    if not trajectory.reached_precision:
        raise ValueError(f"軌跡未達到精度（{trajectory.termination.value}），無法套用橫截條件")
    arr = trajectory.arrays()
    rate, p_e, p_eq = arr["rate"], arr["p_e"], arr["p_eq"]

    denominator = rate[-1] * (p_e[-1] - p_eq[-1])
    if not math.isfinite(denominator) or denominator <= 0.0:
        raise DegenerateTransversalityError(f"終端 Γ(p_e - p_eq) = {denominator:.6g}，無法求 λ(τ_st)")

    integral = cumulative_rate_integral(trajectory)
    lam = np.exp(-(integral[-1] - integral)) / denominator
    hamiltonian = 1.0 - lam * rate * (p_e - p_eq)
    hamiltonian[-1] = 0.0
    return CostateTrajectory(t=list(arr["t"]), lam=lam.tolist(), hamiltonian=hamiltonian.tolist())


def verify_pmp(
    trajectory: Trajectory,
    costate: CostateTrajectory,
    problem: ResetProblem,
    check_times: int = PMP_CHECK_TIMES,
    alternatives: int = PMP_ALTERNATIVES,
    minimality_tolerance: float = MINIMALITY_TOLERANCE,
    hamiltonian_tolerance: float = HAMILTONIAN_TOLERANCE,
) -> PMPReport:
    """檢驗 λ > 0、𝓗 ≈ 0 與 𝓗 在所選頻率的逐點最小性"""
    if len(costate.t) != len(trajectory):
        raise ValueError("軌跡與協態的樣本數不一致")
    model, env, bounds, numerics = problem.model, problem.env, problem.bounds, problem.numerics
    lam = np.asarray(costate.lam)
    hamiltonian = np.asarray(costate.hamiltonian)
    p_e = np.asarray(trajectory.p_e)

    alt_f = np.linspace(bounds.f_min, bounds.f_max, alternatives)
    alt_rate = eval_rate(model, alt_f, numerics.rate_cap)
    alt_peq = equilibrium_population(thermal_ratio(alt_f, env))

    rng = np.random.default_rng(numerics.seed)
    n = len(trajectory)
    checked = np.sort(rng.choice(n, size=min(check_times, n), replace=False))

    violations = 0
    worst = 0.0
    for k in checked:
        h_alt = 1.0 - lam[k] * alt_rate * (p_e[k] - alt_peq)
        gap = float(hamiltonian[k] - h_alt.min())
        worst = max(worst, gap)
        if gap > minimality_tolerance:
            violations += 1

    max_abs_h = float(np.max(np.abs(hamiltonian)))
    min_lam = float(lam.min())
    return PMPReport(
        max_abs_hamiltonian=max_abs_h,
        min_lambda=min_lam,
        lambda_positive=min_lam > 0.0,
        hamiltonian_ok=max_abs_h < hamiltonian_tolerance,
        pointwise_minimal=violations == 0,
        checked_times=len(checked),
        violations=violations,
        worst_violation=worst,
        hamiltonian_tolerance=hamiltonian_tolerance,
        minimality_tolerance=minimality_tolerance,
    )
