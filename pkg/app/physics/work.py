"""
熱力學功帳：切換功、恢復功、自由能變化與額外功

所有能量以 k_B·T 為單位（無因次），ħω 項以 thermal_ratio 累積。
"""
import math
from typing import Literal
import numpy as np
from scipy.integrate import trapezoid
from .constants import LN2, THERMODYNAMIC_LENGTH_CONSTANT
from .spectra import eval_rate
from .thermo import entropy, equilibrium_population, thermal_ratio
from ..exceptions import AchievabilityError, PhysicsDomainError
from ..models.physics_models import ControlBounds, Environment
from ..models.result_models import Trajectory, WorkLedger
from ..models.spectrum_models import SpectrumModel

MAX_ENTROPY_POPULATION = 0.5


def work_integral(trajectory: Trajectory, env: Environment, method: Literal["exact", "trapezoid"] = "exact") -> float:
    """∫ ħω Γ (p_e - p_eq) dt / (k_B T)

    exact：每段常數控制下積分等於 x_k (p_k - p_{k+1})。
    trapezoid：對樣本點做梯形積分。
    """
    arr = trajectory.arrays()
    x = thermal_ratio(arr["f"], env)
    if method == "exact":
        return float(np.sum(x[:-1] * (arr["p_e"][:-1] - arr["p_e"][1:])))
    if method == "trapezoid":
        integrand = x * arr["rate"] * (arr["p_e"] - arr["p_eq"])
        return float(trapezoid(integrand, arr["t"]))
    raise ValueError(f"未知的積分方法：{method}")


def work_ledger(
    trajectory: Trajectory,
    bounds: ControlBounds,
    env: Environment,
    method: Literal["exact", "trapezoid"] = "exact",
) -> WorkLedger:
    """切換–恢復–切換的完整功帳"""
    if not trajectory.reached_precision:
        raise ValueError(f"軌跡未達到精度（{trajectory.termination.value}）")
    x_cp = thermal_ratio(bounds.f_cp, env)
    x_0 = thermal_ratio(trajectory.f[0], env)
    x_tau = thermal_ratio(trajectory.f[-1], env)
    p_0, p_tau = trajectory.p_e[0], trajectory.p_e[-1]
    integral = work_integral(trajectory, env, method)

    w_sw1 = (x_0 - x_cp) * (p_0 - MAX_ENTROPY_POPULATION)
    w_st = x_tau * (p_tau - MAX_ENTROPY_POPULATION) - x_0 * (p_0 - MAX_ENTROPY_POPULATION) + integral
    w_sw2 = (x_cp - x_tau) * (p_tau - MAX_ENTROPY_POPULATION)
    w = w_sw1 + w_st + w_sw2

    d_u = x_cp * (p_tau - p_0)
    d_s = entropy(p_0) - entropy(p_tau)
    d_f = d_u - d_s
    return WorkLedger(
        W_sw1=w_sw1,
        W_st=w_st,
        W_sw2=w_sw2,
        W=w,
        dU=d_u,
        dS=d_s,
        dF=d_f,
        W_ex=w - d_f,
        work_integral=integral,
    )


def constant_control_work_approx(f_st: float, env: Environment) -> float:
    """常數控制下的額外功近似 0.5·ħω_st/(k_B T) - ln 2"""
    if f_st <= 0:
        raise PhysicsDomainError("f_st 必須為正")
    return 0.5 * thermal_ratio(f_st, env) - LN2


def thermodynamic_length_bound(t_reset_over_t1: float) -> float:
    """常數速率環境的熱力學長度下限 1.4204/(T_reset/T₁)，單位 k_B T"""
    if not t_reset_over_t1 > 0:
        raise PhysicsDomainError("T_reset/T₁ 必須為正")
    return THERMODYNAMIC_LENGTH_CONSTANT / t_reset_over_t1


def epsilon_min(bounds: ControlBounds, env: Environment) -> float:
    """可達精度下限 p_eq(f_max)"""
    return equilibrium_population(thermal_ratio(bounds.f_max, env))


def check_achievability(bounds: ControlBounds, env: Environment) -> float:
    """檢查 ε > ε^min，回傳 ε^min"""
    eps_min = epsilon_min(bounds, env)
    if bounds.epsilon <= eps_min:
        raise AchievabilityError(bounds.epsilon, eps_min)
    return eps_min


def passive_reset_time(model: SpectrumModel, bounds: ControlBounds, env: Environment, rate_cap: float) -> float:
    """停留在 f_cp 被動弛豫到 ε 所需時間（µs）；無法到達時為 inf"""
    rate = eval_rate(model, bounds.f_cp, rate_cap)
    p_eq = equilibrium_population(thermal_ratio(bounds.f_cp, env))
    if rate <= 0.0 or bounds.epsilon <= p_eq:
        return math.inf
    return math.log((MAX_ENTROPY_POPULATION - p_eq) / (bounds.epsilon - p_eq)) / rate
