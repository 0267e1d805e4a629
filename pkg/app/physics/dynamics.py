"""
量子位元動力學：分段常數控制下的精確指數步進

p_e 依 ṗ_e = -Γ(p_e - p_eq) 衰減，相干分量 (p_r, p_i) 以 Γ/2 衰減並以 ω 旋轉。
"""
import math
from typing import TYPE_CHECKING, Callable, Tuple, Union
import numpy as np
from .constants import ANGULAR_PER_GHZ
from .spectra import coherence_time, eval_rate
from .thermo import equilibrium_population, thermal_ratio
from ..models.physics_models import Environment, QubitState
from ..models.result_models import TerminationCause, Trajectory
from ..models.scenario_models import ResetProblem
from ..models.spectrum_models import SpectrumModel
from ..utils.logger import get_logger

if TYPE_CHECKING:
    from .control import ControlLaw

logger = get_logger(__name__)

Components = Tuple[float, float, float]

BISECTION_RTOL = 1.0e-12
BISECTION_MAX_ITER = 200


def advance(
    p_e: float, p_r: float, p_i: float, f: float, rate: float, p_eq: float, dt: float
) -> Components:
    """固定頻率 f 下前進 dt 的解析解"""
    decay = math.exp(-rate * dt)
    amplitude = math.exp(-0.5 * rate * dt)
    theta = ANGULAR_PER_GHZ * f * dt
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    return (
        p_eq + (p_e - p_eq) * decay,
        amplitude * (p_r * cos_t + p_i * sin_t),
        amplitude * (p_i * cos_t - p_r * sin_t),
    )


def control_point(f: float, model: SpectrumModel, env: Environment, rate_cap: float) -> Tuple[float, float]:
    """回傳 (Γ(f), p_eq(f))"""
    return eval_rate(model, f, rate_cap), equilibrium_population(thermal_ratio(f, env))


def step_constant(
    state: QubitState,
    f: float,
    dt: float,
    model: SpectrumModel,
    env: Environment,
    rate_cap: float = 1.0e6,
) -> QubitState:
    """以固定頻率 f 精確推進狀態 dt（µs）"""
    if dt <= 0:
        raise ValueError("dt 必須為正")
    rate, p_eq = control_point(f, model, env, rate_cap)
    p_e, p_r, p_i = advance(state.p_e, state.p_r, state.p_i, f, rate, p_eq, dt)
    return QubitState(p_e=min(max(p_e, 0.0), 1.0), p_r=p_r, p_i=p_i)


def switch_segment(state: QubitState, problem: ResetProblem) -> QubitState:
    """切換區段：於 Γ(f_cp) 自由衰減 τ_sw"""
    if problem.bounds.tau_sw <= 0:
        return state
    return step_constant(
        state, problem.bounds.f_cp, problem.bounds.tau_sw, problem.model, problem.env, problem.numerics.rate_cap
    )


def _crossing_time(p_e: float, rate: float, p_eq: float, epsilon: float, t0: float, dt: float) -> float:
    """在 [0, dt] 內二分搜尋 p_e 穿越 epsilon 的時間，保持 p_e(hi) <= epsilon"""
    lo, hi = 0.0, dt
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= BISECTION_RTOL * (t0 + hi):
            break
        mid = 0.5 * (lo + hi)
        if p_eq + (p_e - p_eq) * math.exp(-rate * mid) <= epsilon:
            hi = mid
        else:
            lo = mid
    return hi


def integrate_restore(initial: QubitState, law: "ControlLaw", problem: ResetProblem) -> Trajectory:
    """積分恢復過程直到 p_e 到達 epsilon 或觸及步數／時間上限"""
    model, env, bounds, numerics = problem.model, problem.env, problem.bounds, problem.numerics
    epsilon = bounds.epsilon
    if initial.p_e <= epsilon:
        raise ValueError(f"初始 p_e = {initial.p_e} 必須大於 epsilon = {epsilon}")

    policy = law.bind(problem)
    cap = numerics.rate_cap
    T1 = coherence_time(model, bounds, cap)
    time_limit = numerics.time_limit_T1 * T1
    drift_tol = problem.drift_tolerance

    t = 0.0
    p_e, p_r, p_i = initial.p_e, initial.p_r, initial.p_i
    f = policy.frequency(t, p_e)
    rate, p_eq = control_point(f, model, env, cap)

    trajectory = Trajectory()
    trajectory.append(t, f, p_e, p_r, p_i, rate, p_eq)
    steps = 0
    exhausted = 0
    termination = TerminationCause.PRECISION_REACHED

    while True:
        if steps >= numerics.step_limit:
            termination = TerminationCause.STEP_LIMIT
            break
        if t >= time_limit:
            termination = TerminationCause.TIME_LIMIT
            break

        dt = numerics.step_bound / rate if rate > 0 else math.inf
        t_break = policy.next_change(t)
        hit_break = t + dt >= t_break
        if hit_break:
            dt = t_break - t
        if t + dt > time_limit:
            dt = time_limit - t
            hit_break = False
        if not math.isfinite(dt):
            # Γ = 0 且無時間上限：無法再前進
            termination = TerminationCause.TIME_LIMIT
            break

        new_state = advance(p_e, p_r, p_i, f, rate, p_eq, dt)
        if new_state[0] <= epsilon:
            dt_cross = _crossing_time(p_e, rate, p_eq, epsilon, t, dt)
            p_e, p_r, p_i = advance(p_e, p_r, p_i, f, rate, p_eq, dt_cross)
            t += dt_cross
            steps += 1
            trajectory.append(t, f, p_e, p_r, p_i, rate, p_eq)
            break

        f_next = None
        if policy.feedback:
            f_next = policy.frequency(t + dt, new_state[0])
            halvings = 0
            while abs(f_next - f) > drift_tol and halvings < numerics.max_halvings:
                dt *= 0.5
                halvings += 1
                hit_break = False
                new_state = advance(p_e, p_r, p_i, f, rate, p_eq, dt)
                f_next = policy.frequency(t + dt, new_state[0])
            if abs(f_next - f) > drift_tol:
                exhausted += 1

        t = t_break if hit_break else t + dt
        p_e, p_r, p_i = new_state
        f = f_next if f_next is not None else policy.frequency(t, p_e)
        rate, p_eq = control_point(f, model, env, cap)
        steps += 1
        trajectory.append(t, f, p_e, p_r, p_i, rate, p_eq)

    if exhausted:
        logger.warning(f"控制頻率跳變：{exhausted} 步在縮減步長後仍超過漂移容許值 {drift_tol:.3g} GHz")
    if termination != TerminationCause.PRECISION_REACHED:
        logger.warning(f"積分在達到精度前終止：{termination.value}（t = {t:.6g} µs, p_e = {p_e:.6g}）")

    trajectory.tau_st = t
    trajectory.termination = termination
    trajectory.steps = steps
    return trajectory


def cumulative_rate_integral(trajectory: Trajectory) -> np.ndarray:
    """∫₀^{t_k} Γ dt 在每個樣本時刻的值（分段常數速率，精確）"""
    t = np.asarray(trajectory.t, dtype=float)
    rate = np.asarray(trajectory.rate, dtype=float)
    return np.concatenate(([0.0], np.cumsum(rate[:-1] * np.diff(t))))


def decoherence_factor(trajectory: Trajectory) -> Callable[[Union[float, np.ndarray]], Union[float, np.ndarray]]:
    """回傳 η(t) = exp(-∫₀^t Γ ds)；超過終端時刻時以終端速率延續"""
    if len(trajectory) == 0:
        raise ValueError("軌跡為空")
    t = np.asarray(trajectory.t, dtype=float)
    integral = cumulative_rate_integral(trajectory)
    final_rate = trajectory.rate[-1]

    def eta(time):
        s = np.clip(np.asarray(time, dtype=float), 0.0, None)
        inside = np.interp(s, t, integral)
        beyond = integral[-1] + final_rate * (s - t[-1])
        value = np.exp(-np.where(s > t[-1], beyond, inside))
        return value if np.ndim(time) else float(value)

    return eta


def replay_schedule(initial: QubitState, trajectory: Trajectory, duration: float) -> QubitState:
    """開迴路重播軌跡的控制序列 duration（µs）；超過終端時刻時維持終端頻率"""
    if duration < 0:
        raise ValueError("duration 不可為負")
    t = trajectory.t
    p_e, p_r, p_i = initial.p_e, initial.p_r, initial.p_i
    for k in range(len(t) - 1):
        start = t[k]
        if start >= duration:
            break
        dt = min(t[k + 1], duration) - start
        if dt > 0:
            p_e, p_r, p_i = advance(p_e, p_r, p_i, trajectory.f[k], trajectory.rate[k], trajectory.p_eq[k], dt)
    if duration > t[-1]:
        p_e, p_r, p_i = advance(
            p_e, p_r, p_i, trajectory.f[-1], trajectory.rate[-1], trajectory.p_eq[-1], duration - t[-1]
        )
    return QubitState(p_e=min(max(p_e, 0.0), 1.0), p_r=p_r, p_i=p_i)
