"""
穩健性分析：初始布居、初始相干與控制時間偏差下的終態與保真度
"""
import math
from typing import Literal, Tuple
import numpy as np
from .dynamics import decoherence_factor, replay_schedule
from ..exceptions import PhysicsDomainError
from ..models.physics_models import POSITIVITY_TOLERANCE, QubitState
from ..models.result_models import FidelityCurve, FidelityPoint, SensitivityEntry, SensitivityReport, Trajectory
from ..models.scenario_models import (
    CoherenceDeviation,
    ControlTimeDeviation,
    DeviationSpec,
    PopulationDeviation,
)

DeviationAxis = Literal["population", "coherence", "control_time"]

POPULATION_STEP = 1.0e-3
COHERENCE_STEP = 1.0e-3
COHERENCE_CENTER = 0.25
CONTROL_TIME_STEP_REL = 1.0e-3
SENSITIVITY_RTOL = 1.0e-4


def fidelity(state: QubitState, epsilon: float) -> float:
    """與目標 diag(1-ε, ε) 的 Uhlmann 保真度（二能階閉式解）"""
    det_rho = state.determinant
    if det_rho < -POSITIVITY_TOLERANCE:
        raise PhysicsDomainError(f"密度矩陣不滿足正定性：det ρ = {det_rho:.3g}")
    overlap = state.p_e * epsilon + (1.0 - state.p_e) * (1.0 - epsilon)
    value = overlap + 2.0 * math.sqrt(max(det_rho, 0.0) * epsilon * (1.0 - epsilon))
    return min(max(value, 0.0), 1.0)


def _relative_error(value: float, reference: float) -> float:
    if reference == 0.0:
        return abs(value)
    return abs(value - reference) / abs(reference)


def deviated_initial_state(spec: DeviationSpec, baseline: Trajectory) -> QubitState:
    """偏差規格對應的初始狀態"""
    if isinstance(spec, PopulationDeviation):
        return QubitState(p_e=spec.p)
    if isinstance(spec, CoherenceDeviation):
        return QubitState(p_e=0.5, p_r=spec.p_r, p_i=spec.p_i)
    return baseline.initial_state


def run_deviation(spec: DeviationSpec, baseline: Trajectory, epsilon: float) -> Tuple[QubitState, float]:
    """以開迴路重播基準控制序列，回傳偏差下的終態與保真度"""
    duration = baseline.tau_st
    if isinstance(spec, ControlTimeDeviation):
        if spec.delta_tau < -baseline.tau_st:
            raise ValueError(f"delta_tau = {spec.delta_tau} 小於 -τ_st = {-baseline.tau_st}")
        duration = max(baseline.tau_st + spec.delta_tau, 0.0)
    final = replay_schedule(deviated_initial_state(spec, baseline), baseline, duration)
    return final, fidelity(final, epsilon)


def sensitivity_report(
    baseline: Trajectory,
    epsilon: float,
    dp: float = POPULATION_STEP,
    dc: float = COHERENCE_STEP,
    dtau_rel: float = CONTROL_TIME_STEP_REL,
) -> SensitivityReport:
    """三種偏差通道的中央差分靈敏度，與動力學推導值及文獻給定式並列"""
    tau = baseline.tau_st
    eta_tau = float(decoherence_factor(baseline)(tau))

    def final_after(spec: DeviationSpec) -> QubitState:
        return run_deviation(spec, baseline, epsilon)[0]

    # ∂p_e(τ)/∂p
    hi = final_after(PopulationDeviation(p=0.5 + dp)).p_e
    lo = final_after(PopulationDeviation(p=0.5 - dp)).p_e
    d_pop = (hi - lo) / (2.0 * dp)
    population = SensitivityEntry(
        finite_difference=d_pop,
        dynamics_prediction=eta_tau,
        stated_prediction=eta_tau,
        dynamics_relative_error=_relative_error(d_pop, eta_tau),
        stated_relative_error=_relative_error(d_pop, eta_tau),
    )

    # ∂|ρ_eg(τ)|/∂|c|：相干以 Γ/2 衰減，動力學給出 √η
    hi = final_after(CoherenceDeviation(c_abs=COHERENCE_CENTER + dc)).coherence_abs
    lo = final_after(CoherenceDeviation(c_abs=COHERENCE_CENTER - dc)).coherence_abs
    d_coh = (hi - lo) / (2.0 * dc)
    sqrt_eta = math.sqrt(eta_tau)
    coherence = SensitivityEntry(
        finite_difference=d_coh,
        dynamics_prediction=sqrt_eta,
        stated_prediction=eta_tau,
        dynamics_relative_error=_relative_error(d_coh, sqrt_eta),
        stated_relative_error=_relative_error(d_coh, eta_tau),
    )

    # |∂p_e/∂(Γ δτ)| 於 δτ = 0
    h = dtau_rel * tau
    hi = final_after(ControlTimeDeviation(delta_tau=h)).p_e
    lo = final_after(ControlTimeDeviation(delta_tau=-h)).p_e
    terminal_rate = baseline.rate[-1]
    d_time = abs(hi - lo) / (2.0 * h * terminal_rate) if terminal_rate > 0 else 0.0
    predicted = baseline.p_e[-1] - baseline.p_eq[-1]
    control_time = SensitivityEntry(
        finite_difference=d_time,
        dynamics_prediction=predicted,
        stated_prediction=epsilon,
        dynamics_relative_error=_relative_error(d_time, predicted),
        stated_relative_error=_relative_error(d_time, epsilon),
    )

    return SensitivityReport(
        eta_tau=eta_tau,
        population=population,
        coherence=coherence,
        control_time=control_time,
        coherence_discrepancy=coherence.stated_relative_error > SENSITIVITY_RTOL,
    )


def axis_values(axis: DeviationAxis, tau_st: float, n_points: int) -> np.ndarray:
    """各偏差軸的完整容許範圍"""
    if axis == "population":
        return np.linspace(0.0, 1.0, n_points)
    if axis == "coherence":
        return np.linspace(0.0, 0.5, n_points)
    if axis == "control_time":
        return np.linspace(-0.5 * tau_st, 5.0 * tau_st, n_points)
    raise ValueError(f"未知的偏差軸：{axis}")


def deviation_for(axis: DeviationAxis, value: float) -> DeviationSpec:
    if axis == "population":
        return PopulationDeviation(p=min(max(value, 0.0), 1.0))
    if axis == "coherence":
        return CoherenceDeviation(c_abs=min(max(value, 0.0), 0.5))
    return ControlTimeDeviation(delta_tau=value)


def fidelity_sweep(baseline: Trajectory, epsilon: float, axis: DeviationAxis, n_points: int) -> FidelityCurve:
    """沿單一偏差軸掃描保真度"""
    if n_points < 2:
        raise ValueError("n_points 至少為 2")
    curve = FidelityCurve(axis=axis)
    for value in axis_values(axis, baseline.tau_st, n_points):
        final, fid = run_deviation(deviation_for(axis, float(value)), baseline, epsilon)
        curve.points.append(
            FidelityPoint(
                deviation_value=float(value),
                fidelity=fid,
                final_p_e=final.p_e,
                final_coh_abs=final.coherence_abs,
            )
        )
    return curve
