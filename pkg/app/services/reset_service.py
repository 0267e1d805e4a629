"""
重置服務：切換–恢復–切換流程、報告組裝與輸出
"""
import math
from pathlib import Path
from typing import Optional, Tuple, Union
from ..config import get_settings
from ..exceptions import ConfigurationError, IntegrationLimitError, ResetError
from ..models.physics_models import QubitState
from ..models.result_models import ResetReport, Trajectory
from ..models.scenario_models import ResetProblem, Scenario
from ..physics.constants import LN2
from ..physics.control import ControlLaw
from ..physics.dynamics import integrate_restore, switch_segment
from ..physics.spectra import coherence_time, spectrum_name
from ..physics.work import (
    MAX_ENTROPY_POPULATION,
    check_achievability,
    constant_control_work_approx,
    passive_reset_time,
    thermodynamic_length_bound,
    work_ledger,
)
from ..utils.csv_io import write_json, write_schedule, write_trajectory
from ..utils.logger import get_logger
from .scenario_service import ScenarioService

logger = get_logger(__name__)

REPORT_FILE = "report.json"
TRAJECTORY_FILE = "trajectory.csv"
CONTROL_FILE = "control.csv"


class ResetService:
    """重置流程服務類別"""

    def __init__(self):
        self.settings = get_settings()
        self.scenarios = ScenarioService()

    def run_reset(self, problem: ResetProblem, law: ControlLaw) -> Tuple[ResetReport, Trajectory]:
        """從 p_e(0) = 0.5 執行切換–恢復–切換，回傳報告與恢復軌跡"""
        model, env, bounds, numerics = problem.model, problem.env, problem.bounds, problem.numerics
        eps_min = check_achievability(bounds, env)

        initial = QubitState(p_e=MAX_ENTROPY_POPULATION)
        if numerics.switch_decay:
            initial = switch_segment(initial, problem)

        try:
            trajectory = integrate_restore(initial, law, problem)
        except ValueError as e:
            raise ConfigurationError(str(e))
        if not trajectory.reached_precision:
            raise IntegrationLimitError(
                f"恢復過程在 t = {trajectory.tau_st:.6g} µs 終止（{trajectory.termination.value}），"
                f"p_e = {trajectory.p_e[-1]:.6g} 未達 epsilon = {bounds.epsilon:g}",
                trajectory.termination.value,
            )

        final = trajectory.final_state
        if numerics.switch_decay:
            final = switch_segment(final, problem)

        ledger = work_ledger(trajectory, bounds, env, numerics.work_quadrature)
        T1 = coherence_time(model, bounds, numerics.rate_cap)
        T1_infinite = math.isinf(T1)
        tau_st = trajectory.tau_st
        T_reset = tau_st + 2.0 * bounds.tau_sw
        W_ex_norm = ledger.W_ex / LN2

        if T1_infinite:
            tau_st_over_T1, W_TL_norm, below = 0.0, None, None
        else:
            tau_st_over_T1 = tau_st / T1
            W_TL_norm = thermodynamic_length_bound(T_reset / T1) / LN2 if T_reset > 0 else None
            below = W_ex_norm < W_TL_norm if W_TL_norm is not None else None

        passive = passive_reset_time(model, bounds, env, numerics.rate_cap)
        passive_us = passive if math.isfinite(passive) else None
        speedup = passive / T_reset if passive_us is not None and T_reset > 0 else None

        report = ResetReport(
            spectrum=spectrum_name(model),
            temperature_K=env.temperature,
            termination=trajectory.termination,
            tau_st=tau_st,
            T1=None if T1_infinite else T1,
            T1_infinite=T1_infinite,
            tau_st_over_T1=tau_st_over_T1,
            T_reset=T_reset,
            W_sw1=ledger.W_sw1,
            W_st=ledger.W_st,
            W_sw2=ledger.W_sw2,
            W=ledger.W,
            dU=ledger.dU,
            dS=ledger.dS,
            dF=ledger.dF,
            W_ex=ledger.W_ex,
            W_ex_norm=W_ex_norm,
            W_TL_norm=W_TL_norm,
            epsilon_min=eps_min,
            p_e_final=final.p_e,
            f_start_GHz=trajectory.f[0],
            f_end_GHz=trajectory.f[-1],
            W_ex_approx_norm=constant_control_work_approx(trajectory.f[-1], env) / LN2,
            below_tl_bound=below,
            passive_reset_us=passive_us,
            speedup=speedup,
        )
        logger.debug(f"重置完成：{trajectory.steps} 步，τ_st = {tau_st:.6g} µs")
        return report, trajectory

    def run_scenario(
        self, scenario: Scenario, base_dir: Optional[Path] = None
    ) -> Tuple[ResetReport, Trajectory, ResetProblem]:
        """執行單一情境"""
        logger.info(f"開始執行情境 {scenario.name}（{scenario.spectrum}, T = {scenario.temperature_K} K）")
        try:
            problem = self.scenarios.build_problem(scenario, base_dir)
            law = self.scenarios.build_law(scenario, base_dir)
            report, trajectory = self.run_reset(problem, law)
        except ResetError as e:
            logger.error(f"情境 {scenario.name} 執行失敗", error=e)
            raise

        report = report.model_copy(update={"scenario": scenario.name, "control": scenario.control})
        logger.info(
            f"情境 {scenario.name} 完成：τ_st = {report.tau_st:.6g} µs，"
            f"τ_st/T₁ = {report.tau_st_over_T1:.6g}，W_ex/ln2 = {report.W_ex_norm:.6g}"
        )
        return report, trajectory, problem

    def output_directory(self, scenario: Scenario, out_dir: Optional[Union[str, Path]] = None) -> Path:
        """每次執行一個目錄：<情境名稱>-<設定內容雜湊>"""
        root = Path(out_dir or self.settings.output_dir)
        return root / f"{scenario.name}-{scenario.content_hash()}"

    def write_outputs(
        self,
        scenario: Scenario,
        report: ResetReport,
        trajectory: Trajectory,
        out_dir: Optional[Union[str, Path]] = None,
    ) -> Path:
        """寫出 report.json、trajectory.csv 與 control.csv"""
        run_dir = self.output_directory(scenario, out_dir)
        run_dir.mkdir(parents=True, exist_ok=True)
        write_json(run_dir / REPORT_FILE, report)
        with open(run_dir / TRAJECTORY_FILE, "w", encoding="utf-8", newline="") as f:
            write_trajectory(trajectory, f)
        with open(run_dir / CONTROL_FILE, "w", encoding="utf-8", newline="") as f:
            write_schedule(trajectory, f)
        logger.info(f"輸出已寫入 {run_dir}")
        return run_dir
