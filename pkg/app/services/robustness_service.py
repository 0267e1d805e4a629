"""
穩健性服務：以基準最佳軌跡為準的偏差分析
"""
from pathlib import Path
from typing import Dict, List, Optional, Tuple
from ..config import get_settings
from ..models.physics_models import QubitState
from ..models.result_models import FidelityCurve, SensitivityReport, Trajectory
from ..models.scenario_models import DeviationSpec, Scenario
from ..physics.robustness import DeviationAxis, fidelity_sweep, run_deviation, sensitivity_report
from ..utils.logger import get_logger
from .reset_service import ResetService

logger = get_logger(__name__)

DEVIATION_AXES: List[DeviationAxis] = ["population", "coherence", "control_time"]


class RobustnessService:
    """穩健性分析服務類別"""

    def __init__(self, reset_service: Optional[ResetService] = None):
        self.settings = get_settings()
        self.reset_service = reset_service or ResetService()
        self._baselines: Dict[str, Tuple[Trajectory, float]] = {}

    def baseline(self, scenario: Scenario, base_dir: Optional[Path] = None) -> Tuple[Trajectory, float]:
        """基準最佳軌跡與 epsilon（依設定雜湊快取）"""
        key = scenario.content_hash()
        if key not in self._baselines:
            _, trajectory, problem = self.reset_service.run_scenario(scenario, base_dir)
            self._baselines[key] = (trajectory, problem.bounds.epsilon)
        return self._baselines[key]

    def deviation(self, scenario: Scenario, spec: DeviationSpec) -> Tuple[QubitState, float]:
        trajectory, epsilon = self.baseline(scenario)
        return run_deviation(spec, trajectory, epsilon)

    def sensitivity(self, scenario: Scenario) -> SensitivityReport:
        trajectory, epsilon = self.baseline(scenario)
        report = sensitivity_report(trajectory, epsilon)
        if report.coherence_discrepancy:
            logger.info(
                f"{scenario.name}：相干靈敏度 {report.coherence.finite_difference:.6g} "
                f"與 √η = {report.coherence.dynamics_prediction:.6g} 一致，與 η = {report.eta_tau:.6g} 不同"
            )
        return report

    def fidelity_curves(self, scenario: Scenario, n_points: int = 101) -> Dict[str, FidelityCurve]:
        """三個偏差軸的保真度曲線"""
        trajectory, epsilon = self.baseline(scenario)
        curves = {axis: fidelity_sweep(trajectory, epsilon, axis, n_points) for axis in DEVIATION_AXES}
        logger.info(
            f"{scenario.name} 保真度最小值："
            + "，".join(f"{axis} = {curve.min_fidelity:.8f}" for axis, curve in curves.items())
        )
        return curves
