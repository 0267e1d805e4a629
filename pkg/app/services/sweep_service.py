"""
掃描服務：參數掃描與溫度校準（情境之間平行執行）
"""
import asyncio
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple
import numpy as np
from ..config import get_settings
from ..exceptions import ConfigurationError
from ..models.result_models import CalibrationResult, ResetReport
from ..models.scenario_models import Numerics, Scenario
from ..utils.logger import get_logger
from ..utils.optimize import golden_section_maximize
from .reset_service import ResetService
from .scenario_service import BUILTIN_SCENARIO_SPECTRA, ScenarioService

logger = get_logger(__name__)

SWEEPABLE_FIELDS = ("temperature_K", "f_cp_GHz", "delta_f_GHz", "tau_sw_us", "epsilon")
SWEEPABLE_NUMERICS = ("grid_points", "xtol_GHz", "step_bound", "rate_cap", "time_limit_T1", "drift_fraction")

# 四種頻譜在參考溫度下的 W_ex/(k_B T ln2)
REFERENCE_W_EX_NORM = {"lz": 18.53, "prot": 22.51, "mix": 6.24, "jqf": 6.37}

# 預設只擬合 lz 與 prot；jqf 的參考值無法與兩者在同一溫度吻合，mix 與 jqf 只列出殘差
DEFAULT_FIT_SPECTRA = ("lz", "prot")

CALIBRATION_RANGE_K = (0.005, 0.020)
CALIBRATION_POINTS = 64
CALIBRATION_XTOL_K = 1.0e-6


def parse_axis(spec: str) -> Tuple[str, List[float]]:
    """解析 "field=start:stop:n"，回傳欄位名稱與等距取值"""
    try:
        field, rng = spec.split("=", 1)
        start, stop, count = rng.split(":")
        start_v, stop_v, n = float(start), float(stop), int(count)
    except ValueError:
        raise ConfigurationError(f"無效的掃描軸 {spec!r}，格式應為 field=start:stop:n")
    field = field.strip()
    name = field.split(".", 1)[1] if field.startswith("numerics.") else field
    if name not in SWEEPABLE_FIELDS and name not in SWEEPABLE_NUMERICS:
        raise ConfigurationError(f"無法掃描的欄位：{field}")
    if n < 1:
        raise ConfigurationError("掃描點數 n 必須至少為 1")
    values = [start_v] if n == 1 else np.linspace(start_v, stop_v, n).tolist()
    return field, values


def apply_axis(scenario: Scenario, field: str, value: float) -> Scenario:
    """回傳更新單一欄位後重新驗證的情境"""
    data = scenario.model_dump()
    name = field.split(".", 1)[1] if field.startswith("numerics.") else field
    if name in SWEEPABLE_NUMERICS:
        field_type = Numerics.model_fields[name].annotation
        data["numerics"][name] = int(round(value)) if field_type is int else value
    else:
        data[name] = value
    return ScenarioService().parse(data)


def report_row(axis_field: str, axis_value: float, report: ResetReport) -> Dict[str, Any]:
    """掃描 CSV 的一列：掃描軸取值加上報告全部欄位"""
    row: Dict[str, Any] = {axis_field: axis_value}
    row.update(report.model_dump(mode="json"))
    return row


class SweepService:
    """掃描與校準服務類別"""

    def __init__(self, reset_service: Optional[ResetService] = None):
        self.settings = get_settings()
        self.reset_service = reset_service or ResetService()
        self.scenario_service = ScenarioService()

    async def _gather(self, jobs: List[Tuple]) -> List[Any]:
        """在執行緒池中平行執行 (函數, 參數...)，結果依輸入順序回傳"""
        loop = asyncio.get_event_loop()
        with ThreadPoolExecutor(max_workers=self.settings.max_workers) as executor:
            futures = [loop.run_in_executor(executor, job[0], *job[1:]) for job in jobs]
            return await asyncio.gather(*futures)

    def _run_point(self, scenario: Scenario, field: str, value: float, base_dir: Optional[Path]) -> Dict[str, Any]:
        variant = apply_axis(scenario, field, value)
        report, _, _ = self.reset_service.run_scenario(variant, base_dir)
        return report_row(field, value, report)

    async def sweep(self, scenario: Scenario, axis: str, base_dir: Optional[Path] = None) -> List[Dict[str, Any]]:
        """沿單一欄位掃描，每點獨立執行，結果依軸順序排列"""
        field, values = parse_axis(axis)
        logger.info(f"開始掃描 {scenario.name}：{field}，共 {len(values)} 點")
        rows = await self._gather([(self._run_point, scenario, field, v, base_dir) for v in values])
        logger.info(f"掃描完成：{len(rows)} 列")
        return rows

    def _w_ex_norms(self, temperature: float, names: List[str]) -> Dict[str, float]:
        result = {}
        for name in names:
            scenario = self.scenario_service.builtin(f"{name}-default").model_copy(
                update={"temperature_K": temperature}
            )
            report, _, _ = self.reset_service.run_scenario(scenario)
            result[name] = report.W_ex_norm
        return result

    @staticmethod
    def _objective(computed: Dict[str, float], targets: Dict[str, float]) -> float:
        return sum(((computed[k] - v) / v) ** 2 for k, v in targets.items())

    async def calibrate_temperature(
        self,
        targets: Optional[Dict[str, float]] = None,
        t_range: Tuple[float, float] = CALIBRATION_RANGE_K,
        points: int = CALIBRATION_POINTS,
        xtol: float = CALIBRATION_XTOL_K,
        fit: Optional[Sequence[str]] = None,
    ) -> CalibrationResult:
        """掃描溫度並以黃金分割細化，最小化 fit 中各頻譜 W_ex/ln2 的相對誤差平方和

        fit 省略時取 DEFAULT_FIT_SPECTRA 與 targets 的交集，交集為空則擬合全部目標。
        其餘目標只在結果中列出殘差；全部目標一起擬合的格點最佳值另列於 joint_*。
        """
        targets = dict(targets or REFERENCE_W_EX_NORM)
        known = {spec for spec in BUILTIN_SCENARIO_SPECTRA.values()}
        unknown = [k for k in targets if k not in known]
        if unknown:
            raise ConfigurationError(f"未知的頻譜：{', '.join(unknown)}")
        if any(v <= 0 for v in targets.values()):
            raise ConfigurationError("校準目標必須為正")
        if points < 2:
            raise ConfigurationError("掃描點數至少為 2")
        if fit is None:
            fit = [k for k in targets if k in DEFAULT_FIT_SPECTRA] or list(targets)
        fit = list(fit)
        if not fit or any(k not in targets for k in fit):
            raise ConfigurationError(f"擬合頻譜 {fit} 必須是校準目標 {list(targets)} 的非空子集")
        names = list(targets)
        fit_targets = {k: targets[k] for k in fit}

        temps = np.linspace(t_range[0], t_range[1], points).tolist()
        logger.info(
            f"開始溫度校準：{t_range[0] * 1e3:g}–{t_range[1] * 1e3:g} mK，{points} 點，擬合 {', '.join(fit)}"
        )
        scans = await self._gather([(self._w_ex_norms, t, names) for t in temps])
        objectives = [self._objective(c, fit_targets) for c in scans]
        best = int(np.argmin(objectives))

        left = temps[max(best - 1, 0)]
        right = temps[min(best + 1, points - 1)]
        loop = asyncio.get_event_loop()
        t_ref, neg_obj = await loop.run_in_executor(
            None,
            lambda: golden_section_maximize(
                lambda t: -self._objective(self._w_ex_norms(t, fit), fit_targets), left, right, xtol
            ),
        )
        if -neg_obj < objectives[best]:
            best_t, best_obj = t_ref, -neg_obj
        else:
            best_t, best_obj = temps[best], objectives[best]

        computed = self._w_ex_norms(best_t, names)
        residuals = {k: (computed[k] - v) / v for k, v in targets.items()}

        joint = [self._objective(c, targets) for c in scans]
        joint_best = int(np.argmin(joint))
        joint_residuals = {k: (scans[joint_best][k] - v) / v for k, v in targets.items()}
        if joint_best != best:
            logger.warning(
                f"全部目標的最佳溫度 {temps[joint_best] * 1e3:.4f} mK 與擬合 {', '.join(fit)} 的結果不同，殘差："
                + "，".join(f"{k} {r:+.1%}" for k, r in joint_residuals.items())
            )

        logger.info(f"溫度校準完成：T = {best_t * 1e3:.4f} mK，目標函數 = {best_obj:.6g}")
        return CalibrationResult(
            best_temperature_K=best_t,
            objective=best_obj,
            fit_spectra=fit,
            targets=targets,
            computed=computed,
            residuals=residuals,
            joint_temperature_K=temps[joint_best],
            joint_objective=joint[joint_best],
            joint_residuals=joint_residuals,
        )
