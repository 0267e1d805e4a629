"""
圖表資料服務：輸出控制軌跡、恢復過程、額外功比較與保真度曲線的 CSV
"""
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union
import numpy as np
from ..config import get_settings
from ..models.result_models import ResetReport, Trajectory
from ..models.scenario_models import ResetProblem, Scenario
from ..physics.constants import LN2
from ..physics.spectra import eval_rate
from ..physics.work import thermodynamic_length_bound
from ..utils.csv_io import write_csv
from ..utils.logger import get_logger
from .reset_service import ResetService
from .robustness_service import RobustnessService
from .scenario_service import ScenarioService

logger = get_logger(__name__)

FIGURES = ("fig2", "fig3a", "fig3b", "fig4")
SPECTRUM_SAMPLES = 601
BOUND_SAMPLES = 200
FIDELITY_SAMPLES = 101

RunResult = Tuple[ResetReport, Trajectory, ResetProblem]


class FigureService:
    """圖表資料服務類別"""

    def __init__(self, reset_service: Optional[ResetService] = None):
        self.settings = get_settings()
        self.reset_service = reset_service or ResetService()
        self.robustness_service = RobustnessService(self.reset_service)
        self.scenario_service = ScenarioService()
        self._runs: Dict[str, RunResult] = {}

    def scenarios(self, config_dir: Optional[Union[str, Path]] = None) -> List[Scenario]:
        """四個內建情境；config_dir 中的 <名稱>.json 可覆寫"""
        result = []
        for name in self.scenario_service.builtin_names():
            override = Path(config_dir) / f"{name}.json" if config_dir else None
            if override is not None and override.exists():
                scenario, _ = self.scenario_service.load(override)
            else:
                scenario = self.scenario_service.builtin(name)
            result.append(scenario)
        return result

    def _run(self, scenario: Scenario) -> RunResult:
        key = scenario.content_hash()
        if key not in self._runs:
            self._runs[key] = self.reset_service.run_scenario(scenario)
        return self._runs[key]

    def fig2(self, scenarios: List[Scenario], out_dir: Path) -> List[Path]:
        """控制軌跡 (t, p_e, f) 與頻譜線形 (f, Γ)"""
        paths = []
        for scenario in scenarios:
            report, trajectory, problem = self._run(scenario)
            rows = zip(trajectory.t, trajectory.p_e, trajectory.f)
            paths.append(write_csv(out_dir / f"fig2_{scenario.name}_control.csv", ["t_us", "p_e", "f_GHz"], rows))

            bounds = problem.bounds
            freqs = np.linspace(bounds.f_min, bounds.f_max, SPECTRUM_SAMPLES)
            rates = eval_rate(problem.model, freqs, problem.numerics.rate_cap)
            paths.append(
                write_csv(
                    out_dir / f"fig2_{scenario.name}_spectrum.csv",
                    ["f_GHz", "rate_per_us"],
                    zip(freqs.tolist(), rates.tolist()),
                )
            )
        return paths

    def fig3a(self, scenarios: List[Scenario], out_dir: Path) -> List[Path]:
        """恢復過程 p_e 對 t/T₁，以及終點標記"""
        paths = []
        terminals = []
        for scenario in scenarios:
            report, trajectory, _ = self._run(scenario)
            scale = 1.0 / report.T1 if report.T1 else 0.0
            rows = ((t, t * scale, p) for t, p in zip(trajectory.t, trajectory.p_e))
            paths.append(write_csv(out_dir / f"fig3a_{scenario.name}.csv", ["t_us", "t_over_T1", "p_e"], rows))
            terminals.append((scenario.name, report.tau_st, report.tau_st_over_T1, trajectory.p_e[-1]))
        paths.append(
            write_csv(out_dir / "fig3a_terminal.csv", ["scenario", "tau_st_us", "t_over_T1", "p_e"], terminals)
        )
        return paths

    def fig3b(self, scenarios: List[Scenario], out_dir: Path) -> List[Path]:
        """額外功 W_ex/(k_B T ln2) 對 T_reset/T₁，以及熱力學長度下限曲線"""
        points = []
        for scenario in scenarios:
            report, _, _ = self._run(scenario)
            ratio = report.T_reset / report.T1 if report.T1 else 0.0
            points.append((scenario.name, ratio, report.W_ex_norm))
        paths = [write_csv(out_dir / "fig3b_points.csv", ["scenario", "T_reset_over_T1", "W_ex_norm"], points)]

        xs = np.logspace(-10, 2, BOUND_SAMPLES)
        bound = ((float(x), thermodynamic_length_bound(float(x)) / LN2) for x in xs)
        paths.append(write_csv(out_dir / "fig3b_bound.csv", ["T_reset_over_T1", "W_TL_norm"], bound))
        return paths

    def fig4(self, scenarios: List[Scenario], out_dir: Path) -> List[Path]:
        """三種偏差下的保真度曲線"""
        paths = []
        header = ["deviation_value", "fidelity", "final_p_e", "final_coh_abs"]
        for scenario in scenarios:
            curves = self.robustness_service.fidelity_curves(scenario, FIDELITY_SAMPLES)
            for axis, curve in curves.items():
                rows = ((p.deviation_value, p.fidelity, p.final_p_e, p.final_coh_abs) for p in curve.points)
                paths.append(write_csv(out_dir / f"fig4_{scenario.name}_{axis}.csv", header, rows))
        return paths

    def generate(
        self,
        which: str,
        out_dir: Optional[Union[str, Path]] = None,
        config_dir: Optional[Union[str, Path]] = None,
    ) -> List[Path]:
        """產生指定圖表（或 all）的 CSV"""
        targets = FIGURES if which == "all" else (which,)
        unknown = [t for t in targets if t not in FIGURES]
        if unknown:
            raise ValueError(f"未知的圖表：{', '.join(unknown)}")
        out = Path(out_dir or self.settings.output_dir) / "figures"
        scenarios = self.scenarios(config_dir)
        paths = []
        for target in targets:
            paths.extend(getattr(self, target)(scenarios, out))
            logger.info(f"{target} 資料已寫入 {out}")
        return paths
