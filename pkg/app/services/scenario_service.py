"""
情境服務：內建情境、設定檔載入與問題建構
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union
from pydantic import ValidationError
from ..config import get_settings
from ..exceptions import ConfigurationError
from ..models.scenario_models import ResetProblem, Scenario
from ..models.spectrum_models import BUILTIN_SPECTRA, SpectrumModel
from ..physics.control import ConstantAtPeak, ControlLaw, FixedSchedule, TimeLocalOptimal
from ..physics.spectra import load_tabulated
from ..utils.csv_io import load_schedule
from ..utils.logger import get_logger

logger = get_logger(__name__)

BUILTIN_SCENARIO_SPECTRA = {
    "lz-default": "lz",
    "prot-default": "prot",
    "mix-default": "mix",
    "jqf-default": "jqf",
}

# 四種參考頻譜的公開參數
REFERENCE_TABLE: Dict[str, Dict[str, float]] = {
    "lz": {"g": 0.107, "kappa": 0.044, "f_r": 5.4},
    "prot": {"kappa": 0.005, "g": 0.150, "f_F": 5.0, "f_R": 6.5},
    "mix": {"C_phi": 0.5, "C_Q": 0.001, "C_purcell": 0.08, "f_r": 8.27, "kappa": 0.0015, "C_other": 0.02},
    "jqf": {"tau0": 9.1, "tau": 98.0, "four_kappa_j": 0.0508, "f_0": 5.011},
}


def format_validation_error(error: ValidationError) -> str:
    """將 pydantic 驗證錯誤整理為「欄位：訊息」列表"""
    parts = []
    for item in error.errors():
        field = ".".join(str(p) for p in item["loc"]) or "(根)"
        parts.append(f"欄位 {field}：{item['msg']}")
    return "；".join(parts)


class ScenarioService:
    """情境設定服務類別"""

    def __init__(self):
        self.settings = get_settings()

    def builtin_names(self) -> List[str]:
        return list(BUILTIN_SCENARIO_SPECTRA)

    def builtin(self, name: str) -> Scenario:
        """取得內建情境（溫度取自設定）"""
        if name not in BUILTIN_SCENARIO_SPECTRA:
            raise ConfigurationError(f"未知的內建情境：{name}（可用：{', '.join(BUILTIN_SCENARIO_SPECTRA)}）")
        return Scenario(
            name=name,
            spectrum=BUILTIN_SCENARIO_SPECTRA[name],
            temperature_K=self.settings.default_temperature_k,
        )

    def parse(self, data: Any) -> Scenario:
        """驗證情境字典，未知欄位視為錯誤"""
        if not isinstance(data, dict):
            raise ConfigurationError("情境設定必須是 JSON 物件")
        try:
            return Scenario.model_validate(data)
        except ValidationError as e:
            raise ConfigurationError(format_validation_error(e))

    def load(self, source: Union[str, Path]) -> Tuple[Scenario, Optional[Path]]:
        """載入內建情境名稱或 JSON 設定檔，回傳 (情境, 設定檔目錄)"""
        source = str(source)
        if source in BUILTIN_SCENARIO_SPECTRA:
            return self.builtin(source), None

        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigurationError(f"無法讀取設定檔 {path}：{e}")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"{path} 第 {e.lineno} 行第 {e.colno} 欄：JSON 語法錯誤（{e.msg}）")

        scenario = self.parse(data)
        logger.info(f"已載入情境 {scenario.name}（{path}）")
        return scenario, path.resolve().parent

    @staticmethod
    def _resolve(path: str, base_dir: Optional[Path]) -> Path:
        candidate = Path(path)
        if not candidate.is_absolute() and base_dir is not None:
            candidate = base_dir / candidate
        return candidate

    def build_model(self, scenario: Scenario, base_dir: Optional[Path] = None) -> SpectrumModel:
        """依情境建立頻譜模型"""
        if scenario.spectrum.startswith("tabulated:"):
            if scenario.spectrum_overrides:
                raise ConfigurationError("表格化頻譜不接受 spectrum_overrides")
            path = self._resolve(scenario.spectrum.split(":", 1)[1], base_dir)
            try:
                with open(path, encoding="utf-8", newline="") as f:
                    return load_tabulated(f)
            except OSError as e:
                raise ConfigurationError(f"無法讀取表格化頻譜 {path}：{e}")

        spectrum_cls = BUILTIN_SPECTRA[scenario.spectrum]
        try:
            return spectrum_cls(**scenario.spectrum_overrides)
        except ValidationError as e:
            raise ConfigurationError(f"spectrum_overrides：{format_validation_error(e)}")

    def build_law(self, scenario: Scenario, base_dir: Optional[Path] = None) -> ControlLaw:
        """依情境建立控制律"""
        if scenario.control == "time_local":
            return TimeLocalOptimal()
        if scenario.control == "constant":
            return ConstantAtPeak()
        path = self._resolve(scenario.control.split(":", 1)[1], base_dir)
        try:
            with open(path, encoding="utf-8", newline="") as f:
                points = load_schedule(f)
        except OSError as e:
            raise ConfigurationError(f"無法讀取控制排程 {path}：{e}")
        return FixedSchedule(breakpoints=tuple(points))

    def build_problem(self, scenario: Scenario, base_dir: Optional[Path] = None) -> ResetProblem:
        """組合不可變的重置問題"""
        try:
            return ResetProblem(
                model=self.build_model(scenario, base_dir),
                env=scenario.environment(),
                bounds=scenario.bounds(),
                numerics=scenario.numerics,
            )
        except ValidationError as e:
            raise ConfigurationError(format_validation_error(e))

    def verify_builtin_table(self) -> List[str]:
        """比對內建頻譜預設參數與參考表，回傳不一致的項目"""
        mismatches = []
        for name, params in REFERENCE_TABLE.items():
            model = BUILTIN_SPECTRA[name]()
            for key, expected in params.items():
                actual = getattr(model, key)
                if actual != expected:
                    mismatches.append(f"{name}.{key}: {actual} != {expected}")
        return mismatches
