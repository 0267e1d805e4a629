"""
錯誤類別模組
"""
from typing import Optional


class ResetError(Exception):
    """重置工具的基礎錯誤"""

    error_code = "RESET_ERROR"
    exit_code = 1
    user_message = "執行重置計算時發生錯誤"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ConfigurationError(ResetError):
    """情境設定錯誤"""

    error_code = "CONFIGURATION_ERROR"
    exit_code = 1
    user_message = "情境設定無效，請檢查欄位內容"


class CSVParseError(ConfigurationError):
    """CSV 輸入解析錯誤，訊息帶行號"""

    error_code = "CSV_PARSE_ERROR"

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"第 {line} 行：{message}"
        super().__init__(message)
        self.line = line


class SpectrumParseError(CSVParseError):
    """表格化頻譜解析錯誤"""

    error_code = "SPECTRUM_PARSE_ERROR"


class ScheduleParseError(CSVParseError):
    """控制排程解析錯誤"""

    error_code = "SCHEDULE_PARSE_ERROR"


class NumericalError(ResetError):
    """數值計算失敗"""

    error_code = "NUMERICAL_ERROR"
    exit_code = 2
    user_message = "數值計算失敗"


class AchievabilityError(NumericalError):
    """重置精度低於可達下限 ε^min"""

    error_code = "ACHIEVABILITY_ERROR"

    def __init__(self, epsilon: float, epsilon_min: float):
        super().__init__(
            f"epsilon={epsilon:.6g} 不大於 epsilon_min = p_eq(f_max) = {epsilon_min:.6g}"
        )
        self.epsilon = epsilon
        self.epsilon_min = epsilon_min


class NoDescentError(NumericalError):
    """所有容許頻率下布居都無法下降"""

    error_code = "NO_DESCENT_ERROR"


class DegenerateTransversalityError(NumericalError):
    """終端橫截條件的分母為零"""

    error_code = "DEGENERATE_TRANSVERSALITY"


class IntegrationLimitError(NumericalError):
    """積分在達到精度前被截斷"""

    error_code = "INTEGRATION_LIMIT"

    def __init__(self, message: str, termination: str):
        super().__init__(message)
        self.termination = termination


class PhysicsDomainError(ValueError):
    """純函數的定義域錯誤"""

    error_code = "DOMAIN_ERROR"


class SpectrumRangeError(PhysicsDomainError):
    """頻率超出表格化頻譜的範圍"""

    error_code = "SPECTRUM_RANGE_ERROR"
