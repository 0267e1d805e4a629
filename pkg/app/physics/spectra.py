"""
頻譜評估、最大化、相干時間、設計準則與表格化頻譜讀寫
"""
import csv
import io
import math
from typing import Iterable, TextIO, Union
import numpy as np
from ..exceptions import SpectrumParseError
from ..models.physics_models import ControlBounds
from ..models.result_models import GuidelineReport, RateMaximum
from ..models.spectrum_models import MixedSpectrum, SpectrumModel, TabulatedSpectrum
from ..utils.optimize import grid_golden_maximize
from ..utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_RATE_CAP = 1.0e6
DEFAULT_GRID_POINTS = 4001
DEFAULT_XTOL = 1.0e-6

TABULATED_HEADER = ["f_GHz", "rate_per_us"]

MIXED_UNIT_NOTE = "mixed 頻譜以原始數值（2π×GHz、µs）代入公式"


def eval_rate(model: SpectrumModel, f, rate_cap: float = DEFAULT_RATE_CAP):
    """Γ(2πf)，單位 µs⁻¹，截斷於 rate_cap"""
    if np.any(np.asarray(f) <= 0):
        raise ValueError("頻率必須為正")
    model.check_domain(f)
    rate = np.minimum(model.rate_uncapped(f), rate_cap)
    return rate if np.ndim(f) else float(rate)


def spectrum_name(model: SpectrumModel) -> str:
    return model.kind


def argmax_rate(
    model: SpectrumModel,
    bounds: ControlBounds,
    grid_points: int = DEFAULT_GRID_POINTS,
    rate_cap: float = DEFAULT_RATE_CAP,
    xtol: float = DEFAULT_XTOL,
) -> RateMaximum:
    """在 [f_min, f_max] 上最大化 Γ，相等時取較小頻率"""
    f_star, rate_star = grid_golden_maximize(
        lambda f: eval_rate(model, f, rate_cap),
        bounds.f_min,
        bounds.f_max,
        grid_points,
        xtol,
    )
    capped = rate_star >= rate_cap
    if capped:
        logger.warning(f"Γ 的最大值觸及截斷值 {rate_cap:g} µs⁻¹（f* = {f_star:.6f} GHz）")
    return RateMaximum(f=f_star, rate=rate_star, capped=capped)


def coherence_time(model: SpectrumModel, bounds: ControlBounds, rate_cap: float = DEFAULT_RATE_CAP) -> float:
    """T₁ = 1/Γ(f_cp)；Γ(f_cp) = 0 時回傳 inf"""
    rate = eval_rate(model, bounds.f_cp, rate_cap)
    if rate <= 0.0:
        logger.warning(f"Γ(f_cp = {bounds.f_cp} GHz) = 0，相干時間為無限大")
        return math.inf
    return 1.0 / rate


def guideline_report(
    model: SpectrumModel,
    bounds: ControlBounds,
    grid_points: int = DEFAULT_GRID_POINTS,
    rate_cap: float = DEFAULT_RATE_CAP,
) -> GuidelineReport:
    """頻譜設計準則：對比度 Γ(f_cp)/Γ(f_st) 與 Γ 的線性趨勢

    Γ 在整個區間為 0 時對比度無定義，回傳 None。
    """
    peak = argmax_rate(model, bounds, grid_points, rate_cap)
    rate_cp = eval_rate(model, bounds.f_cp, rate_cap)
    xs = np.linspace(bounds.f_min, bounds.f_max, grid_points)
    ys = eval_rate(model, xs, rate_cap)
    slope = float(np.polyfit(xs, ys, 1)[0])
    sign = int(np.sign(slope))
    return GuidelineReport(
        spectrum=spectrum_name(model),
        f_cp=bounds.f_cp,
        f_st=peak.f,
        rate_cp=rate_cp,
        rate_st=peak.rate,
        contrast=rate_cp / peak.rate if peak.rate > 0 else None,
        trend_slope=slope,
        trend_sign=sign,
        increasing_trend=sign > 0,
        cap_hit=peak.capped,
        unit_note=MIXED_UNIT_NOTE if isinstance(model, MixedSpectrum) else None,
    )


def load_tabulated(source: Union[TextIO, Iterable[str], str]) -> TabulatedSpectrum:
    """讀取 "f_GHz,rate_per_us" CSV（標頭列可省略）"""
    if isinstance(source, str):
        source = io.StringIO(source)

    points = []
    for line_no, row in enumerate(csv.reader(source), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        cells = [cell.strip() for cell in row]
        if line_no == 1 and cells == TABULATED_HEADER:
            continue
        if len(cells) != 2:
            raise SpectrumParseError(f"需要 2 個欄位，實際為 {len(cells)}", line_no)
        try:
            f, rate = float(cells[0]), float(cells[1])
        except ValueError:
            raise SpectrumParseError(f"無法解析數值 {cells!r}", line_no)
        if not (math.isfinite(f) and math.isfinite(rate)):
            raise SpectrumParseError("數值必須為有限值", line_no)
        if rate < 0:
            raise SpectrumParseError(f"速率不可為負：{rate}", line_no)
        if f <= 0:
            raise SpectrumParseError(f"頻率必須為正：{f}", line_no)
        if points and f <= points[-1][0]:
            raise SpectrumParseError(f"頻率必須嚴格遞增：{f} <= {points[-1][0]}", line_no)
        points.append((f, rate))

    if len(points) < 2:
        raise SpectrumParseError("至少需要 2 列資料")
    return TabulatedSpectrum(points=tuple(points))


def dump_tabulated(model: TabulatedSpectrum, sink: TextIO, header: bool = True) -> None:
    """寫出可由 load_tabulated 讀回的 CSV"""
    writer = csv.writer(sink, lineterminator="\n")
    if header:
        writer.writerow(TABULATED_HEADER)
    for f, rate in model.points:
        writer.writerow([repr(f), repr(rate)])
