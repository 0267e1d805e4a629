"""
退相干率頻譜模型

四種參考頻譜與表格化頻譜。每個模型提供未截斷的 Γ(f)，
截斷與定義域檢查在 physics.spectra.eval_rate 中處理。
"""
from functools import cached_property
from typing import Annotated, List, Literal, Tuple, Union
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from ..exceptions import SpectrumRangeError
from ..physics.constants import ANGULAR_PER_GHZ


class _Spectrum(BaseModel):
    """頻譜基礎類別"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    def rate_uncapped(self, f: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def check_domain(self, f: np.ndarray) -> None:
        """檢查頻率是否在模型定義域內"""
        return None


class LorentzianSpectrum(_Spectrum):
    """(a) 羅倫茲頻譜（Purcell 共振峰）"""

    kind: Literal["lorentzian"] = "lorentzian"
    g: float = Field(0.107, gt=0, description="耦合強度，GHz")
    kappa: float = Field(0.044, gt=0, description="共振腔線寬，GHz")
    f_r: float = Field(5.4, gt=0, description="共振頻率，GHz")

    def rate_uncapped(self, f: np.ndarray) -> np.ndarray:
        detuning = (np.asarray(f, dtype=float) - self.f_r) * ANGULAR_PER_GHZ
        g = self.g * ANGULAR_PER_GHZ
        half_kappa = 0.5 * self.kappa * ANGULAR_PER_GHZ
        peak = g * g / (self.kappa * ANGULAR_PER_GHZ)
        return peak * half_kappa**2 / (detuning**2 + half_kappa**2)


class ProtectedSpectrum(_Spectrum):
    """(b) 帶保護的羅倫茲頻譜（f_F 處為零、f_R 處發散）"""

    kind: Literal["protected"] = "protected"
    kappa: float = Field(0.005, gt=0, description="GHz")
    g: float = Field(0.150, gt=0, description="GHz")
    f_F: float = Field(5.0, gt=0, description="濾波器頻率，GHz")
    f_R: float = Field(6.5, gt=0, description="讀取共振腔頻率，GHz")

    @model_validator(mode="after")
    def _check_distinct(self) -> "ProtectedSpectrum":
        if self.f_F == self.f_R:
            raise ValueError("f_F 與 f_R 不可相同")
        return self

    def rate_uncapped(self, f: np.ndarray) -> np.ndarray:
        w = np.asarray(f, dtype=float) * ANGULAR_PER_GHZ
        w_f = self.f_F * ANGULAR_PER_GHZ
        w_r = self.f_R * ANGULAR_PER_GHZ
        kappa = self.kappa * ANGULAR_PER_GHZ
        g = self.g * ANGULAR_PER_GHZ
        numerator = 4.0 * kappa * g * g * w_r**3 * (w_f**2 - w**2) ** 2
        denominator = w * (w_r**2 - w_f**2) ** 2 * (w_r**2 - w**2) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            rate = numerator / denominator
        return np.where(denominator == 0.0, np.inf, rate)


class MixedSpectrum(_Spectrum):
    """(c) 混合頻譜：1/f 磁通雜訊、介電損耗、Purcell 與其他通道

    參數與頻率皆以原始數值代入（頻率單位 2π×GHz，速率 µs⁻¹）。
    """

    kind: Literal["mixed"] = "mixed"
    C_phi: float = Field(0.5, gt=0)
    C_Q: float = Field(0.001, gt=0)
    C_purcell: float = Field(0.08, gt=0)
    f_r: float = Field(8.27, gt=0)
    kappa: float = Field(0.0015, gt=0)
    C_other: float = Field(0.02, gt=0)

    def rate_uncapped(self, f: np.ndarray) -> np.ndarray:
        w = np.asarray(f, dtype=float)
        purcell = self.C_purcell * self.kappa**2 / ((w - self.f_r) ** 2 + self.kappa**2)
        return self.C_phi / w**0.9 + self.C_Q * w + purcell + self.C_other


class JQFSpectrum(_Spectrum):
    """(d) Josephson 量子濾波器頻譜"""

    kind: Literal["jqf"] = "jqf"
    tau0: float = Field(9.1, gt=0, description="µs")
    tau: float = Field(98.0, gt=0, description="µs")
    four_kappa_j: float = Field(0.0508, gt=0, description="GHz")
    f_0: float = Field(5.011, gt=0, description="GHz")

    def rate_uncapped(self, f: np.ndarray) -> np.ndarray:
        detuning = (np.asarray(f, dtype=float) - self.f_0) * ANGULAR_PER_GHZ
        width = self.four_kappa_j * ANGULAR_PER_GHZ
        lorentz = width**2 / (detuning**2 + width**2)
        return 1.0 / (self.tau0 + self.tau * lorentz)


class TabulatedSpectrum(_Spectrum):
    """表格化頻譜，(f_GHz, rate_per_us) 線性內插"""

    kind: Literal["tabulated"] = "tabulated"
    points: Tuple[Tuple[float, float], ...] = Field(..., min_length=2)

    @model_validator(mode="after")
    def _check_points(self) -> "TabulatedSpectrum":
        freqs = [p[0] for p in self.points]
        rates = [p[1] for p in self.points]
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValueError("表格頻率必須嚴格遞增")
        if any(r < 0 or not np.isfinite(r) for r in rates):
            raise ValueError("表格速率必須為有限的非負值")
        if freqs[0] <= 0:
            raise ValueError("表格頻率必須為正")
        return self

    @cached_property
    def frequencies(self) -> np.ndarray:
        return np.array([p[0] for p in self.points], dtype=float)

    @cached_property
    def rates(self) -> np.ndarray:
        return np.array([p[1] for p in self.points], dtype=float)

    def check_domain(self, f: np.ndarray) -> None:
        f = np.asarray(f, dtype=float)
        lo, hi = self.points[0][0], self.points[-1][0]
        if np.any(f < lo) or np.any(f > hi):
            raise SpectrumRangeError(f"頻率超出表格範圍 [{lo}, {hi}] GHz")

    def rate_uncapped(self, f: np.ndarray) -> np.ndarray:
        return np.interp(np.asarray(f, dtype=float), self.frequencies, self.rates)


SpectrumModel = Annotated[
    Union[LorentzianSpectrum, ProtectedSpectrum, MixedSpectrum, JQFSpectrum, TabulatedSpectrum],
    Field(discriminator="kind"),
]

BUILTIN_SPECTRA = {
    "lz": LorentzianSpectrum,
    "prot": ProtectedSpectrum,
    "mix": MixedSpectrum,
    "jqf": JQFSpectrum,
}

SPECTRUM_NAMES: List[str] = list(BUILTIN_SPECTRA)
