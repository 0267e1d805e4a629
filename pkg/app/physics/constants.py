"""
單位約定與物理常數

頻率以循環 GHz（f = ω/2π）表示，時間以 µs，速率以 µs⁻¹，
能量以 k_B·T 的倍數（無因次）表示。
"""
import math

# h / k_B，單位 K / GHz
H_OVER_KB_K_PER_GHZ = 0.04799243

# 1 GHz 循環頻率對應的角頻率，單位 µs⁻¹
ANGULAR_PER_GHZ = 2.0 * math.pi * 1.0e3

LN2 = math.log(2.0)

# 熱力學長度下限常數（常數速率環境）
THERMODYNAMIC_LENGTH_CONSTANT = 1.4204

# 情境預設值
DEFAULT_TEMPERATURE_K = 0.010
DEFAULT_F_CP_GHZ = 5.0
DEFAULT_DELTA_F_GHZ = 3.0
DEFAULT_TAU_SW_US = 0.010
DEFAULT_EPSILON = 1.0e-5
