"""
熱環境函數：ħω/(k_B T)、佔據數、平衡布居與熵
"""
from typing import Union
import numpy as np
from scipy.special import expit, xlogy
from ..exceptions import PhysicsDomainError
from ..models.physics_models import Environment

ArrayLike = Union[float, np.ndarray]


def thermal_ratio(f: ArrayLike, env: Environment) -> ArrayLike:
    """x = ħω/(k_B T) = 0.04799243·f[GHz]/T[K]"""
    x = np.asarray(f, dtype=float) * env.ratio_per_GHz
    return x if np.ndim(f) else float(x)


def occupation(x: ArrayLike) -> ArrayLike:
    """環境平均佔據數 n = 1/(e^x - 1)"""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise PhysicsDomainError("x <= 0 時佔據數發散")
    n = 1.0 / np.expm1(x_arr)
    return n if np.ndim(x) else float(n)


def equilibrium_population(x: ArrayLike) -> ArrayLike:
    """熱平衡激發態布居 p_eq = 1/(e^x + 1)，大 x 時不溢位"""
    p = expit(-np.asarray(x, dtype=float))
    return p if np.ndim(x) else float(p)


def entropy(p_e: ArrayLike) -> ArrayLike:
    """S/k_B = p ln p + (1-p) ln(1-p)，端點取 0（非正值約定）"""
    p = np.asarray(p_e, dtype=float)
    s = xlogy(p, p) + xlogy(1.0 - p, 1.0 - p)
    return s if np.ndim(p_e) else float(s)
