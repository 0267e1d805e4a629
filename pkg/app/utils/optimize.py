"""
一維最大化工具：網格掃描加黃金分割細化
"""
import math
from typing import Callable, Tuple
import numpy as np

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


def golden_section_maximize(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-6,
) -> Tuple[float, float]:
    """在 [a, b] 上以黃金分割搜尋單峰函數的最大值

    相等時向較小的 x 收斂。
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        return a, f(a)

    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)

    for _ in range(n - 1):
        if yc >= yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    if yc >= yd:
        return c, yc
    return d, yd


def grid_golden_maximize(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    grid_points: int = 4001,
    xtol: float = 1e-6,
) -> Tuple[float, float]:
    """在 [lo, hi] 上求 f 的最大值

    先以等距網格掃描（f 需可向量化），再於最佳網格點的相鄰區間內做黃金分割細化。
    結果與網格上的最佳點比較，相等時取較小的 x，故結果對固定網格是確定的。
    """
    xs = np.linspace(lo, hi, grid_points)
    ys = np.asarray(f(xs), dtype=float)
    i = int(np.argmax(ys))
    best_x, best_y = float(xs[i]), float(ys[i])

    left = float(xs[max(i - 1, 0)])
    right = float(xs[min(i + 1, grid_points - 1)])

    def scalar(x: float) -> float:
        return float(f(np.asarray(x)))

    x_ref, y_ref = golden_section_maximize(scalar, left, right, xtol)
    if y_ref > best_y or (y_ref == best_y and x_ref < best_x):
        best_x, best_y = x_ref, y_ref
    return best_x, best_y
