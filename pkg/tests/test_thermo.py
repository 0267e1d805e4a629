"""
熱環境函數測試
"""
import math
import numpy as np
import pytest
from pydantic import ValidationError
from app.exceptions import PhysicsDomainError
from app.models.physics_models import Environment
from app.physics.thermo import entropy, equilibrium_population, occupation, thermal_ratio


class TestThermalRatio:
    """thermal_ratio 測試"""

    def test_value(self, env):
        """x = 0.04799243·f/T"""
        assert thermal_ratio(5.0, env) == pytest.approx(23.996215, rel=1e-12)

    def test_scalar_and_array(self, env):
        """純量輸入回傳 float，陣列輸入回傳陣列"""
        assert isinstance(thermal_ratio(5.0, env), float)
        assert thermal_ratio(np.array([1.0, 2.0]), env).shape == (2,)

    def test_strictly_increasing(self, env):
        """固定溫度下對 f 嚴格遞增"""
        x = thermal_ratio(np.linspace(0.1, 10.0, 100), env)
        assert np.all(np.diff(x) > 0)

    def test_zero_temperature_rejected(self):
        """T = 0 在建構時被拒絕"""
        with pytest.raises(ValidationError):
            Environment(temperature=0.0)


class TestOccupation:
    """佔據數與平衡布居測試"""

    def test_occupation_at_ln2(self):
        """n(ln 2) = 1"""
        assert occupation(math.log(2.0)) == pytest.approx(1.0, rel=1e-12)

    def test_occupation_domain(self):
        """x <= 0 為定義域錯誤"""
        with pytest.raises(PhysicsDomainError):
            occupation(0.0)

    def test_equilibrium_population_values(self):
        """p_eq(0) = 1/2，p_eq(ln 3) = 1/4"""
        assert equilibrium_population(0.0) == 0.5
        assert equilibrium_population(math.log(3.0)) == pytest.approx(0.25, rel=1e-12)

    def test_equilibrium_matches_occupation(self):
        """p_eq = n/(2n+1)"""
        x = np.array([0.1, 1.0, 5.0, 20.0])
        n = occupation(x)
        np.testing.assert_allclose(equilibrium_population(x), n / (2 * n + 1), rtol=1e-12)

    def test_large_ratio_no_overflow(self):
        """極大的 x 不溢位"""
        assert equilibrium_population(1.0e6) == 0.0


class TestEntropy:
    """熵函數測試"""

    def test_maximum_entropy(self):
        """S(1/2) = -ln 2"""
        assert entropy(0.5) == pytest.approx(-math.log(2.0), rel=1e-12)

    def test_endpoints(self):
        """端點取 0"""
        assert entropy(0.0) == 0.0
        assert entropy(1.0) == 0.0

    def test_non_positive(self):
        """S <= 0"""
        assert np.all(entropy(np.linspace(0.0, 1.0, 101)) <= 0.0)
