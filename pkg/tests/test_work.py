"""
熱力學功帳測試
"""
import math
import pytest
from app.exceptions import AchievabilityError, PhysicsDomainError
from app.models.physics_models import ControlBounds, Environment, QubitState
from app.physics.constants import LN2
from app.physics.control import ConstantAtPeak, FixedSchedule, TimeLocalOptimal
from app.physics.dynamics import integrate_restore
from app.physics.thermo import entropy, thermal_ratio
from app.physics.work import (
    check_achievability,
    constant_control_work_approx,
    epsilon_min,
    passive_reset_time,
    thermodynamic_length_bound,
    work_integral,
    work_ledger,
)
from tests.conftest import constant_spectrum, make_problem


def restore(problem, law=None, p_e=0.5):
    return integrate_restore(QubitState(p_e=p_e), law or TimeLocalOptimal(), problem)


class TestWorkLedger:
    """work_ledger 測試"""

    def test_no_first_switch_work_at_half_population(self, lorentzian):
        problem = make_problem(lorentzian)
        ledger = work_ledger(restore(problem), problem.bounds, problem.env)
        assert ledger.W_sw1 == 0.0

    def test_first_switch_work_after_decay(self, lorentzian):
        """切換期間衰減後 p_e(0) < 1/2，W_sw1 = (x_0 - x_cp)(p_0 - 1/2)"""
        problem = make_problem(lorentzian)
        trajectory = restore(problem, p_e=0.45)
        ledger = work_ledger(trajectory, problem.bounds, problem.env)
        x_0 = thermal_ratio(trajectory.f[0], problem.env)
        x_cp = thermal_ratio(5.0, problem.env)
        assert ledger.W_sw1 == pytest.approx((x_0 - x_cp) * (0.45 - 0.5), rel=1e-12)

    @pytest.mark.parametrize("law", [TimeLocalOptimal(), ConstantAtPeak()], ids=["time_local", "constant"])
    def test_closure(self, lorentzian, law):
        """W - ΔF = W_ex = ∫ + ΔS"""
        problem = make_problem(lorentzian)
        ledger = work_ledger(restore(problem, law), problem.bounds, problem.env)
        assert ledger.W == pytest.approx(ledger.W_sw1 + ledger.W_st + ledger.W_sw2, rel=1e-12)
        assert ledger.dF == pytest.approx(ledger.dU - ledger.dS, rel=1e-12)
        assert ledger.W_ex == pytest.approx(ledger.W - ledger.dF, rel=1e-9)
        assert ledger.W_ex == pytest.approx(ledger.work_integral + ledger.dS, rel=1e-9)

    def test_entropy_change(self, lorentzian):
        problem = make_problem(lorentzian)
        trajectory = restore(problem)
        ledger = work_ledger(trajectory, problem.bounds, problem.env)
        assert ledger.dS == pytest.approx(entropy(0.5) - entropy(trajectory.p_e[-1]), rel=1e-12)
        assert ledger.dS < 0

    def test_constant_rate_closed_form(self):
        """常數 Γ、ε = 1e-8：W_ex ≈ 0.5·x_st - ln 2"""
        problem = make_problem(constant_spectrum(2.0), temperature=0.002, epsilon=1.0e-8)
        trajectory = restore(problem, ConstantAtPeak())
        ledger = work_ledger(trajectory, problem.bounds, problem.env)
        expected = constant_control_work_approx(2.0, problem.env)
        assert ledger.W_ex == pytest.approx(expected, rel=1e-2)

    def test_nearly_independent_of_epsilon(self, lorentzian):
        """常數控制下 ε 減半，W_ex 變化小於 0.1%"""
        problem = make_problem(lorentzian)
        tighter = make_problem(lorentzian, epsilon=5.0e-6)
        first = work_ledger(restore(problem, ConstantAtPeak()), problem.bounds, problem.env)
        second = work_ledger(restore(tighter, ConstantAtPeak()), tighter.bounds, tighter.env)
        assert second.W_ex == pytest.approx(first.W_ex, rel=1e-3)

    def test_non_negative_excess_work(self, lorentzian, jqf):
        for model in (lorentzian, jqf):
            problem = make_problem(model)
            assert work_ledger(restore(problem), problem.bounds, problem.env).W_ex >= 0.0

    def test_requires_reached_precision(self, lorentzian):
        problem = make_problem(lorentzian, step_limit=2)
        with pytest.raises(ValueError):
            work_ledger(restore(problem), problem.bounds, problem.env)


class TestWorkIntegral:
    """恢復功積分測試"""

    def test_trapezoid_cross_check(self, lorentzian):
        problem = make_problem(lorentzian)
        trajectory = restore(problem)
        exact = work_integral(trajectory, problem.env, "exact")
        trapezoid = work_integral(trajectory, problem.env, "trapezoid")
        assert trapezoid == pytest.approx(exact, rel=1e-3)

    def test_converges_under_step_refinement(self, mixed):
        """step_bound 減半，積分相對變化小於 1e-4"""
        coarse = make_problem(mixed)
        fine = make_problem(mixed, step_bound=0.025)
        a = work_integral(restore(coarse), coarse.env)
        b = work_integral(restore(fine), fine.env)
        assert b == pytest.approx(a, rel=1e-4)

    def test_constant_control_exact(self, lorentzian):
        """常數控制時積分為 x·(p_0 - p_τ)"""
        problem = make_problem(lorentzian)
        trajectory = restore(problem, FixedSchedule(breakpoints=((0.0, 5.0),)))
        x = thermal_ratio(5.0, problem.env)
        assert work_integral(trajectory, problem.env) == pytest.approx(
            x * (trajectory.p_e[0] - trajectory.p_e[-1]), rel=1e-12
        )

    def test_unknown_method(self, lorentzian):
        problem = make_problem(lorentzian)
        with pytest.raises(ValueError):
            work_integral(restore(problem), problem.env, "simpson")


class TestBounds:
    """功與精度下限測試"""

    def test_constant_control_approx_reference_values(self):
        """9.6 mK 時 lz 與 prot 的常數控制近似"""
        env = Environment(temperature=0.0096)
        assert constant_control_work_approx(5.4, env) / LN2 == pytest.approx(18.5, abs=0.1)
        assert constant_control_work_approx(6.5, env) / LN2 == pytest.approx(22.5, abs=0.1)

    def test_constant_control_approx_zero(self, env):
        """x = 2 ln 2 時近似為 0"""
        f = 2.0 * LN2 * env.temperature / 0.04799243
        assert constant_control_work_approx(f, env) == pytest.approx(0.0, abs=1e-12)

    def test_constant_control_approx_domain(self, env):
        with pytest.raises(PhysicsDomainError):
            constant_control_work_approx(0.0, env)

    def test_thermodynamic_length_bound(self):
        assert thermodynamic_length_bound(1.4204) == pytest.approx(1.0)
        assert thermodynamic_length_bound(0.1) == pytest.approx(14.204)
        with pytest.raises(PhysicsDomainError):
            thermodynamic_length_bound(0.0)

    def test_epsilon_min(self, env):
        bounds = ControlBounds()
        x_max = thermal_ratio(8.0, env)
        assert epsilon_min(bounds, env) == pytest.approx(1.0 / (math.exp(x_max) + 1.0), rel=1e-12)

    def test_achievability(self, env):
        assert check_achievability(ControlBounds(), env) == epsilon_min(ControlBounds(), env)
        with pytest.raises(AchievabilityError) as exc_info:
            check_achievability(ControlBounds(epsilon=1.0e-20), env)
        assert "epsilon_min" in exc_info.value.message
        assert exc_info.value.exit_code == 2

    def test_passive_reset_time(self, lorentzian, protected, env, bounds):
        rate = 1.0 / 0.202812
        assert passive_reset_time(lorentzian, bounds, env, 1.0e6) == pytest.approx(math.log(0.5 / 1e-5) / rate, rel=1e-4)
        assert math.isinf(passive_reset_time(protected, bounds, env, 1.0e6))
