"""
控制律、協態與最小原理檢驗測試
"""
import math
import numpy as np
import pytest
from pydantic import TypeAdapter, ValidationError
from app.exceptions import DegenerateTransversalityError, NoDescentError
from app.models.physics_models import QubitState
from app.models.result_models import TerminationCause, Trajectory
from app.models.spectrum_models import (
    JQFSpectrum,
    LorentzianSpectrum,
    MixedSpectrum,
    ProtectedSpectrum,
    TabulatedSpectrum,
)
from app.physics.control import (
    ConstantAtPeak,
    ControlLaw,
    FixedSchedule,
    TimeLocalOptimal,
    constant_restore_frequency,
    costate_along,
    optimal_frequency,
    verify_pmp,
)
from app.physics.dynamics import integrate_restore
from app.physics.spectra import argmax_rate
from tests.conftest import constant_spectrum, make_problem


def restore(problem, law=None):
    return integrate_restore(QubitState(p_e=0.5), law or TimeLocalOptimal(), problem)


class TestOptimalFrequency:
    """ω*(p_e) 測試"""

    def test_lorentzian_peak(self, lorentzian):
        assert optimal_frequency(0.5, make_problem(lorentzian)) == pytest.approx(5.4, abs=1e-5)

    def test_jqf_lower_bound_at_low_temperature(self, jqf):
        """7 mK 時 p_eq(2 GHz) 可忽略，JQF 取下界"""
        assert optimal_frequency(0.4, make_problem(jqf, temperature=0.007)) == 2.0

    def test_jqf_leaves_lower_bound_near_equilibrium(self, jqf):
        """p_e 接近 p_eq(f_min) 時離開下界"""
        assert optimal_frequency(1.05e-5, make_problem(jqf)) > 2.0

    def test_jqf_upper_bound_at_reference_temperature(self, jqf):
        """10 mK 時熱布居差距大於 Γ 的兩端差距"""
        assert optimal_frequency(0.4, make_problem(jqf)) == 8.0

    def test_monotone_objective_upper_bound(self):
        """常數 Γ 時目標函數隨 f 遞增，取上界"""
        problem = make_problem(constant_spectrum(1.0), temperature=0.1)
        assert optimal_frequency(0.5, problem) == pytest.approx(8.0, abs=1e-6)

    @pytest.mark.parametrize(
        "model",
        [LorentzianSpectrum(), ProtectedSpectrum(), MixedSpectrum(), JQFSpectrum()],
        ids=["lz", "prot", "mix", "jqf"],
    )
    def test_zero_temperature_limit(self, model):
        """T → 0 時 ω* 與 argmax Γ 一致"""
        problem = make_problem(model, temperature=1.0e-6)
        peak = argmax_rate(model, problem.bounds)
        for p_e in (0.5, 1.0e-3, 1.0e-4):
            assert optimal_frequency(p_e, problem) == pytest.approx(peak.f, abs=1.0e-4)

    def test_invariant_under_rate_scaling(self):
        """Γ 乘以正常數不改變 ω*"""
        tent = ((2.0, 0.0), (5.0, 1.0), (8.0, 0.0))
        scaled = tuple((f, 4.0 * r) for f, r in tent)
        base = optimal_frequency(0.3, make_problem(TabulatedSpectrum(points=tent), temperature=0.1))
        other = optimal_frequency(0.3, make_problem(TabulatedSpectrum(points=scaled), temperature=0.1))
        assert base == other

    def test_no_descent(self, lorentzian):
        """p_e 低於所有 p_eq 時無法下降"""
        with pytest.raises(NoDescentError):
            optimal_frequency(0.0, make_problem(lorentzian))

    def test_invalid_population(self, lorentzian):
        with pytest.raises(ValueError):
            optimal_frequency(1.5, make_problem(lorentzian))

    def test_constant_restore_frequency(self, mixed):
        assert constant_restore_frequency(make_problem(mixed)) == 2.0


class TestControlLaws:
    """控制律模型測試"""

    def test_discriminated_union(self):
        adapter = TypeAdapter(ControlLaw)
        law = adapter.validate_python({"kind": "schedule", "breakpoints": [[0.0, 3.0], [1.0, 4.0]]})
        assert isinstance(law, FixedSchedule)
        assert isinstance(adapter.validate_python({"kind": "constant"}), ConstantAtPeak)
        assert isinstance(adapter.validate_python({"kind": "time_local"}), TimeLocalOptimal)

    def test_schedule_must_increase(self):
        with pytest.raises(ValidationError):
            FixedSchedule(breakpoints=((0.0, 3.0), (0.0, 4.0)))

    def test_schedule_negative_time(self):
        with pytest.raises(ValidationError):
            FixedSchedule(breakpoints=((-1.0, 3.0),))

    def test_schedule_lookup(self, lorentzian):
        """第一個斷點之前沿用第一個頻率"""
        policy = FixedSchedule(breakpoints=((0.5, 3.0), (1.0, 4.0))).bind(make_problem(lorentzian))
        assert policy.frequency(0.0, 0.5) == 3.0
        assert policy.frequency(1.0, 0.5) == 4.0
        assert policy.next_change(0.5) == 1.0
        assert math.isinf(policy.next_change(1.0))

    def test_from_trajectory_replays_time_local(self, lorentzian):
        """時間局部最佳軌跡轉為排程後重播得到相同 τ_st"""
        problem = make_problem(lorentzian)
        trajectory = restore(problem)
        replay = restore(problem, FixedSchedule.from_trajectory(trajectory))
        assert replay.tau_st == pytest.approx(trajectory.tau_st, rel=1e-6)

    def test_constant_law_labels(self):
        assert ConstantAtPeak().label() == "constant"
        assert TimeLocalOptimal().label() == "time_local"


class TestCostate:
    """協態重建測試"""

    def test_constant_rate_closed_form(self):
        """常數 Γ 時 λ(t) = λ(τ)·exp(-Γ(τ - t))"""
        problem = make_problem(constant_spectrum(2.0), temperature=0.001)
        trajectory = restore(problem, ConstantAtPeak())
        costate = costate_along(trajectory, problem)
        tau = trajectory.tau_st
        lam_tau = costate.lam[-1]
        for t, lam in zip(costate.t, costate.lam):
            assert lam == pytest.approx(lam_tau * math.exp(-2.0 * (tau - t)), rel=1e-8)

    def test_transversality(self, lorentzian):
        """λ(τ)·Γ(p_e - p_eq) = 1，且 𝓗(τ) = 0"""
        problem = make_problem(lorentzian)
        trajectory = restore(problem)
        costate = costate_along(trajectory, problem)
        assert costate.lam[-1] * trajectory.rate[-1] * (trajectory.p_e[-1] - trajectory.p_eq[-1]) == pytest.approx(1.0)
        assert costate.hamiltonian[-1] == 0.0

    def test_hamiltonian_conserved_for_constant_control(self):
        problem = make_problem(constant_spectrum(2.0), temperature=0.001)
        costate = costate_along(restore(problem, ConstantAtPeak()), problem)
        assert np.max(np.abs(costate.hamiltonian)) < 1e-9

    def test_requires_reached_precision(self, lorentzian):
        problem = make_problem(lorentzian, step_limit=2)
        with pytest.raises(ValueError):
            costate_along(restore(problem), problem)

    def test_degenerate_terminal_rate(self, lorentzian):
        trajectory = Trajectory(
            t=[0.0, 1.0],
            f=[5.0, 5.0],
            p_e=[0.5, 1e-5],
            p_r=[0.0, 0.0],
            p_i=[0.0, 0.0],
            rate=[1.0, 0.0],
            p_eq=[0.0, 0.0],
            tau_st=1.0,
            termination=TerminationCause.PRECISION_REACHED,
        )
        with pytest.raises(DegenerateTransversalityError):
            costate_along(trajectory, make_problem(lorentzian))


class TestVerifyPMP:
    """最小原理檢驗測試"""

    def test_time_local_lorentzian_passes(self, lorentzian):
        problem = make_problem(lorentzian)
        trajectory = restore(problem)
        report = verify_pmp(trajectory, costate_along(trajectory, problem), problem)
        assert report.passed
        assert report.lambda_positive
        assert report.max_abs_hamiltonian < 1e-3
        assert report.checked_times == 64

    @pytest.mark.parametrize("name", ["lz-default", "prot-default", "mix-default", "jqf-default"])
    def test_builtin_scenarios_pass(self, builtin_run, name):
        _, trajectory, problem = builtin_run(name)
        costate = costate_along(trajectory, problem)
        report = verify_pmp(trajectory, costate, problem)
        assert report.lambda_positive
        assert report.hamiltonian_ok
        assert report.pointwise_minimal

    def test_constant_at_peak_lorentzian_passes(self, lorentzian):
        problem = make_problem(lorentzian)
        trajectory = restore(problem, ConstantAtPeak())
        report = verify_pmp(trajectory, costate_along(trajectory, problem), problem)
        assert report.pointwise_minimal

    def test_schedule_at_computational_frequency_fails(self, lorentzian):
        """停在 f_cp 不滿足逐點最小性"""
        problem = make_problem(lorentzian)
        trajectory = restore(problem, FixedSchedule(breakpoints=((0.0, 5.0),)))
        report = verify_pmp(trajectory, costate_along(trajectory, problem), problem)
        assert not report.pointwise_minimal
        assert report.violations > 0
        assert not report.passed

    def test_constant_at_peak_jqf_fails(self, jqf):
        """JQF 在 f_min 的常數控制接近 ε 時不再最佳"""
        problem = make_problem(jqf, temperature=0.007)
        trajectory = restore(problem, ConstantAtPeak())
        assert trajectory.f[0] == 2.0
        report = verify_pmp(trajectory, costate_along(trajectory, problem), problem)
        assert not report.pointwise_minimal

    def test_check_count_limited_by_samples(self, lorentzian):
        problem = make_problem(lorentzian)
        trajectory = restore(problem)
        report = verify_pmp(trajectory, costate_along(trajectory, problem), problem, check_times=10_000)
        assert report.checked_times == len(trajectory)

    def test_seeded(self, lorentzian):
        problem = make_problem(lorentzian)
        trajectory = restore(problem, FixedSchedule(breakpoints=((0.0, 5.0),)))
        costate = costate_along(trajectory, problem)
        assert verify_pmp(trajectory, costate, problem) == verify_pmp(trajectory, costate, problem)
