"""
穩健性分析測試
"""
import math
import pytest
from app.exceptions import PhysicsDomainError
from app.models.physics_models import QubitState
from app.models.scenario_models import CoherenceDeviation, ControlTimeDeviation, PopulationDeviation
from app.physics.dynamics import decoherence_factor
from app.physics.robustness import (
    axis_values,
    fidelity,
    fidelity_sweep,
    run_deviation,
    sensitivity_report,
)
from app.services.robustness_service import RobustnessService
from app.services.scenario_service import ScenarioService

EPSILON = 1.0e-5


@pytest.fixture
def baseline(builtin_run):
    _, trajectory, _ = builtin_run("lz-default")
    return trajectory


class TestFidelity:
    """保真度閉式解測試"""

    def test_target_state(self):
        assert fidelity(QubitState(p_e=EPSILON), EPSILON) == pytest.approx(1.0, abs=1e-12)

    def test_inverted_state(self):
        """ρ = diag(ε, 1-ε) 時 F = 4ε(1-ε)"""
        value = fidelity(QubitState(p_e=1.0 - EPSILON), EPSILON)
        assert value == pytest.approx(4 * EPSILON * (1 - EPSILON), rel=1e-9)

    def test_pure_superposition(self):
        assert fidelity(QubitState(p_e=0.5, p_r=0.5), 1.0e-12) == pytest.approx(0.5, abs=1e-5)

    def test_in_unit_interval(self):
        for p in (0.0, 0.2, 0.5, 1.0):
            assert 0.0 <= fidelity(QubitState(p_e=p), EPSILON) <= 1.0

    def test_positivity_violation(self):
        state = QubitState.model_construct(p_e=0.5, p_r=0.6, p_i=0.0)
        with pytest.raises(PhysicsDomainError):
            fidelity(state, EPSILON)

    def test_state_validation(self):
        with pytest.raises(ValueError):
            QubitState(p_e=0.5, p_r=0.6)


class TestDeviations:
    """偏差重播測試"""

    def test_baseline_replay(self, baseline):
        final, _ = run_deviation(PopulationDeviation(p=0.5), baseline, EPSILON)
        assert final.p_e == pytest.approx(baseline.p_e[-1], abs=1e-9)

    def test_half_population(self, baseline):
        _, value = run_deviation(PopulationDeviation(p=0.5), baseline, EPSILON)
        assert value >= 1 - 2 * EPSILON

    def test_fully_excited(self, baseline):
        """p = 1 時終態 p_e <= 2ε"""
        final, value = run_deviation(PopulationDeviation(p=1.0), baseline, EPSILON)
        assert final.p_e <= 2 * EPSILON
        assert value > 0.9999

    def test_maximal_coherence(self, baseline):
        """|c| = 1/2 時 |ρ_eg(τ)| <= 0.5·√(2ε)"""
        final, value = run_deviation(CoherenceDeviation(c_abs=0.5), baseline, EPSILON)
        assert final.coherence_abs <= 0.5 * math.sqrt(2 * EPSILON) * (1 + 1e-6)
        assert value > 0.999

    def test_coherence_phase_irrelevant(self, baseline):
        a, _ = run_deviation(CoherenceDeviation(c_abs=0.3), baseline, EPSILON)
        b, _ = run_deviation(CoherenceDeviation(c_abs=0.3, c_phase=1.0), baseline, EPSILON)
        assert b.coherence_abs == pytest.approx(a.coherence_abs, rel=1e-9)

    def test_control_time_too_negative(self, baseline):
        with pytest.raises(ValueError):
            run_deviation(ControlTimeDeviation(delta_tau=-2 * baseline.tau_st), baseline, EPSILON)

    def test_longer_control_time_improves(self, baseline):
        short, _ = run_deviation(ControlTimeDeviation(delta_tau=-0.1 * baseline.tau_st), baseline, EPSILON)
        long, _ = run_deviation(ControlTimeDeviation(delta_tau=0.1 * baseline.tau_st), baseline, EPSILON)
        assert long.p_e < baseline.p_e[-1] < short.p_e


class TestSensitivity:
    """靈敏度報告測試"""

    def test_population_matches_eta(self, baseline):
        report = sensitivity_report(baseline, EPSILON)
        assert report.population.dynamics_relative_error < 1e-4
        assert report.eta_tau == pytest.approx(decoherence_factor(baseline)(baseline.tau_st))

    def test_coherence_follows_sqrt_eta(self, baseline):
        """相干靈敏度為 √η 而非 η"""
        report = sensitivity_report(baseline, EPSILON)
        assert report.coherence.dynamics_relative_error < 1e-4
        assert report.coherence.finite_difference == pytest.approx(math.sqrt(report.eta_tau), rel=1e-4)
        assert report.coherence_discrepancy

    def test_control_time_matches_terminal_gap(self, baseline):
        report = sensitivity_report(baseline, EPSILON)
        assert report.control_time.dynamics_relative_error < 1e-2
        assert report.control_time.stated_relative_error < 1e-2

    @pytest.mark.parametrize("name", ["lz-default", "prot-default", "mix-default", "jqf-default"])
    def test_builtin_scenarios(self, builtin_run, name):
        """四個內建情境：∂p_out/∂p_in = η，相干為 √η，控制時間與終端差距一致"""
        _, trajectory, problem = builtin_run(name)
        report = sensitivity_report(trajectory, problem.bounds.epsilon)
        assert report.population.dynamics_relative_error < 1e-4
        assert report.population.finite_difference == pytest.approx(report.eta_tau, rel=1e-4)
        assert report.coherence.dynamics_relative_error < 1e-4
        assert report.coherence_discrepancy
        assert report.control_time.dynamics_relative_error < 1e-3


class TestFidelitySweep:
    """保真度曲線測試"""

    def test_population_axis(self, baseline):
        curve = fidelity_sweep(baseline, EPSILON, "population", 11)
        assert len(curve.points) == 11
        assert curve.points[0].deviation_value == 0.0
        assert curve.points[-1].deviation_value == 1.0
        assert curve.min_fidelity > 0.9999

    def test_coherence_axis(self, baseline):
        curve = fidelity_sweep(baseline, EPSILON, "coherence", 6)
        assert curve.points[0].fidelity >= curve.points[-1].fidelity
        assert curve.min_fidelity > 0.999

    def test_control_time_axis_range(self, baseline):
        values = axis_values("control_time", baseline.tau_st, 12)
        assert values[0] == pytest.approx(-0.5 * baseline.tau_st)
        assert values[-1] == pytest.approx(5.0 * baseline.tau_st)

    def test_too_few_points(self, baseline):
        with pytest.raises(ValueError):
            fidelity_sweep(baseline, EPSILON, "population", 1)

    def test_unknown_axis(self):
        with pytest.raises(ValueError):
            axis_values("phase", 1.0, 5)


class TestRobustnessService:
    """穩健性服務測試"""

    @pytest.mark.parametrize("name", ["lz-default", "prot-default", "mix-default", "jqf-default"])
    def test_population_robust_for_builtin_scenarios(self, builtin_run, name):
        _, trajectory, problem = builtin_run(name)
        curve = fidelity_sweep(trajectory, problem.bounds.epsilon, "population", 11)
        assert curve.min_fidelity > 0.9999

    def test_fidelity_curves_and_cache(self):
        service = RobustnessService()
        scenario = ScenarioService().builtin("lz-default")
        curves = service.fidelity_curves(scenario, n_points=5)
        assert set(curves) == {"population", "coherence", "control_time"}
        assert len(service._baselines) == 1
        service.sensitivity(scenario)
        assert len(service._baselines) == 1
