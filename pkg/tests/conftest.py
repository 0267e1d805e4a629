"""
共用測試夾具
"""
import pytest
from app.models.physics_models import ControlBounds, Environment
from app.models.scenario_models import Numerics, ResetProblem
from app.models.spectrum_models import (
    JQFSpectrum,
    LorentzianSpectrum,
    MixedSpectrum,
    ProtectedSpectrum,
    TabulatedSpectrum,
)
from app.services.reset_service import ResetService
from app.services.scenario_service import ScenarioService

_RUN_CACHE = {}


def make_problem(model, temperature=0.010, epsilon=1e-5, **numerics):
    """以預設控制範圍建立問題"""
    return ResetProblem(
        model=model,
        env=Environment(temperature=temperature),
        bounds=ControlBounds(epsilon=epsilon),
        numerics=Numerics(**numerics),
    )


def constant_spectrum(rate=2.0):
    """[1, 10] GHz 上的常數速率表格化頻譜"""
    return TabulatedSpectrum(points=((1.0, rate), (10.0, rate)))


@pytest.fixture
def lorentzian():
    return LorentzianSpectrum()


@pytest.fixture
def protected():
    return ProtectedSpectrum()


@pytest.fixture
def mixed():
    return MixedSpectrum()


@pytest.fixture
def jqf():
    return JQFSpectrum()


@pytest.fixture
def bounds():
    return ControlBounds()


@pytest.fixture
def env():
    return Environment(temperature=0.010)


@pytest.fixture(scope="session")
def builtin_run():
    """執行內建情境並快取 (report, trajectory, problem)"""

    def run(name):
        if name not in _RUN_CACHE:
            scenario = ScenarioService().builtin(name)
            _RUN_CACHE[name] = ResetService().run_scenario(scenario)
        return _RUN_CACHE[name]

    return run
