import sys
from pathlib import Path

import mpmath as mp
import pytest
from hypothesis import HealthCheck, settings

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from series_engine import HoloSeries, Precision  # noqa: E402
from surface_models import RadialProfile, RadialSurface, ModelSurface, sample_surface  # noqa: E402

CONFIGS = ROOT / 'configs'

settings.register_profile('crflow', deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
settings.load_profile('crflow')


@pytest.fixture(autouse=True)
def working_precision():
    with mp.workprec(192):
        yield


@pytest.fixture
def prec():
    return Precision(192)


@pytest.fixture
def identity_series(prec):
    return HoloSeries.from_pairs([[1, 0]], prec)


@pytest.fixture
def profile():
    return RadialProfile()


def build_model(alpha, prec, a=None, q_poly=()):
    a = a or HoloSeries.from_pairs([[1, 0]], prec)
    return ModelSurface.build(a, alpha, RadialProfile(q_poly=q_poly), '0.15', '0.3', prec)


@pytest.fixture
def model1(prec):
    return build_model(1, prec)


@pytest.fixture
def model0(prec):
    return build_model(0, prec)


@pytest.fixture(params=[0, 1], ids=['alpha0', 'alpha1'])
def model(request, prec):
    return build_model(request.param, prec)


@pytest.fixture
def radial(prec):
    return RadialSurface(RadialProfile(), ((2, 0, 1), (0, 2, 1)), precision=prec)


@pytest.fixture
def points(model):
    return sample_surface(model, 12, (mp.mpf('0.02'), mp.mpf('0.1')), (mp.mpf('-0.2'), mp.mpf('0.2')), 7)
