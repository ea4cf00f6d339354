import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from conftest import CONFIGS, build_model
from errors import ConfigError, DomainError, GuardError, SingularDerivativeError
from series_engine import HoloSeries
from surface_models import (
    FIELDS, ModelSurface, RadialProfile, RadialSurface, load_model, sample_surface,
)
from utils import load_json_config

ANNULUS = (mp.mpf('0.02'), mp.mpf('0.1'))
T_RANGE = (mp.mpf('-0.2'), mp.mpf('0.2'))

angle = st.floats(0, 6.28)
radius = st.floats(0.02, 0.1)
time = st.floats(-0.2, 0.2)


def test_profile_g_vanishes_at_origin(profile):
    assert profile.g(0) == 0
    assert mp.almosteq(profile.g(mp.mpf('0.1')), mp.exp(-10))


def test_profile_rejects_bad_parameters():
    with pytest.raises(ValueError):
        RadialProfile(c=0)
    with pytest.raises(ValueError):
        RadialProfile(q_poly=(1, 2))
    with pytest.raises(ValueError):
        RadialProfile(family='callable', p_func=lambda r: -1 / r)


def test_callable_profile_matches_inverse_power():
    f = RadialProfile(family='callable', p_func=lambda r: -1 / r, dp_func=lambda r: 1 / r ** 2)
    r = mp.mpf('0.03')
    assert mp.almosteq(f.p(r), RadialProfile().p(r))
    assert mp.almosteq(f.dp(r), RadialProfile().dp(r))


def test_fields_at_origin(model):
    assert model.eval_R(0) == 0
    assert model.eval_Q0(0) == 0
    assert model.eval_P1(0) == 0
    assert model.eval_P(0) == 0


def test_eval_R_for_identity_series(model1):
    z2 = mp.mpc('0.05', '0.03')
    assert mp.almosteq(model1.eval_R(z2), -mp.mpf('0.05'))


def test_outside_domain(model1):
    with pytest.raises(DomainError, match="outside eps0"):
        model1.eval_R(mp.mpc('0.2'))


def test_boundary_point_is_inside(model1):
    model1.eval_R(model1.eps0 * mp.expj(mp.mpf('0.3')))


def test_P_equals_P1_for_alpha_zero(model0):
    z2 = mp.mpc('0.04', '-0.02')
    assert model0.eval_P(z2) == model0.eval_P1(z2)


def test_P_for_alpha_one(model1):
    z2 = mp.mpc('0.04', '-0.02')
    assert mp.almosteq(model1.eval_P(z2), mp.log1p(model1.eval_P1(z2)))


def test_F_at_zero_time(model):
    assert model.eval_F(mp.mpc('0.05'), 0) == 0


def test_F_over_t_tends_to_Q0(model):
    z2 = mp.mpc('0.05', '0.01')
    small = model.eval_Q_from_F(z2, mp.mpf('1e-30'))
    assert abs(small - model.eval_Q0(z2)) <= mp.mpf('1e-25')
    assert model.eval_Q_from_F(z2, 0) == model.eval_Q0(z2)


def test_alpha_zero_F_is_linear_in_t(model0):
    z2 = mp.mpc('0.05', '0.01')
    assert mp.almosteq(model0.eval_F(z2, mp.mpf('0.2')), 2 * model0.eval_F(z2, mp.mpf('0.1')))


@given(t=time)
@settings(max_examples=10, deadline=None)
def test_F_t_matches_numerical_derivative(model, t):
    z2 = mp.mpc('0.04', '-0.03')
    numeric = mp.diff(lambda s: model.eval_F(z2, s), mp.mpf(t))
    assert mp.almosteq(model.eval_F_t(z2, t), numeric, abs_eps=mp.mpf('1e-40'))


def test_cosine_guard_trips(prec):
    a = HoloSeries.from_pairs([[30, 0]], prec)
    m = ModelSurface(a, 0, RadialProfile(), '0.1', '0.3', prec)
    # R = -30 Re z2 reaches pi/2 near Re z2 = -0.0524
    with pytest.raises(GuardError, match="cosine guard"):
        m.eval_Q0(mp.mpc('-0.0524'))


def test_F_t_guards_the_shifted_cosine(prec, identity_series):
    m = ModelSurface(identity_series, 1, RadialProfile(), '0.1', '2', prec)
    z2 = mp.mpc('0.05')
    # R = -0.05, so R + t sits on pi/2
    t = mp.pi / 2 + mp.mpf('0.05')
    with pytest.raises(GuardError, match="cosine guard"):
        m.eval_F(z2, t)
    with pytest.raises(GuardError, match="cosine guard"):
        m.eval_F_t(z2, t)


def test_build_shrinks_domain_until_guards_hold(prec):
    a = HoloSeries.from_pairs([[30, 0]], prec)
    m = ModelSurface.build(a, 0, RadialProfile(), '0.15', '0.3', prec)
    assert m.eps0 < mp.mpf('0.15')
    assert 30 * m.eps0 < mp.acos(mp.mpf('0.1'))


def test_shrink_domain_keeps_a_valid_box(model1):
    again = model1.shrink_domain()
    assert again.eps0 == model1.eps0
    assert again.delta0 == model1.delta0


def test_analytic_wirtinger_singular_at_origin(model1):
    with pytest.raises(SingularDerivativeError):
        model1.wirtinger('R', 0)


def test_unknown_field_and_method(model1):
    with pytest.raises(ValueError):
        model1.wirtinger('G', mp.mpc('0.05'))
    with pytest.raises(ValueError):
        model1.wirtinger('R', mp.mpc('0.05'), method='spectral')


@pytest.mark.parametrize('name', FIELDS)
@given(r=radius, theta=angle, t=time)
@settings(max_examples=10, deadline=None)
def test_analytic_wirtinger_matches_finite_difference(model1, name, r, theta, t):
    z2 = mp.mpf(r) * mp.expj(theta)
    analytic = model1.wirtinger(name, z2, t)
    fd = model1.wirtinger(name, z2, t, 'finite_difference')
    assert abs(analytic - fd) <= model1.precision.fd_tol


def test_wirtinger_with_quadratic_q(prec):
    m = build_model(1, prec, q_poly=(0, 0, '0.5'))
    z2 = mp.mpc('0.06', '-0.04')
    for name in FIELDS:
        diff = abs(m.wirtinger(name, z2, '0.1') - m.wirtinger(name, z2, '0.1', 'finite_difference'))
        assert diff <= m.precision.fd_tol


def test_sample_surface_points_on_surface(model):
    pts = sample_surface(model, 10, ANNULUS, T_RANGE, 3)
    assert len(pts) == 10
    for p in pts:
        assert ANNULUS[0] <= abs(p.z2) <= ANNULUS[1] * (1 + mp.mpf(10) ** -40)
        assert T_RANGE[0] <= p.t <= T_RANGE[1]
        assert abs(model.eval_rho(p.z1, p.z2)) <= mp.mpf('1e-30')


def test_sample_surface_is_deterministic(model1):
    first = sample_surface(model1, 5, ANNULUS, T_RANGE, 11)
    again = sample_surface(model1, 5, ANNULUS, T_RANGE, 11)
    assert [(p.z1, p.z2) for p in first] == [(p.z1, p.z2) for p in again]


def test_sample_surface_empty_and_invalid(model1):
    assert sample_surface(model1, 0, ANNULUS, T_RANGE, 1) == []
    with pytest.raises(DomainError):
        sample_surface(model1, 3, (0, mp.mpf('0.1')), T_RANGE, 1)
    with pytest.raises(DomainError):
        sample_surface(model1, 3, (mp.mpf('0.02'), mp.mpf('0.5')), T_RANGE, 1)


def test_radial_surface_sampling(radial):
    pts = sample_surface(radial, 8, ANNULUS, T_RANGE, 5)
    assert all(abs(radial.eval_radial_rho(p.z1, p.z2)) <= mp.mpf('1e-30') for p in pts)


def test_radial_rejects_constant_Q(prec):
    with pytest.raises(ValueError):
        RadialSurface(RadialProfile(), ((0, 0, 1),), precision=prec)


@given(r=radius, theta=angle, t=time, phi=angle)
@settings(max_examples=25, deadline=None)
def test_radial_rho_is_rotation_invariant(radial, r, theta, t, phi):
    z2 = mp.mpf(r) * mp.expj(theta)
    z1 = mp.mpc('-0.01', t)
    assert abs(radial.eval_radial_rho(z1, z2) - radial.eval_radial_rho(z1, z2 * mp.expj(phi))) <= mp.mpf('1e-40')


def test_radial_wirtinger_derivatives_match_finite_differences(radial):
    z1, z2 = mp.mpc('-0.01', '0.1'), mp.mpc('0.03', '0.04')
    h = mp.mpf('1e-20')

    def d_bar(f, z):
        dx = (f(z + h) - f(z - h)) / (2 * h)
        dy = (f(z + mp.mpc(0, h)) - f(z - mp.mpc(0, h))) / (2 * h)
        return mp.mpc(dx, -dy) / 2

    by_z1 = d_bar(lambda w: radial.eval_radial_rho(w, z2), z1)
    by_z2 = d_bar(lambda w: radial.eval_radial_rho(z1, w), z2)
    assert abs(radial.rho_z1(z1, z2) - by_z1) <= mp.mpf('1e-30')
    assert abs(radial.rho_z2(z1, z2) - by_z2) <= mp.mpf('1e-30')


def test_radial_rho_z2_singular_at_origin(radial):
    with pytest.raises(SingularDerivativeError):
        radial.rho_z2(mp.mpc(0), 0)


def test_load_bundled_models():
    m1 = load_model(load_json_config(CONFIGS / 'default_alpha1.json'))
    m0 = load_model(load_json_config(CONFIGS / 'default_alpha0.json'))
    rs = load_model(load_json_config(CONFIGS / 'radial_default.json'))
    assert m1.alpha == 1 and not m1.alpha_is_zero
    assert m0.alpha_is_zero
    assert isinstance(rs, RadialSurface)
    assert m1.precision.bits == 192


def test_load_model_overrides_precision():
    m = load_model(load_json_config(CONFIGS / 'default_alpha1.json'), precision_bits=128)
    assert m.precision.bits == 128


def test_load_model_rejects_missing_keys():
    with pytest.raises(ConfigError):
        load_model({'alpha': 1})
    with pytest.raises(ConfigError):
        load_model({'alpha': 1, 'a': [[1, 0]], 'p': {'family': 'gaussian'}})


def test_model_to_dict_reloads(model1):
    again = load_model(model1.to_dict())
    assert again.alpha == model1.alpha
    assert again.eps0 == model1.eps0
