import numpy as np
import pytest

from cfprop.errors import CapabilityError, ConfigurationError, DomainError
from cfprop.model import (
    MODIFIED_Y,
    CosineField,
    MorseConfig,
    PotentialModel,
    SampledPotential,
    ZeroField,
    external_field_modified_potential,
    modified_potential,
    morse_ground_state,
    morse_potential,
    walker_preston,
)
from cfprop.quadrature import gl6
from cfprop.spectral import FFTCounter, SpatialGrid, apply_kinetic


def test_morse_constants(morse):
    assert morse.w0 == pytest.approx(0.018858629, rel=1e-8)
    assert morse.gamma == pytest.approx(23.8724, rel=1e-5)
    assert morse.period == pytest.approx(351.6052214, rel=1e-9)


def test_ground_energy_closed_form(morse):
    # hand value of w0/2 - w0^2/(16 D)
    assert morse.ground_energy() == pytest.approx(0.0093305673, rel=1e-8)


def test_ground_state_energy_on_grid(morse):
    grid = SpatialGrid(-0.8, 4.32, 128)
    u = morse_ground_state(morse, grid)
    assert np.linalg.norm(u) == pytest.approx(1.0, abs=1e-14)
    hu = apply_kinetic(u, grid, morse.mu) + morse_potential(morse, grid.x) * u
    energy = np.vdot(u, hu).real
    assert energy == pytest.approx(morse.ground_energy(), rel=1e-4)
    # and it is an eigenvector to good accuracy
    assert np.linalg.norm(hu - energy * u) < 1e-4 * energy


def test_ground_state_is_real_positive(u0):
    assert np.all(u0.real > 0) and not u0.imag.any()


def test_unresolved_ground_state(morse):
    with pytest.raises(DomainError):
        morse_ground_state(morse, SpatialGrid(20.0, 30.0, 64))


def test_walker_preston_potential(wp64, morse, grid64):
    t = 123.4
    expected = morse_potential(morse, grid64.x) + morse.amplitude * np.cos(morse.omega * t) * grid64.x
    np.testing.assert_allclose(wp64.potential_at(t), expected, rtol=1e-15)
    np.testing.assert_allclose(wp64.derivative_at(0.0), morse.amplitude)


def test_model_arrays_read_only(wp64):
    with pytest.raises(ValueError):
        wp64.static_part[0] = 1.0


def test_model_validation(grid64):
    with pytest.raises(ConfigurationError):
        PotentialModel(grid64, np.zeros(64), np.zeros(64), ZeroField(), mu=0.0)
    with pytest.raises(ConfigurationError):
        PotentialModel(grid64, np.zeros(32), np.zeros(64), ZeroField(), mu=1.0)
    bad = np.zeros(64)
    bad[3] = np.nan
    with pytest.raises(ConfigurationError):
        PotentialModel(grid64, bad, np.zeros(64), ZeroField(), mu=1.0)
    with pytest.raises(ConfigurationError):
        MorseConfig(depth=-1.0)


def test_missing_derivative(grid64):
    m = PotentialModel(grid64, np.zeros(64), grid64.x, CosineField(1.0, 1.0), 1.0)
    assert not m.has_derivative
    with pytest.raises(CapabilityError):
        modified_potential(m, 0.0, 0.1)
    with pytest.raises(CapabilityError):
        external_field_modified_potential(m, 0.0, 0.1)


def test_spectral_derivative_copy_warns(grid64):
    q = 2 * np.pi / grid64.length
    m = PotentialModel(grid64, np.zeros(64), np.sin(q * grid64.x), CosineField(1.0, 1.0), 1.0)
    with pytest.warns(UserWarning):
        m2 = m.with_spectral_derivative()
    np.testing.assert_allclose(m2.field_profile_deriv, q * np.cos(q * grid64.x), atol=1e-12)


@pytest.mark.parametrize("t_k,tau", [(0.0, 17.58), (100.0, 5.0), (-3.0, 40.0)])
def test_modified_potential_two_routes(wp64, t_k, tau):
    general = modified_potential(wp64, t_k, tau)
    closed = external_field_modified_potential(wp64, t_k, tau)
    np.testing.assert_allclose(general, closed, rtol=1e-12, atol=1e-30)


def test_modified_potential_gl_form(wp64):
    t_k, tau = 10.0, 20.0
    c = gl6().nodes
    d1 = wp64.derivative_at(t_k + c[0] * tau)
    d3 = wp64.derivative_at(t_k + c[2] * tau)
    expected = -(5 * MODIFIED_Y / (3 * wp64.mu)) * (d3 - d1) ** 2
    np.testing.assert_allclose(modified_potential(wp64, t_k, tau), expected, rtol=1e-12)


def test_sampled_potential_spectral_route(grid64):
    q = 2 * np.pi / grid64.length
    prof = np.sin(q * grid64.x)
    env = CosineField(0.3, 0.7)
    analytic = PotentialModel(grid64, np.zeros(64), prof, env, 2.0, q * np.cos(q * grid64.x))
    sampled = SampledPotential(grid64, lambda t: env(t) * prof, 2.0)
    counter = FFTCounter()
    got = modified_potential(sampled, 0.4, 1.3, counter=counter)
    np.testing.assert_allclose(got, modified_potential(analytic, 0.4, 1.3), atol=1e-14)
    # three derivative snapshots, one pair each
    assert counter.pairs == 3


def test_sampled_potential_validation(grid64):
    with pytest.raises(ConfigurationError):
        SampledPotential(grid64, lambda t: np.zeros(64), 0.0)
    s = SampledPotential(grid64, lambda t: np.zeros(10), 1.0)
    with pytest.raises(ConfigurationError):
        s.potential_at(0.0)


def test_walker_preston_field_profile(wp64, grid64):
    np.testing.assert_array_equal(wp64.field_profile, grid64.x)
    assert isinstance(wp64.envelope, CosineField)
    assert walker_preston(MorseConfig(amplitude=0.0), grid64).envelope(1.0) == 0.0
