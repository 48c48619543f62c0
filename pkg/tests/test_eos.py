import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermovar.eos import GasEos, free_energy_drho
from thermovar.errors import DomainError, EosConstructionError

pos = st.floats(min_value=0.2, max_value=5.0)


@given(rho=pos, T=pos)
@settings(max_examples=60, deadline=None)
def test_legendre_pair(rho, T):
    eos = GasEos(2.5, 3.5, 1.0, 1.0, s0=0.3)
    s = eos.entropy_from_T(rho, T)
    assert eos.free_energy(rho, T) == pytest.approx(eos.internal_energy(rho, s) - T * s, rel=1e-11, abs=1e-12)
    assert eos.temperature_from_s(rho, s) == pytest.approx(T, rel=1e-12)
    assert eos.pressure_from_s(rho, s) == pytest.approx(eos.pressure(rho, T), rel=1e-12)


def test_reference_state(gas):
    assert gas.eps0 == pytest.approx(2.5)
    assert gas.psi0 == pytest.approx(2.5)
    assert gas.internal_energy(1.0, 0.0) == pytest.approx(2.5)
    assert gas.entropy_from_T(1.0, 1.0) == pytest.approx(0.0, abs=1e-15)


def test_pressure_from_free_energy(gas):
    rho, T, h = 1.3, 0.8, 1e-6
    fd = (gas.free_energy(rho + h, T) - gas.free_energy(rho - h, T)) / (2 * h)
    assert rho * fd - gas.free_energy(rho, T) == pytest.approx(gas.pressure(rho, T), rel=1e-8)
    assert free_energy_drho(gas, rho, T) == pytest.approx(fd, rel=1e-8)


def test_coefficients(gas):
    rho = np.array([0.5, 1.0, 2.0])
    T = np.array([0.7, 1.0, 1.9])
    co = gas.coefficients(rho, T)
    np.testing.assert_allclose(co.cs2, 1.4 * T)
    np.testing.assert_allclose(rho ** 2 * co.cs2 * co.cv_coeff * co.gamma_ad, gas.pressure(rho, T), rtol=1e-13)
    np.testing.assert_allclose(gas.sound_speed(rho, T), np.sqrt(1.4 * T))


def test_arrays_broadcast(gas):
    out = gas.free_energy(np.ones((2, 3)), 1.5)
    assert out.shape == (2, 3)
    assert isinstance(gas.pressure(1.0, 1.0), float)


@pytest.mark.parametrize("kw", [dict(Cv=2.5, Cp=2.0), dict(Cv=0.0, Cp=1.0), dict(Cv=2.5, Cp=3.5, rho0=-1.0)])
def test_bad_constants(kw):
    args = dict(Cv=2.5, Cp=3.5, rho0=1.0, T0=1.0)
    args.update(kw)
    with pytest.raises(EosConstructionError):
        GasEos(**args)


def test_inconsistent_reference_energy():
    with pytest.raises(EosConstructionError):
        GasEos(2.5, 3.5, 1.0, 1.0, eps0=3.0)
    GasEos(2.5, 3.5, 1.0, 1.0, eps0=2.5, psi0=2.5)


@pytest.mark.parametrize("rho,T", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
def test_domain(gas, rho, T):
    with pytest.raises(DomainError):
        gas.free_energy(rho, T)


def test_domain_array(gas):
    with pytest.raises(DomainError):
        gas.pressure(np.array([1.0, -1.0]), 1.0)


@given(rho=pos, T=pos)
@settings(max_examples=40, deadline=None)
def test_monotonicity(rho, T):
    eos = GasEos(2.5, 3.5, 1.0, 1.0)
    s, h = eos.entropy_from_T(rho, T), 1e-4
    assert eos.internal_energy(rho, s + h) > eos.internal_energy(rho, s - h)
    curv = eos.free_energy(rho, T + h) - 2 * eos.free_energy(rho, T) + eos.free_energy(rho, T - h)
    assert curv < 0
    assert -T * curv / h ** 2 == pytest.approx(rho * eos.Cv, rel=1e-4)


def test_temperature_at_reference():
    eos = GasEos(2.5, 3.5, 1.2, 0.9, s0=0.4)
    h = 1e-6
    dE = (eos.internal_energy(1.2, 0.4 + h) - eos.internal_energy(1.2, 0.4 - h)) / (2 * h)
    assert dE == pytest.approx(0.9, rel=1e-8)
