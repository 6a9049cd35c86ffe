import numpy as np
import pytest

from xxzff.model import (ModelParams, bare_momentum, bare_phase,
                         bare_momentum_inverse, bare_momentum_c, bare_phase_c,
                         log_vacuum_eigenvalues)

ZETA = np.pi / 3


def central_diff(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2 * h)


def test_params_validation():
    p = ModelParams(ZETA, 12, 3, 0.1)
    assert p.delta == pytest.approx(0.5)
    assert p.density == pytest.approx(0.25)
    assert p.kappa == pytest.approx(np.exp(0.2j * np.pi))
    with pytest.raises(ValueError):
        ModelParams(ZETA, 11, 3)        # odd M
    with pytest.raises(ValueError):
        ModelParams(ZETA, 12, 7)        # N > M/2
    with pytest.raises(ValueError):
        ModelParams(-0.1, 12, 3)        # zeta outside (0, pi)


def test_bare_momentum_derivative_matches_finite_difference():
    lam = 0.3
    fd = central_diff(lambda x: bare_momentum(x, ZETA), lam)
    an = bare_momentum(lam, ZETA, order=1)
    assert abs(an - fd) / abs(fd) < 1e-8


def test_bare_phase_kernel_matches_finite_difference():
    lam = 0.7
    fd = central_diff(lambda x: bare_phase(x, ZETA), lam)
    an = bare_phase(lam, ZETA, order=1)
    assert abs(an - fd) / abs(fd) < 1e-8


def test_bare_functions_odd_and_monotone():
    lam = np.linspace(-6, 6, 201)
    p0 = bare_momentum(lam, ZETA)
    th = bare_phase(lam, ZETA)
    assert np.max(np.abs(p0 + p0[::-1])) < 1e-13
    assert np.max(np.abs(th + th[::-1])) < 1e-13
    assert np.all(np.diff(p0) > 0)
    # saturation values at infinity
    assert bare_momentum(30.0, ZETA) == pytest.approx(np.pi - ZETA, abs=1e-12)
    assert bare_phase(30.0, ZETA) == pytest.approx(np.pi - 2 * ZETA, abs=1e-12)


def test_momentum_inverse_round_trip():
    p = np.linspace(-0.95, 0.95, 41) * (np.pi - ZETA)
    lam = bare_momentum_inverse(p, ZETA)
    assert np.max(np.abs(bare_momentum(lam, ZETA) - p)) < 1e-12
    with pytest.raises(ValueError):
        bare_momentum_inverse(np.pi - ZETA, ZETA)


def test_free_fermion_phase_vanishes():
    lam = np.linspace(-4, 4, 101)
    assert np.max(np.abs(bare_phase(lam, np.pi / 2))) < 1e-13
    assert np.max(np.abs(bare_phase(lam, np.pi / 2, order=1))) < 1e-13


def test_complex_continuations_agree_on_real_axis():
    lam = np.linspace(-3, 3, 31)
    assert np.max(np.abs(bare_momentum_c(lam + 0j, ZETA).real
                         - bare_momentum(lam, ZETA))) < 1e-12
    assert np.max(np.abs(bare_phase_c(lam + 0j, ZETA).real
                         - bare_phase(lam, ZETA))) < 1e-12


def test_vacuum_eigenvalues_log_form():
    params = ModelParams(ZETA, 16, 4)
    la, ld = log_vacuum_eigenvalues(0.37, params)
    assert np.exp(la) == pytest.approx(np.sinh(0.37 - 1j * ZETA / 2) ** 16)
    assert np.exp(ld) == pytest.approx(np.sinh(0.37 + 1j * ZETA / 2) ** 16)
    with pytest.raises(ValueError):
        log_vacuum_eigenvalues(1j * ZETA / 2, params)
