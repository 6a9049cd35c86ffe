import numpy as np
import pytest

from xxzff.thermo import (build_thermo, shift_function_limit,
                          excitation_momentum, NoBracket)


def test_dressed_charge_phase_identity(grid_pi3):
    # Z(lam) = 1 + phi(lam, q) - phi(lam, -q) on the whole zone
    g = grid_pi3
    lam = np.linspace(-g.q, g.q, 40)
    resid = g.Z(lam) - 1.0 - g.phi(g.q)(lam) + g.phi(-g.q)(lam)
    assert np.max(np.abs(resid)) < 1e-10


def test_boundary_phase_identity(grid_pi3):
    # 1 + phi(q, q) - phi(-q, q) = 1/Z(q); equivalently
    # 1 + phi(q, q) = (Z + 1/Z)/2 and phi(-q, q) = (Z - 1/Z)/2
    g = grid_pi3
    Zq = float(np.real(g.Z(g.q)))
    pqq = float(np.real(g.phi(g.q)(g.q)))
    pmq = float(np.real(g.phi(g.q)(-g.q)))
    assert abs(1 + pqq - pmq - 1 / Zq) < 1e-9
    assert abs(1 + pqq - (Zq + 1 / Zq) / 2) < 1e-9
    assert abs(pmq - (Zq - 1 / Zq) / 2) < 1e-9


def test_free_fermion_closed_forms(grid_ff):
    g = grid_ff
    D = 0.25
    assert abs(g.q - 0.5 * np.arcsinh(np.tan(np.pi * D))) < 1e-10
    lam = np.linspace(-g.q, g.q, 30)
    assert np.max(np.abs(g.rho(lam) - 1 / (np.pi * np.cosh(2 * lam)))) < 1e-10
    assert np.max(np.abs(g.Z(lam) - 1.0)) < 1e-12
    assert np.max(np.abs(g.phi(0.1)(lam))) < 1e-12


def test_density_and_fermi_momentum(grid_pi3):
    g = grid_pi3
    assert abs((g.rho.values * g.weights).sum() - g.D) < 1e-12
    assert abs(g.kF - np.pi * g.D) < 1e-10
    # dressed momentum is odd
    assert abs(g.momentum(0.2) + g.momentum(-0.2)) < 1e-12


def test_grid_function_derivative(grid_pi3):
    g = grid_pi3
    h = 1e-6
    fd = (g.Z(0.1 + h) - g.Z(0.1 - h)) / (2 * h)
    assert abs(g.Z.deriv(0.1) - fd) < 1e-8


def test_density_validation():
    with pytest.raises(ValueError):
        build_thermo(np.pi / 3, 0.7)
    with pytest.raises(NoBracket):
        build_thermo(np.pi / 3, 0.5)


def test_representative_shift_functions(grid_pi3):
    # P_r class representative: r particles at +q, r holes at -q.  In the z
    # channel the shifted function equals (alpha+r) Z pointwise; in the plus
    # channel its edge values reduce to (alpha+r) Z(q) -+ 1/(2 Z(q)).
    g = grid_pi3
    alpha, r = 0.07, 1
    Fz = shift_function_limit("z", g, alpha, [g.q] * r, [-g.q] * r).shifted(r)
    lam = np.linspace(-g.q, g.q, 25)
    assert np.max(np.abs(Fz(lam) - (alpha + r) * g.Z(lam))) < 1e-10
    Fp = shift_function_limit("plus", g, alpha, [g.q] * r, [-g.q] * r).shifted(r)
    Zq = float(np.real(g.Z(g.q)))
    assert abs(Fp.F_plus + 1 - ((alpha + r) * Zq + 0.5 / Zq)) < 1e-9
    assert abs(Fp.F_minus - ((alpha + r) * Zq - 0.5 / Zq)) < 1e-9


def test_plus_channel_shift(grid_pi3):
    g = grid_pi3
    alpha = 0.0
    F = shift_function_limit("plus", g, alpha)
    # (alpha - 1/2) Z + phi(., q) evaluated at the right edge
    expect = (alpha - 0.5) * np.real(g.Z(g.q)) + np.real(g.phi(g.q)(g.q))
    assert abs(F.F_plus - expect) < 1e-12


def test_excitation_momentum(grid_pi3):
    g = grid_pi3
    assert excitation_momentum(g, 0.3) == pytest.approx(2 * np.pi * 0.3 * g.D)
    mu = 0.1
    assert excitation_momentum(g, 0.0, [g.q], [mu]) == pytest.approx(
        g.kF - float(g.momentum(mu)))
