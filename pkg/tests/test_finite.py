import numpy as np
import pytest

from xxzff.model import ModelParams
from xxzff.bethe import ExcitationSpec, solve_bethe_state
from xxzff.finite import (slavnov_scalar_product, norm_squared,
                          fredholm_scalar_product, finite_product,
                          rectangle_contour, second_twist_derivative,
                          ff_product_with_distance,
                          excitation_momentum_finite, log_spin_product)
from xxzff.model import bare_momentum

ZETA = np.pi / 3


def _states(M, N, alpha, spec=None):
    exc = solve_bethe_state(ModelParams(ZETA, M, N, alpha), spec)
    grd = solve_bethe_state(ModelParams(ZETA, M, N, 0.0))
    return exc, grd


def test_orthogonality_at_zero_twist():
    spec = ExcitationSpec(channel="z", holes=(2,), particles=(7,))
    exc, grd = _states(16, 4, 0.0, spec)
    sp = slavnov_scalar_product(exc, grd)
    nn = np.sqrt(np.exp(norm_squared(exc).log_mag
                        + norm_squared(grd).log_mag))
    assert np.exp(sp.log_mag) / nn < 1e-10


def test_scalar_product_phase_is_real_in_z_channel():
    # at real twist the z-channel scalar product is real up to sign
    for alpha in (0.05, 0.21, -0.33):
        spec = ExcitationSpec(channel="z", holes=(1,), particles=(6,))
        exc, grd = _states(16, 4, alpha, spec)
        ph = slavnov_scalar_product(exc, grd).phase
        assert min(abs(ph % np.pi), np.pi - abs(ph % np.pi)) < 1e-10


def test_plus_channel_conjugation_phase():
    # the phase of the plus-channel scalar product is fixed by the bare
    # momenta of both root sets and the twist
    for alpha in (0.0, 0.17, -0.29):
        spec = ExcitationSpec(channel="plus", holes=(1,), particles=(7,))
        exc, grd = _states(16, 4, alpha, spec)
        ph = slavnov_scalar_product(exc, grd).phase
        target = 0.5 * (-2 * np.pi * alpha
                        + np.sum(bare_momentum(exc.roots, ZETA))
                        + np.sum(bare_momentum(grd.roots, ZETA)))
        resid = abs(np.angle(np.exp(1j * (ph - target))))
        resid = min(resid, np.pi - resid)
        assert resid < 1e-10


@pytest.mark.parametrize("channel,spec", [
    ("z", ExcitationSpec(channel="z", holes=(2,), particles=(9,))),
    ("plus", ExcitationSpec(channel="plus", holes=(1,), particles=(10,))),
])
def test_slavnov_vs_fredholm(channel, spec):
    exc, grd = _states(32, 8, 0.15, spec)
    q = np.max(np.abs(grd.roots))
    sl = slavnov_scalar_product(exc, grd)
    fr = fredholm_scalar_product(exc, grd, q)
    assert abs(np.exp(fr.log_mag - sl.log_mag) - 1) < 1e-6
    assert abs(np.angle(np.exp(1j * (fr.phase - sl.phase)))) < 1e-6
    # contour invariance: a different rectangle gives the same value
    fr2 = fredholm_scalar_product(exc, grd, q, delta=0.15, eta=0.3,
                                  n_per_side=96)
    assert abs(np.exp(fr2.log_mag - sl.log_mag) - 1) < 1e-6


def test_rectangle_contour_is_closed():
    pts, wts = rectangle_contour(0.5, 0.1, 0.4, n_per_side=32)
    assert abs(np.sum(wts)) < 1e-14
    # winding integral around an interior pole
    assert abs(np.sum(wts / (pts - 0.2)) - 2j * np.pi) < 1e-10


def test_second_twist_derivative_synthetic():
    c, a, b = 3.7, 0.4, -1.2
    alphas = (1e-2, 5e-3, 2.5e-3)
    vals = [c * x ** 2 * (1 + a * x ** 2 + b * x ** 4) for x in alphas]
    assert abs(second_twist_derivative(vals, alphas) - 2 * c) < 1e-10


def test_zz_product_quadratic_twist_limit():
    # S(alpha)/alpha^2 is Richardson-consistent across the alpha schedule
    spec = ExcitationSpec(channel="z", holes=(1,), particles=(5,))

    def solve(a):
        exc = solve_bethe_state(ModelParams(ZETA, 16, 4, a), spec)
        grd = solve_bethe_state(ModelParams(ZETA, 16, 4, 0.0))
        return exc, grd

    def sym(a):
        return 0.5 * (np.exp(log_spin_product(*solve(a)))
                      + np.exp(log_spin_product(*solve(-a))))

    d2_coarse = second_twist_derivative([sym(a) for a in (2e-2, 1e-2)],
                                        (2e-2, 1e-2))
    d2_fine = second_twist_derivative([sym(a) for a in (1e-2, 5e-3, 2.5e-3)],
                                      (1e-2, 5e-3, 2.5e-3))
    assert abs(d2_coarse / d2_fine - 1) < 1e-4


def test_ff_product_distance_phase():
    spec = ExcitationSpec(channel="plus", holes=(1,), particles=(6,))

    def solve(a):
        exc = solve_bethe_state(ModelParams(ZETA, 12, 3, a), spec)
        grd = solve_bethe_state(ModelParams(ZETA, 12, 3, 0.0))
        return exc, grd

    v0, P_ex, _ = ff_product_with_distance(solve, "plus", distance=0)
    v3, _, _ = ff_product_with_distance(solve, "plus", distance=3)
    assert v3 == pytest.approx(v0 * (-1) ** 3 * np.exp(3j * P_ex))
    exc, grd = solve(0.0)
    assert P_ex == pytest.approx(excitation_momentum_finite(exc, grd))


def test_finite_product_result_fields():
    spec = ExcitationSpec(channel="plus", holes=(1,), particles=(5,))
    exc, grd = _states(12, 3, 0.0, spec)
    res = finite_product(exc, grd)
    assert res.channel == "plus"
    assert res.value > 0
    assert res.M == 12 and res.N == 3
