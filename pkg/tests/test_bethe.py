import numpy as np
import pytest

from xxzff.model import ModelParams
from xxzff.bethe import (InvalidSpec, NonConvergence, ExcitationSpec,
                         solve_bethe_state, counting_function,
                         finite_shift_function, pr_class_quantum_numbers)

ZETA = np.pi / 3


def test_ground_roots_symmetric():
    state = solve_bethe_state(ModelParams(ZETA, 24, 6))
    assert state.residual < 1e-12
    assert np.max(np.abs(state.roots + state.roots[::-1])) < 1e-12


def test_counting_function_hits_labels():
    state = solve_bethe_state(ModelParams(ZETA, 24, 6))
    xi = counting_function(state, state.roots)
    assert np.max(np.abs(xi - state.labels / 24)) < 1e-12


def test_discrete_density_matches_finite_difference():
    state = solve_bethe_state(ModelParams(ZETA, 24, 6))
    h = 1e-6
    fd = (counting_function(state, np.array([0.3 + h]))
          - counting_function(state, np.array([0.3 - h]))) / (2 * h)
    an = counting_function(state, np.array([0.3]), order=1)
    assert abs(an[0] - fd[0]) / abs(fd[0]) < 1e-8


def test_shift_function_vanishes_for_identical_states():
    state = solve_bethe_state(ModelParams(ZETA, 16, 4))
    om = np.linspace(-2, 2, 11)
    assert np.max(np.abs(finite_shift_function(state, state, om))) < 1e-14


def test_excited_state_labels():
    spec = ExcitationSpec(channel="z", holes=(2,), particles=(6,))
    state = solve_bethe_state(ModelParams(ZETA, 20, 5), spec)
    assert list(state.labels) == [1, 6, 3, 4, 5]
    assert state.residual < 1e-12


def test_spec_validation():
    with pytest.raises(InvalidSpec):
        ExcitationSpec(channel="z", holes=(1, 1), particles=(6, 7))
    with pytest.raises(InvalidSpec):
        ExcitationSpec(channel="z", holes=(1,), particles=())
    spec = ExcitationSpec(channel="z", holes=(1,), particles=(3,))
    with pytest.raises(InvalidSpec):
        spec.validate(5)    # particle label inside 1..N


def test_pr_class_mapping():
    spec = pr_class_quantum_numbers(1, p_plus=(2,), h_minus=(1,), N_kappa=6)
    assert spec.particles == (8,)
    assert spec.holes == (1,)
    assert pr_class_quantum_numbers(0, N_kappa=6).n == 0
    with pytest.raises(InvalidSpec):
        pr_class_quantum_numbers(1, p_plus=(1,), h_plus=(1,), N_kappa=6)


def test_pr_representative_equals_shifted_twisted_ground():
    # the canonical class representative (r particles past the right edge,
    # r holes at the left edge) carries the same roots as the ground pattern
    # at twist alpha + r
    M, N, r, alpha = 20, 5, 1, 0.13
    spec = pr_class_quantum_numbers(r, p_plus=(1,), h_minus=(1,), N_kappa=N)
    rep = solve_bethe_state(ModelParams(ZETA, M, N, alpha), spec)
    gnd = solve_bethe_state(ModelParams(ZETA, M, N, alpha + r))
    assert np.max(np.abs(np.sort(rep.roots) - np.sort(gnd.roots))) < 1e-10


def test_boundary_label_raises():
    # labels past the saturation of the counting function have no finite root
    spec = ExcitationSpec(channel="z", holes=(1,), particles=(5,))
    with pytest.raises(NonConvergence):
        solve_bethe_state(ModelParams(ZETA, 8, 2), spec)
