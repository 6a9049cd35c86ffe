import numpy as np
import pytest
from math import comb

from xxzff.ed import (SizeLimit, SelectionRule, build_and_diagonalize,
                      local_matrix_elements, oracle_run)

ZETA = np.pi / 3


@pytest.fixture(scope="module")
def sector():
    return build_and_diagonalize(8, np.cos(ZETA), 0.0, 2)


def test_sector_dimension(sector):
    assert sector.dim == comb(8, 2)


def test_eigenbasis_orthonormal(sector):
    V = sector.eigenvectors
    G = V.conj().T @ V
    assert np.max(np.abs(G - np.eye(sector.dim))) < 1e-12


def test_translation_eigenvalues_unimodular(sector):
    # momenta are well defined: each eigenvector is an exact translation
    # eigenvector with unimodular eigenvalue
    assert np.all(np.isfinite(sector.momenta))
    # momenta are quantized in units of 2 pi / M
    k = sector.momenta * 8 / (2 * np.pi)
    assert np.max(np.abs(k - np.round(k))) < 1e-10


def test_sigma_z_sum_rule(sector):
    # completeness: sum over all final states of |<f|sigma^z_1|g>|^2 equals
    # <g|(sigma^z_1)^2|g> = 1
    ig = int(np.argmin(sector.eigenvalues))
    E = local_matrix_elements(sector, sector, "z", 1)[:, ig]
    assert abs(np.sum(np.abs(E) ** 2) - 1.0) < 1e-12


def test_sigma_minus_sum_rule(sector):
    out = build_and_diagonalize(8, np.cos(ZETA), 0.0, 3)
    ig = int(np.argmin(sector.eigenvalues))
    E = local_matrix_elements(out, sector, "minus", 1)[:, ig]
    # <g|sigma^+ sigma^-|g> = (1 + <sigma^z>)/2 at site 1
    sz = local_matrix_elements(sector, sector, "z", 1)[ig, ig]
    assert abs(np.sum(np.abs(E) ** 2) - (1 + sz.real) / 2) < 1e-12


def test_ground_state_magnetization(sector):
    # bit set = down spin, so the per-site expectation is 1 - 2D (equal to
    # 2D - 1 in the opposite spin convention)
    ig = int(np.argmin(sector.eigenvalues))
    sz = local_matrix_elements(sector, sector, "z", 1)[ig, ig]
    assert abs(sz.real - (1 - 2 * 2 / 8)) < 1e-10


def test_selection_rules(sector):
    out = build_and_diagonalize(8, np.cos(ZETA), 0.0, 3)
    with pytest.raises(SelectionRule):
        local_matrix_elements(out, sector, "z", 1)
    with pytest.raises(SelectionRule):
        local_matrix_elements(sector, sector, "minus", 1)


def test_size_limit():
    with pytest.raises(SizeLimit):
        build_and_diagonalize(16, 0.5, 0.0, 4)


def test_oracle_zz_all_matched():
    report = oracle_run(8, ZETA, 2, "zz", tolerance=1e-9)
    assert not report["orphans"]
    assert len(report["matched"]) >= 4
    assert max(e["rel_err"] for e in report["matched"]) < 1e-9


def test_oracle_pm_all_matched():
    report = oracle_run(8, ZETA, 2, "pm", tolerance=1e-9)
    assert not report["orphans"]
    assert len(report["matched"]) >= 5
    assert max(e["rel_err"] for e in report["matched"]) < 1e-9
