"""Model parameters and the bare single-particle functions of the massless XXZ chain.

Everything downstream (root solvers, integral equations, determinants) is built
from the bare momentum p0, the bare scattering phase theta, its derivative
kernel K, and the sinh^M vacuum eigenvalues.  The i*log forms are evaluated via
two-argument arctangents so that p0 and theta are continuous, odd and (for p0)
strictly increasing on the whole real line.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "bare_momentum",
    "bare_phase",
    "bare_momentum_inverse",
    "bare_momentum_c",
    "bare_phase_c",
    "log_vacuum_eigenvalues",
]


@dataclass(frozen=True)
class ModelParams:
    """Anisotropy angle zeta (Delta = cos zeta), chain length M, down spins N, twist alpha."""

    zeta: float
    M: int
    N: int
    alpha: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.zeta < np.pi):
            raise ValueError(f"zeta must lie in (0, pi), got {self.zeta}")
        if self.M % 2 != 0 or self.M <= 0:
            raise ValueError(f"M must be a positive even integer, got {self.M}")
        if not (1 <= self.N <= self.M // 2):
            raise ValueError(f"need 1 <= N <= M/2, got N={self.N}, M={self.M}")
        if np.imag(self.alpha) != 0:
            raise ValueError("twist alpha must be real")

    @property
    def delta(self):
        return np.cos(self.zeta)

    @property
    def density(self):
        return self.N / self.M

    @property
    def kappa(self):
        return np.exp(2j * np.pi * self.alpha)


def _check_finite(x):
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite rapidity")


def bare_momentum(lam, zeta, order=0):
    """Bare momentum p0(lam) (order=0) or its derivative p0'(lam) (order=1).

    p0(lam) = i log[ sinh(i zeta/2 + lam) / sinh(i zeta/2 - lam) ] on the
    continuous odd branch with p0(0) = 0.  Writing
    sinh(i zeta/2 + lam) = R e^{i t} with t = atan2(cosh(lam) sin(zeta/2),
    sinh(lam) cos(zeta/2)) gives p0 = pi - 2 t; the derivative is
    sin(zeta) / (sinh^2 lam + sin^2(zeta/2)) > 0.
    """
    lam = np.asarray(lam, dtype=float)
    _check_finite(lam)
    if order == 0:
        # cosh/sinh overflow to inf for huge lam; atan2 still returns the limit
        with np.errstate(over="ignore"):
            t = np.arctan2(np.cosh(lam) * np.sin(zeta / 2), np.sinh(lam) * np.cos(zeta / 2))
        return np.pi - 2.0 * t
    if order == 1:
        with np.errstate(over="ignore"):
            return np.sin(zeta) / (np.sinh(lam) ** 2 + np.sin(zeta / 2) ** 2)
    raise ValueError("order must be 0 or 1")


def bare_phase(lam, zeta, order=0):
    """Bare scattering phase theta(lam) (order=0) or kernel K = theta' (order=1).

    Same branch construction as :func:`bare_momentum` with zeta/2 replaced by
    zeta; K(lam) = sin(2 zeta) / (sinh^2 lam + sin^2 zeta) and vanishes
    identically at the free-fermion point zeta = pi/2.
    """
    lam = np.asarray(lam, dtype=float)
    _check_finite(lam)
    if order == 0:
        with np.errstate(over="ignore"):
            t = np.arctan2(np.cosh(lam) * np.sin(zeta), np.sinh(lam) * np.cos(zeta))
        return np.pi - 2.0 * t
    if order == 1:
        with np.errstate(over="ignore"):
            return np.sin(2.0 * zeta) / (np.sinh(lam) ** 2 + np.sin(zeta) ** 2)
    raise ValueError("order must be 0 or 1")


def bare_momentum_inverse(p, zeta):
    """Inverse of p0, defined for |p| < pi - zeta: lam = atanh(tan(zeta/2) tan(p/2))."""
    p = np.asarray(p, dtype=float)
    if np.any(np.abs(p) >= np.pi - zeta):
        raise ValueError("momentum outside the range of p0")
    return np.arctanh(np.tan(zeta / 2) * np.tan(p / 2))


def bare_momentum_c(w, zeta):
    """Analytic continuation of p0 to complex w (principal log; valid for small |Im w|)."""
    w = np.asarray(w, dtype=complex)
    return 1j * np.log(np.sinh(1j * zeta / 2 + w) / np.sinh(1j * zeta / 2 - w))


def bare_phase_c(w, zeta, order=0):
    """Analytic continuation of theta (and K) to complex w with |Im w| < zeta."""
    w = np.asarray(w, dtype=complex)
    if order == 0:
        return 1j * np.log(np.sinh(1j * zeta + w) / np.sinh(1j * zeta - w))
    if order == 1:
        return np.sin(2.0 * zeta) / (np.sinh(w) ** 2 + np.sin(zeta) ** 2)
    raise ValueError("order must be 0 or 1")


def log_vacuum_eigenvalues(nu, params):
    """(log a(nu), log d(nu)) with a = sinh^M(nu - i zeta/2), d = sinh^M(nu + i zeta/2).

    Values are returned as M * Log sinh(...) so that nothing of magnitude
    sinh^M is ever exponentiated; consumers combine them in log space.
    """
    nu = complex(nu)
    zeta, M = params.zeta, params.M
    sa = np.sinh(nu - 1j * zeta / 2)
    sd = np.sinh(nu + 1j * zeta / 2)
    if abs(sa) < 1e-14 or abs(sd) < 1e-14:
        raise ValueError("nu at a singular point +-i zeta/2 (mod i pi)")
    return M * np.log(sa), M * np.log(sd)
