"""Thermodynamic-limit machinery: the linear integral equations on the Fermi
zone [-q, q], the Fermi boundary itself, and the limiting shift functions.

All equations share the form  f(lam) + (1/2pi) int_{-q}^{q} K(lam-mu) f(mu) dmu
= rhs(lam) and are solved by Gauss-Legendre Nystrom collocation.  Off-node
values (including complex arguments, needed by the contour determinants) come
from the natural Nystrom interpolant rhs(x) - (1/2pi) sum_j w_j K(x-x_j) f_j,
which inherits the spectral accuracy of the quadrature for analytic kernels.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .model import bare_momentum, bare_phase, bare_phase_c

__all__ = [
    "SingularSystem",
    "NoBracket",
    "GridFunction",
    "ThermoGrid",
    "solve_linear_integral_equation",
    "build_thermo",
    "dressed_phase",
    "ShiftFunction",
    "shift_function_limit",
    "excitation_momentum",
]


class SingularSystem(RuntimeError):
    """The Nystrom discretization is numerically singular (order too low)."""


class NoBracket(RuntimeError):
    """The Fermi-boundary search could not bracket the requested density."""


def _kernel(x, zeta):
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return bare_phase_c(x, zeta, order=1)
    return bare_phase(x, zeta, order=1)


def _kernel_prime(x, zeta):
    x = np.asarray(x, dtype=complex) if np.iscomplexobj(np.asarray(x)) else np.asarray(x, float)
    return -np.sin(2 * zeta) * np.sinh(2 * x) / (np.sinh(x) ** 2 + np.sin(zeta) ** 2) ** 2


class GridFunction:
    """Nystrom solution of one linear integral equation on [-q, q].

    Callable at arbitrary real or complex points; .deriv gives the exact
    derivative of the interpolant (requires rhs').
    """

    def __init__(self, zeta, nodes, weights, values, rhs, rhs_prime=None):
        self.zeta = zeta
        self.nodes = nodes
        self.weights = weights
        self.values = values
        self._rhs = rhs
        self._rhs_prime = rhs_prime

    def __call__(self, x):
        x = np.asarray(x)
        scalar = x.ndim == 0
        xs = np.atleast_1d(x)
        Kx = _kernel(xs[:, None] - self.nodes[None, :], self.zeta)
        out = self._rhs(xs) - (Kx * self.weights) @ self.values / (2 * np.pi)
        return out[0] if scalar else out

    def deriv(self, x):
        if self._rhs_prime is None:
            raise ValueError("no rhs derivative available for this grid function")
        x = np.asarray(x)
        scalar = x.ndim == 0
        xs = np.atleast_1d(x)
        Kp = _kernel_prime(xs[:, None] - self.nodes[None, :], self.zeta)
        out = self._rhs_prime(xs) - (Kp * self.weights) @ self.values / (2 * np.pi)
        return out[0] if scalar else out


def _gauss_legendre(q, order):
    x, w = np.polynomial.legendre.leggauss(order)
    return q * x, q * w


def solve_linear_integral_equation(zeta, q, rhs, rhs_prime=None, order=128,
                                   nodes=None, weights=None):
    """Solve f + (1/2pi) int K(.-mu) f(mu) dmu = rhs on [-q, q]."""
    if nodes is None:
        nodes, weights = _gauss_legendre(q, order)
    A = np.eye(len(nodes)) + _kernel(nodes[:, None] - nodes[None, :], zeta) * weights / (2 * np.pi)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularSystem(f"discretized system condition number {cond:.2e}")
    values = np.linalg.solve(A, rhs(nodes))
    return GridFunction(zeta, nodes, weights, values, rhs, rhs_prime)


@dataclass
class ThermoGrid:
    """Quadrature-grid solutions of the Fermi-zone integral equations."""

    zeta: float
    D: float
    q: float
    order: int
    nodes: np.ndarray
    weights: np.ndarray
    rho: GridFunction
    Z: GridFunction
    kF: float
    _phi_cache: dict = field(default_factory=dict, repr=False)
    _p_nodes64: tuple = field(default=None, repr=False)

    def momentum(self, lam):
        """Dressed momentum p(lam) = 2 pi int_0^lam rho."""
        lam = np.asarray(lam, dtype=float)
        scalar = lam.ndim == 0
        lams = np.atleast_1d(lam)
        if self._p_nodes64 is None:
            self._p_nodes64 = np.polynomial.legendre.leggauss(64)
        x, w = self._p_nodes64
        # map [-1,1] -> [0, lam] for every lam at once
        pts = 0.5 * lams[:, None] * (x[None, :] + 1.0)
        vals = self.rho(pts.ravel()).reshape(pts.shape)
        out = 2 * np.pi * 0.5 * lams * (vals * w).sum(axis=1)
        return out[0] if scalar else out

    def momentum_deriv(self, lam):
        return 2 * np.pi * self.rho(lam)

    def xi(self, lam):
        """Limiting counting function, the antiderivative of rho vanishing at -q."""
        return (self.momentum(lam) + self.kF) / (2 * np.pi)

    def phi(self, nu):
        """Dressed phase phi(., nu) as a GridFunction (cached per nu)."""
        key = complex(nu)
        if key not in self._phi_cache:
            self._phi_cache[key] = dressed_phase(self, nu)
        return self._phi_cache[key]

    def to_json(self):
        return {
            "zeta": self.zeta, "D": self.D, "q": self.q, "order": self.order,
            "kF": self.kF,
            "nodes": self.nodes.tolist(), "weights": self.weights.tolist(),
            "rho": self.rho.values.tolist(), "Z": self.Z.values.tolist(),
        }


def _solve_rho(zeta, q, order):
    rhs = lambda x: bare_momentum(np.real(x), zeta, order=1) / (2 * np.pi) \
        if not np.iscomplexobj(np.asarray(x)) else _p0p_c(x, zeta) / (2 * np.pi)
    rhs_prime = lambda x: _p0pp(x, zeta) / (2 * np.pi)
    return solve_linear_integral_equation(zeta, q, rhs, rhs_prime, order)


def _p0p_c(w, zeta):
    return np.sin(zeta) / (np.sinh(w) ** 2 + np.sin(zeta / 2) ** 2)


def _p0pp(x, zeta):
    return -np.sin(zeta) * np.sinh(2 * x) / (np.sinh(x) ** 2 + np.sin(zeta / 2) ** 2) ** 2


def build_thermo(zeta, D, order=128, q_max=40.0):
    """Locate the Fermi boundary q with int_{-q}^{q} rho = D and assemble the grid."""
    if not (0.0 < D < 0.5):
        if D == 0.5:
            raise NoBracket("D = 1/2 corresponds to q = infinity")
        raise ValueError(f"density must lie in (0, 1/2), got {D}")

    def filled(q):
        rho = _solve_rho(zeta, q, order)
        return (rho.values * rho.weights).sum() - D

    lo, hi = 1e-8, 1.0
    while filled(hi) < 0:
        hi *= 2.0
        if hi > q_max:
            raise NoBracket(f"density {D} not attainable below q = {q_max}")
    q = brentq(filled, lo, hi, xtol=1e-13, rtol=8.9e-16)

    nodes, weights = _gauss_legendre(q, order)
    rho = _solve_rho(zeta, q, order)
    Z = solve_linear_integral_equation(
        zeta, q, lambda x: np.ones_like(np.asarray(x)), lambda x: np.zeros_like(np.asarray(x)),
        order, nodes=nodes, weights=weights)
    grid = ThermoGrid(zeta=zeta, D=D, q=q, order=order, nodes=nodes, weights=weights,
                      rho=rho, Z=Z, kF=np.nan)
    grid.kF = grid.momentum(q)
    return grid


def dressed_phase(grid, nu):
    """Dressed phase phi(., nu) for any real nu (inside or outside the Fermi zone)."""
    zeta = grid.zeta

    def rhs(x):
        x = np.asarray(x)
        if np.iscomplexobj(x):
            return bare_phase_c(x - nu, zeta) / (2 * np.pi)
        return bare_phase(x - np.real(nu), zeta) / (2 * np.pi)

    rhs_prime = lambda x: _kernel(x - nu, zeta) / (2 * np.pi)
    return solve_linear_integral_equation(zeta, grid.q, rhs, rhs_prime, grid.order,
                                          nodes=grid.nodes, weights=grid.weights)


class ShiftFunction:
    """Limiting shift function F = c Z + sum phi(., mu_p) - sum phi(., mu_h) [+ phi(., q)].

    Exposes boundary values F_plus/F_minus and supports evaluation at complex
    arguments and differentiation (both via the Nystrom interpolants).
    """

    def __init__(self, grid, terms, offset=0.0):
        self.grid = grid
        self._terms = terms          # list of (coefficient, GridFunction)
        self.offset = float(offset)  # additive integer r for the P_r shift F_r = F + r
        self.F_plus = float(np.real(self(grid.q)))
        self.F_minus = float(np.real(self(-grid.q)))

    def __call__(self, x):
        out = None
        for c, g in self._terms:
            v = c * g(x)
            out = v if out is None else out + v
        out = out + self.offset
        return out

    def deriv(self, x):
        out = None
        for c, g in self._terms:
            v = c * g.deriv(x)
            out = v if out is None else out + v
        return out

    def shifted(self, r):
        """F + r, sharing the same grid functions."""
        return ShiftFunction(self.grid, self._terms, offset=self.offset + r)

    @property
    def node_values(self):
        return np.real(self(self.grid.nodes))


def shift_function_limit(channel, grid, alpha, mu_p=(), mu_h=()):
    """Thermodynamic shift function for the z or plus channel."""
    if channel == "z":
        coeff = alpha
        extra = []
    elif channel == "plus":
        coeff = alpha - 0.5
        extra = [(1.0, grid.phi(grid.q))]
    else:
        raise ValueError(f"unknown channel {channel!r}")
    terms = [(coeff, grid.Z)]
    terms += [(1.0, grid.phi(mu)) for mu in mu_p]
    terms += [(-1.0, grid.phi(mu)) for mu in mu_h]
    terms += extra
    return ShiftFunction(grid, terms)


def excitation_momentum(grid, alpha, mu_p=(), mu_h=()):
    """Relative excitation momentum P_ex = 2 pi alpha D + sum [p(mu_p) - p(mu_h)]."""
    P = 2 * np.pi * alpha * grid.D
    for mu in mu_p:
        P += float(grid.momentum(mu))
    for mu in mu_h:
        P -= float(grid.momentum(mu))
    return P
