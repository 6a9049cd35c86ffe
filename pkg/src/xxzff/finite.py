"""Exact finite-size scalar products, norms and form-factor products.

Everything of magnitude sinh^M is handled in log space: functions here return
the complex logarithm of the quantity (real part = log magnitude, imaginary
part = phase, defined mod 2 pi).  Determinants of the reduced O(1) matrices are
taken with slogdet so no overflow can occur up to M of several thousand.
"""

from dataclasses import dataclass

import numpy as np

from .bethe import BetheState, counting_function, finite_shift_function

__all__ = [
    "LogComplex",
    "FiniteProductResult",
    "slogdet_c",
    "rectangle_contour",
    "slavnov_scalar_product",
    "norm_squared",
    "finite_product",
    "fredholm_scalar_product",
    "factorized_product",
    "log_slavnov_scalar_product",
    "log_norm_squared",
    "log_scalar_product_squared",
    "log_spin_product",
    "log_fredholm_scalar_product",
    "log_factorized_spin_product",
    "ff_product_with_distance",
    "excitation_momentum_finite",
]


@dataclass(frozen=True)
class LogComplex:
    """A complex number x stored as (log|x|, arg x), phase in (-pi, pi]."""

    log_mag: float
    phase: float

    @classmethod
    def from_log(cls, logval):
        logval = complex(logval)
        phase = np.angle(np.exp(1j * logval.imag))
        return cls(float(logval.real), float(phase))

    @property
    def value(self):
        return np.exp(self.log_mag + 1j * self.phase)

    def __mul__(self, other):
        return LogComplex.from_log(
            (self.log_mag + other.log_mag) + 1j * (self.phase + other.phase))

    def __truediv__(self, other):
        return LogComplex.from_log(
            (self.log_mag - other.log_mag) + 1j * (self.phase - other.phase))


@dataclass(frozen=True)
class FiniteProductResult:
    channel: str
    value: float
    P_ex_hat: float
    alpha: float
    M: int
    N: int

    def to_json(self):
        return {"channel": self.channel, "M": self.M, "N": self.N,
                "alpha": self.alpha, "S_N": self.value, "P_ex_hat": self.P_ex_hat}


def slogdet_c(A):
    """Complex log of det(A)."""
    sign, logabs = np.linalg.slogdet(np.asarray(A, dtype=complex))
    return logabs + np.log(sign)


def _logsinh(x):
    """Principal log of sinh; summing these and exponentiating reproduces the product."""
    return np.log(np.sinh(np.asarray(x, dtype=complex)))


def _t_weight(mu, nu, zeta):
    """t(mu, nu) = -i sin(zeta) / [sinh(mu - nu) sinh(mu - nu - i zeta)]."""
    d = mu - nu
    return -1j * np.sin(zeta) / (np.sinh(d) * np.sinh(d - 1j * zeta))


def _nu_set(ground, channel):
    """Dual rapidity set of the scalar product: ground roots, plus -i zeta/2
    for the spin-raising/lowering channel."""
    nus = np.asarray(ground.roots, dtype=complex)
    if channel == "plus":
        nus = np.append(nus, -0.5j * ground.params.zeta)
    return nus


def log_twisted_exponent(excited, ground, w):
    """log of e^{2 pi i F_hat(w)} continued to complex w, as the root product
    kappa prod sinh(mu_a - w + i zeta)/sinh(mu_a - w - i zeta)
          prod sinh(lam_a - w - i zeta)/sinh(lam_a - w + i zeta)."""
    zeta = ground.params.zeta
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    mu = excited.roots[:, None] - w[None, :]
    lam = ground.roots[:, None] - w[None, :]
    out = 2j * np.pi * excited.alpha
    out = out + (_logsinh(mu + 1j * zeta) - _logsinh(mu - 1j * zeta)).sum(axis=0)
    out = out + (_logsinh(lam - 1j * zeta) - _logsinh(lam + 1j * zeta)).sum(axis=0)
    return out


def log_slavnov_scalar_product(excited, ground):
    """log <psi_kappa({mu})| psi({nu})> for the z channel (nu = ground roots) or
    log <psi_kappa({mu})| B(-i zeta/2) |psi({nu})> for the plus channel
    (nu = ground roots plus -i zeta/2, which inserts the B operator).

    Row j of the rank-N_kappa matrix is rescaled by
    G_j = a(nu_j) prod_a sinh(mu_a - nu_j - i zeta), leaving the O(1) entries
    Omega_jk = t(mu_k, nu_j) - e_j t(nu_j, mu_k) with the unimodular-for-real-nu
    ratio e_j = kappa d/a(nu_j) prod_a sinh(mu_a-nu_j+i zeta)/sinh(mu_a-nu_j-i zeta).
    """
    p = excited.params
    zeta, M = p.zeta, p.M
    mu = np.asarray(excited.roots, dtype=complex)
    nu = _nu_set(ground, excited.spec.channel)
    nk = len(mu)
    if len(nu) != nk:
        raise ValueError("root sets must have equal size")

    dmu = mu[:, None] - nu[None, :]      # mu_a - nu_j, indices [a, j]
    with np.errstate(divide="ignore", invalid="ignore"):
        log_e = (2j * np.pi * p.alpha
                 + M * (_logsinh(nu + 0.5j * zeta) - _logsinh(nu - 0.5j * zeta))
                 + (_logsinh(dmu + 1j * zeta) - _logsinh(dmu - 1j * zeta)).sum(axis=0))
    # d(-i zeta/2) = 0 exactly: the last dual rapidity of the plus channel
    if excited.spec.channel == "plus":
        log_e[-1] = -np.inf
    e = np.exp(log_e)

    Om = _t_weight(mu[None, :], nu[:, None], zeta) \
        - e[:, None] * _t_weight(nu[:, None], mu[None, :], zeta)

    log_G = M * _logsinh(nu - 0.5j * zeta) + (_logsinh(dmu - 1j * zeta)).sum(axis=0)

    iu = np.triu_indices(nk, k=1)
    log_pref = M * _logsinh(mu + 0.5j * zeta).sum() \
        - _logsinh((mu[:, None] - mu[None, :])[iu[::-1]]).sum() \
        - _logsinh((nu[None, :] - nu[:, None])[iu[::-1]]).sum()
    return log_pref + log_G.sum() + slogdet_c(Om)


def log_norm_squared(state):
    """log <psi_kappa({mu})|psi_kappa({mu})> from the Gaudin-type determinant."""
    p = state.params
    zeta, M = p.zeta, p.M
    mu = np.asarray(state.roots, dtype=float)
    nk = len(mu)
    rho_k = counting_function(state, mu, order=1)
    diff = mu[:, None] - mu[None, :]
    from .model import bare_phase
    Theta = np.eye(nk) + bare_phase(diff, zeta, order=1) / (2 * np.pi * M * rho_k[None, :])

    off = ~np.eye(nk, dtype=bool)
    out = 1j * np.pi * nk
    # rho_k can be negative for roots past the counting-function maximum,
    # so take the complex log of 2 pi i M rho_k directly
    out += np.sum(np.log(2j * np.pi * M * rho_k.astype(complex))
                  + M * (_logsinh(mu + 0.5j * zeta) + _logsinh(mu - 0.5j * zeta)))
    out += _logsinh(diff.astype(complex) - 1j * zeta).sum()
    out -= _logsinh(diff[off].astype(complex)).sum()
    out += slogdet_c(Theta)
    return out


def log_scalar_product_squared(excited, ground):
    """log of |scalar product|^2 / (norm_mu^2 norm_lambda^2), real valued."""
    lsp = log_slavnov_scalar_product(excited, ground)
    return 2 * np.real(lsp) - np.real(log_norm_squared(excited)) \
        - np.real(log_norm_squared(ground))


def log_spin_product(excited, ground):
    """log |S_N| for the normalized squared scalar products entering the
    form-factor products: the z channel uses the scalar product itself, the
    plus channel divides out a^2(-i zeta/2) = (sin zeta)^(2M) (even M)."""
    out = log_scalar_product_squared(excited, ground)
    if excited.spec.channel == "plus":
        out -= 2 * excited.params.M * np.log(np.sin(excited.params.zeta))
    return out


def excitation_momentum_finite(excited, ground):
    """P_ex_hat = sum p0(mu) - sum p0(lambda)."""
    from .model import bare_momentum
    zeta = ground.params.zeta
    return float(bare_momentum(excited.roots, zeta).sum()
                 - bare_momentum(ground.roots, zeta).sum())


def rectangle_contour(q, delta, eta, n_per_side=64):
    """Counterclockwise rectangle with corners +-(q+delta) +- i eta.

    Returns (nodes, weights) with complex quadrature weights so that
    sum_j f(w_j) t_j approximates the contour integral of f.
    """
    x, w = np.polynomial.legendre.leggauss(n_per_side)
    a = q + delta
    corners = [-a - 1j * eta, a - 1j * eta, a + 1j * eta, -a + 1j * eta]
    nodes, weights = [], []
    for c0, c1 in zip(corners, corners[1:] + corners[:1]):
        mid, half = (c0 + c1) / 2, (c1 - c0) / 2
        nodes.append(mid + half * x)
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _K_kappa(w, zeta, kappa):
    return 1.0 / np.tanh(w + 1j * zeta) - kappa / np.tanh(w - 1j * zeta)


def _script_K_kappa(w, wp, zeta, kappa):
    return (np.sinh(wp + 1.5j * zeta)
            / (np.sinh(wp - 0.5j * zeta) * np.sinh(w - wp - 1j * zeta))
            - kappa * np.sinh(wp - 1.5j * zeta)
            / (np.sinh(wp + 0.5j * zeta) * np.sinh(w - wp + 1j * zeta)))


def log_fredholm_scalar_product(excited, ground, q, delta=None, eta=None,
                                n_per_side=64):
    """Same scalar products as log_slavnov_scalar_product, but from the
    contour-determinant representation on a rectangle surrounding the Fermi
    zone [-q, q].  q is the thermodynamic Fermi boundary for D = N/M."""
    p = excited.params
    zeta, M = p.zeta, p.M
    channel = excited.spec.channel
    mu = np.asarray(excited.roots, dtype=complex)
    lam = np.asarray(ground.roots, dtype=complex)
    N = len(lam)
    kappa = np.exp(2j * np.pi * p.alpha)

    rho_q = counting_function(ground, np.asarray([q]), order=1)[0]
    if delta is None:
        delta = 3.0 / (M * rho_q)
    if eta is None:
        eta = 0.4 * min(zeta, np.pi - zeta)
    w, t = rectangle_contour(q, delta, eta, n_per_side)

    e2piF = np.exp(log_twisted_exponent(excited, ground, w))
    F_lam = finite_shift_function(ground, excited, np.real(lam))

    if channel == "z":
        prod_w = np.exp((_logsinh(w[None, :] - mu[:, None])
                         + _logsinh(w[None, :] - lam[:, None] + 1j * zeta)
                         - _logsinh(w[None, :] - lam[:, None])
                         - _logsinh(w[None, :] - mu[:, None] + 1j * zeta)).sum(axis=0))
        U = -prod_w[:, None] / (1 - e2piF)[:, None] \
            * (_K_kappa(w[:, None] - w[None, :], zeta, kappa)
               - _K_kappa(-q - w[None, :], zeta, kappa))
    else:
        prod_w = np.exp((_logsinh(w[None, :] - mu[:, None])
                         - _logsinh(w[None, :] - mu[:, None] + 1j * zeta)).sum(axis=0)
                        + (_logsinh(w[None, :] - lam[:, None] + 1j * zeta)
                           - _logsinh(w[None, :] - lam[:, None])).sum(axis=0))
        U = prod_w[:, None] / (1 - e2piF)[:, None] \
            * _script_K_kappa(w[:, None], w[None, :], zeta, kappa)

    A = np.eye(len(w)) + U * t[None, :] / (2j * np.pi)
    log_det = slogdet_c(A)

    if channel == "z":
        F_mq = finite_shift_function(ground, excited, np.asarray([-q]))[0]
        dml = mu[:, None] - lam[None, :]
        log_pref = (_logsinh(dml - 1j * zeta) - _logsinh(-dml)).sum()
        log_pref += np.sum(M * (_logsinh(mu + 0.5j * zeta) + _logsinh(lam + 0.5j * zeta))
                           + np.log(np.exp(2j * np.pi * F_lam) - 1.0))
        log_pref += np.log((1 - kappa) / (1 - np.exp(2j * np.pi * F_mq)))
        log_pref += (_logsinh(q + lam - 1j * zeta) - _logsinh(q + mu - 1j * zeta)).sum()
    else:
        dml = mu[:, None] - lam[None, :]
        log_pref = (M + 1) * _logsinh(np.asarray(-1j * zeta))
        log_pref += np.sum(M * _logsinh(lam - 0.5j * zeta)
                           + np.log(1.0 - np.exp(2j * np.pi * F_lam)))
        log_pref += _logsinh(lam - 0.5j * zeta).sum() - _logsinh(mu + 0.5j * zeta).sum()
        log_pref += np.sum(M * _logsinh(mu + 0.5j * zeta)
                           + (_logsinh(dml - 1j * zeta) - _logsinh(dml)).sum(axis=1))
    return log_pref + log_det


def log_factorized_spin_product(excited, ground, q, delta=None, eta=None,
                                n_per_side=64):
    """log |S_N| from the factorized smooth/discrete representation.

    Exactly equivalent (at finite M) to log_spin_product, but organized as
    amplitude * exp(C) * D, which is the starting point of the large-M
    analysis.  Returns (log_S, parts) with the three pieces for inspection.
    """
    from .model import bare_phase
    p = excited.params
    zeta, M = p.zeta, p.M
    channel = excited.spec.channel
    mu = np.asarray(excited.roots, dtype=complex)
    lam0 = np.asarray(ground.roots, dtype=float)
    kappa = np.exp(2j * np.pi * p.alpha)

    if channel == "plus":
        lam_ext = ground.root_of_label(len(lam0) + 1)
        lam = np.append(lam0, lam_ext)
    else:
        lam = lam0
    lamc = lam.astype(complex)
    N = len(lam)    # N for the z channel, N+1 for the plus channel

    # C: double product of sinh ratios
    dll = lamc[:, None] - lamc[None, :]
    dmm = mu[:, None] - mu[None, :]
    dlm = lamc[:, None] - mu[None, :]
    log_C = np.real((_logsinh(dlm - 1j * zeta) + _logsinh(-dlm - 1j * zeta)
                     - _logsinh(dll - 1j * zeta) - _logsinh(dmm - 1j * zeta)).sum())
    if channel == "plus":
        log_C += 2 * np.real((_logsinh(lamc - lam_ext - 1j * zeta)
                              - _logsinh(mu - lam_ext - 1j * zeta)).sum())

    # D: squared Cauchy determinant with discrete densities
    F_lam = finite_shift_function(ground, excited, lam)
    rho_lam = counting_function(ground, lam, order=1)
    rho_mu = counting_function(excited, np.real(mu), order=1)
    log_D = 2 * np.real(slogdet_c(1.0 / np.sinh(mu[:, None] - lamc[None, :])))
    log_D += np.sum(2 * np.log(np.abs(np.sin(np.pi * F_lam)))
                    - np.log(np.pi ** 2 * M ** 2 * rho_lam * rho_mu))
    if channel == "plus":
        log_D += (np.log(M * np.pi ** 2 * rho_lam[-1])
                  - 2 * np.log(np.abs(np.sin(np.pi * F_lam[-1])))
                  + 2 * np.real(_logsinh(lam_ext - mu).sum())
                  - 2 * np.real(_logsinh(lam_ext - lamc[:-1]).sum()))

    # A: Fredholm determinant over the contour against the Gaudin determinants
    diffl = lam0[:, None] - lam0[None, :]
    rho_l0 = counting_function(ground, lam0, order=1)
    Theta_l = np.eye(len(lam0)) + bare_phase(diffl, zeta, order=1) \
        / (2 * np.pi * M * rho_l0[None, :])
    diffm = np.real(mu[:, None] - mu[None, :])
    Theta_m = np.eye(len(mu)) + bare_phase(diffm, zeta, order=1) \
        / (2 * np.pi * M * rho_mu[None, :])
    log_dets = np.real(slogdet_c(Theta_l)) + np.real(slogdet_c(Theta_m))

    if channel == "z":
        F_mq = finite_shift_function(ground, excited, np.asarray([-q]))[0]
        log_A = 2 * np.log(np.abs(np.sin(np.pi * p.alpha) / np.sin(np.pi * F_mq)))
        log_A += 2 * np.real((_logsinh(q + lamc - 1j * zeta)
                              - _logsinh(q + mu - 1j * zeta)).sum())
        log_A += 2 * _fredholm_logabs_det(excited, ground, q, delta, eta, n_per_side)
        log_A -= log_dets
    else:
        log_A = np.log(np.sin(zeta) / (2 * np.pi))
        log_A += 2 * np.real((_logsinh(lamc[:-1] - 0.5j * zeta)).sum()
                             - (_logsinh(mu - 0.5j * zeta)).sum())
        log_A += 2 * _fredholm_logabs_det(excited, ground, q, delta, eta, n_per_side)
        log_A -= log_dets
    return log_A + log_C + log_D, {"log_A": log_A, "log_C": log_C, "log_D": log_D}


def _fredholm_logabs_det(excited, ground, q, delta, eta, n_per_side):
    """log |det_Gamma_q [I + U/(2 pi i)]| alone (shared by the factorized form)."""
    p = excited.params
    zeta, M = p.zeta, p.M
    mu = np.asarray(excited.roots, dtype=complex)
    lam = np.asarray(ground.roots, dtype=complex)
    kappa = np.exp(2j * np.pi * p.alpha)
    rho_q = counting_function(ground, np.asarray([q]), order=1)[0]
    if delta is None:
        delta = 3.0 / (M * rho_q)
    if eta is None:
        eta = 0.4 * min(zeta, np.pi - zeta)
    w, t = rectangle_contour(q, delta, eta, n_per_side)
    e2piF = np.exp(log_twisted_exponent(excited, ground, w))
    if excited.spec.channel == "z":
        prod_w = np.exp((_logsinh(w[None, :] - mu[:, None])
                         + _logsinh(w[None, :] - lam[:, None] + 1j * zeta)
                         - _logsinh(w[None, :] - lam[:, None])
                         - _logsinh(w[None, :] - mu[:, None] + 1j * zeta)).sum(axis=0))
        U = -prod_w[:, None] / (1 - e2piF)[:, None] \
            * (_K_kappa(w[:, None] - w[None, :], zeta, kappa)
               - _K_kappa(-q - w[None, :], zeta, kappa))
    else:
        prod_w = np.exp((_logsinh(w[None, :] - mu[:, None])
                         - _logsinh(w[None, :] - mu[:, None] + 1j * zeta)).sum(axis=0)
                        + (_logsinh(w[None, :] - lam[:, None] + 1j * zeta)
                           - _logsinh(w[None, :] - lam[:, None])).sum(axis=0))
        U = prod_w[:, None] / (1 - e2piF)[:, None] \
            * _script_K_kappa(w[:, None], w[None, :], zeta, kappa)
    A = np.eye(len(w)) + U * t[None, :] / (2j * np.pi)
    return np.real(slogdet_c(A))


def slavnov_scalar_product(excited, ground):
    """Scalar product (B-matrix element for the plus channel) as a LogComplex."""
    return LogComplex.from_log(log_slavnov_scalar_product(excited, ground))


def norm_squared(state):
    """Squared norm of a twisted Bethe state as a LogComplex (phase ~ 0)."""
    return LogComplex.from_log(log_norm_squared(state))


def fredholm_scalar_product(excited, ground, q, delta=None, eta=None, n_per_side=64):
    """Contour-determinant representation of the scalar product, as LogComplex."""
    return LogComplex.from_log(
        log_fredholm_scalar_product(excited, ground, q, delta, eta, n_per_side))


def finite_product(excited, ground):
    """Normalized squared scalar product S_N (z channel: |SP|^2 / norms;
    plus channel: the same with the a^2(-i zeta/2) prefactor magnitude)."""
    p = excited.params
    value = float(np.exp(log_spin_product(excited, ground)))
    return FiniteProductResult(
        channel=excited.spec.channel, value=value,
        P_ex_hat=excitation_momentum_finite(excited, ground),
        alpha=p.alpha, M=p.M, N=ground.params.N)


def factorized_product(excited, ground, q, **kwargs):
    """Smooth/discrete factorization of S_N: returns (S_N, parts dict)."""
    log_S, parts = log_factorized_spin_product(excited, ground, q, **kwargs)
    return float(np.exp(log_S)), parts


def second_twist_derivative(values, alphas):
    """d^2/d alpha^2 at alpha = 0 of an even-order-alpha^2 quantity S(alpha),
    from S(alpha_k)/alpha_k^2 samples by polynomial extrapolation in alpha^2."""
    alphas = np.asarray(alphas, dtype=float)
    h = alphas ** 2
    v = np.asarray(values, dtype=float) / h
    # Neville to h = 0
    n = len(h)
    tab = v.copy()
    for level in range(1, n):
        tab = (h[level:] * tab[:-1] - h[:-level] * tab[1:]) / (h[level:] - h[:-level])
    return 2.0 * float(tab[0])


def ff_product_with_distance(solve, channel, distance=0,
                             alphas=(1e-2, 5e-3, 2.5e-3)):
    """Form-factor product F(m') F(m) with m - m' = distance.

    solve(alpha) must return a pair (excited, ground) of Bethe states at twist
    alpha (ground always untwisted).  For the z channel the twist second
    derivative is taken numerically at alpha = 0; for the plus channel the
    product is the alpha = 0 value of the spin product directly.

    Returns (value, P_ex, log_magnitude_of_S) where value is complex.
    """
    if channel == "z":
        exc0, grd0 = solve(0.0)
        P_ex = excitation_momentum_finite(exc0, grd0)
        vals = []
        for a in alphas:
            # S(alpha) carries odd powers of alpha for a generic excitation;
            # averaging over +-alpha leaves a pure series in alpha^2
            exc, grd = solve(a)
            sp = np.exp(log_spin_product(exc, grd))
            exc, grd = solve(-a)
            sm = np.exp(log_spin_product(exc, grd))
            vals.append(0.5 * (sp + sm))
        d2 = second_twist_derivative(vals, alphas)
        mag = 2.0 / np.pi ** 2 * np.sin(P_ex / 2) ** 2 * d2
        return np.exp(1j * distance * P_ex) * mag, P_ex, np.log(np.abs(d2))
    if channel == "plus":
        exc, grd = solve(0.0)
        P_ex = excitation_momentum_finite(exc, grd)
        log_S = log_spin_product(exc, grd)
        mag = np.exp(log_S)
        return (-1) ** distance * np.exp(1j * distance * P_ex) * mag, P_ex, log_S
    raise ValueError(f"unknown channel {channel!r}")
