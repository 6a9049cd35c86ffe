"""Thermodynamic-limit asymptotics of the form-factor products.

The prediction for a product of form factors splits into an explicit power
M^(-theta), a smooth part (Cauchy transforms of the shift function plus a
ratio of Fredholm determinants) and a discrete part (Barnes G functions and
Gamma-ratio coefficients).  Two regimes are implemented: all particle/hole
rapidities strictly inside resp. outside the Fermi zone ("away"), and all
rapidities collapsed on the Fermi boundaries ("critical", the P_r classes).
"""

from dataclasses import dataclass

import numpy as np
import mpmath
from scipy.special import gammaln

from .finite import rectangle_contour, slogdet_c, second_twist_derivative
from .thermo import shift_function_limit, excitation_momentum
from .model import bare_phase

__all__ = [
    "OnCut",
    "GammaPole",
    "RegimeViolation",
    "ContourSingularity",
    "FormFactorPrediction",
    "barnes_log_G",
    "barnes_G",
    "cauchy_transform",
    "smooth_coefficient_C",
    "smooth_amplitude_A",
    "smooth_part",
    "D_functional",
    "varphi",
    "J_functional",
    "discrete_blocks",
    "R_coefficient",
    "discrete_part",
    "predict_product",
    "counting_inverse",
    "label_product_limit",
    "remainder_sum",
]


class OnCut(ValueError):
    """Cauchy transform requested on the support interval itself."""


class GammaPole(ValueError):
    """A Gamma-function argument hit a nonpositive integer."""


class RegimeViolation(ValueError):
    """Rapidity too close to the Fermi boundary for the away-regime formulas."""


class ContourSingularity(RuntimeError):
    """A kernel singularity lies on the quadrature contour."""


# ---------------------------------------------------------------------------
# Barnes G

def barnes_log_G(z):
    """log G(z) for real z, with G the Barnes function, G(z+1) = Gamma(z) G(z)."""
    z = float(z)
    if z <= 0 and z == int(z):
        raise GammaPole(f"Barnes G has a zero/pole structure at z = {z}")
    return float(mpmath.log(mpmath.barnesg(z)).real)


def barnes_G(z):
    return float(mpmath.barnesg(float(z)))


# ---------------------------------------------------------------------------
# Cauchy transform

def cauchy_transform(F, w):
    """i pi periodic Cauchy transform (1/2pi i) int_{-q}^{q} F(lam) coth(lam-w) dlam.

    Valid for any w off the support interval (mod i pi).  Points close to the
    interval are handled by subtracting the constant F(Re w): the remainder is
    a mild integrand and the constant part integrates in closed form.
    """
    grid = F.grid
    w = np.asarray(w, dtype=complex)
    scalar = w.ndim == 0
    ws = np.atleast_1d(w).astype(complex)
    # coth is i pi periodic: reduce Im w to [-pi/2, pi/2)
    im = np.mod(ws.imag + np.pi / 2, np.pi) - np.pi / 2
    ws = ws.real + 1j * im
    if np.any((np.abs(im) < 1e-8) & (np.abs(ws.real) <= grid.q + 1e-12)):
        raise OnCut("evaluation point on the support interval")

    lam, wq = grid.nodes, grid.weights
    fvals = np.real(F(lam))
    c = np.clip(ws.real, -grid.q, grid.q)
    Fc = np.real(F(c))
    coth = 1.0 / np.tanh(lam[None, :] - ws[:, None])
    main = ((fvals[None, :] - Fc[:, None]) * coth) @ wq
    # int coth(lam - w) dlam = Log sinh(q-w) - Log sinh(-q-w); with Im w
    # reduced to (-pi/2, pi/2) the principal logs are continuous in lam
    closed = np.log(np.sinh(grid.q - ws)) - np.log(np.sinh(-grid.q - ws))
    out = (main + Fc * closed) / (2j * np.pi)
    return out[0] if scalar else out


# ---------------------------------------------------------------------------
# Smooth part

def _C0(grid, F):
    """C_0[F] = -int int F(lam) F(mu) / sinh^2(lam - mu - i zeta)."""
    lam, wq = grid.nodes, grid.weights
    f = np.real(F(lam))
    ker = 1.0 / np.sinh(lam[:, None] - lam[None, :] - 1j * grid.zeta) ** 2
    val = -(f * wq) @ ker @ (f * wq)
    return val


def smooth_coefficient_C(channel, grid, F, mu_p=(), mu_h=()):
    """Smooth exponent C_n for the z or plus channel.

    Consists of the double-integral functional C_0, Cauchy-transform values at
    the particle/hole rapidities shifted by +-i zeta, and pairwise sinh logs;
    the plus channel adds Fermi-boundary terms.
    """
    zeta, q = grid.zeta, grid.q
    mu_p = np.asarray(mu_p, dtype=float)
    mu_h = np.asarray(mu_h, dtype=float)
    out = _C0(grid, F)
    if len(mu_h):
        pts = np.concatenate([mu_h - 1j * zeta, mu_h + 1j * zeta,
                              mu_p - 1j * zeta, mu_p + 1j * zeta])
        Fv = cauchy_transform(F, pts)
        n = len(mu_h)
        out += 2j * np.pi * (Fv[:n].sum() + Fv[n:2 * n].sum()
                             - Fv[2 * n:3 * n].sum() - Fv[3 * n:].sum())
        hp = mu_h[:, None] - mu_p[None, :]
        pp = mu_p[:, None] - mu_p[None, :]
        hh = mu_h[:, None] - mu_h[None, :]
        out += np.sum(np.log(np.sinh(hp - 1j * zeta)) + np.log(np.sinh(-hp - 1j * zeta))
                      - np.log(np.sinh(pp - 1j * zeta)) - np.log(np.sinh(hh - 1j * zeta)))
    if channel == "plus":
        Fq = cauchy_transform(F, np.array([q + 1j * zeta, q - 1j * zeta]))
        out -= 2j * np.pi * Fq.sum()
        if len(mu_h):
            out += np.sum(np.log(np.sinh(mu_h - q - 1j * zeta))
                          + np.log(np.sinh(mu_h - q + 1j * zeta))
                          - np.log(np.sinh(mu_p - q - 1j * zeta))
                          - np.log(np.sinh(mu_p - q + 1j * zeta)))
    elif channel != "z":
        raise ValueError(f"unknown channel {channel!r}")
    out = complex(out)
    return float(out.real)


def _Phi(w, mu_p, mu_h, zeta):
    out = np.ones_like(np.asarray(w, dtype=complex))
    for mp, mh in zip(mu_p, mu_h):
        out = out * (np.sinh(w - mp) * np.sinh(w - mh + 1j * zeta)
                     / (np.sinh(w - mh) * np.sinh(w - mp + 1j * zeta)))
    return out


def _base_determinant(grid):
    """det [I + K/(2 pi)] on [-q, q] by Nystrom."""
    lam, wq = grid.nodes, grid.weights
    K = bare_phase(lam[:, None] - lam[None, :], grid.zeta, order=1)
    sign, logabs = np.linalg.slogdet(np.eye(len(lam)) + K * wq[None, :] / (2 * np.pi))
    return sign * np.exp(logabs)


def _contour_determinant(channel, grid, F, mu_p, mu_h, kappa,
                         delta=0.1, eta=None, n_per_side=64):
    """det [I + U/(2 pi i)] on the rectangle contour around [-q, q]."""
    zeta, q = grid.zeta, grid.q
    if eta is None:
        eta = 0.4 * min(zeta, np.pi - zeta)
    wn, wt = rectangle_contour(q, delta, eta, n_per_side)
    Fw = F(wn)
    Fc = cauchy_transform(F, wn)
    Fcz = cauchy_transform(F, wn + 1j * zeta)
    denom = 1.0 - np.exp(2j * np.pi * Fw)
    if np.min(np.abs(denom)) < 1e-10:
        raise ContourSingularity("1 - e^{2 pi i F} vanishes on the contour")
    phi = _Phi(wn, mu_p, mu_h, zeta)
    row = np.exp(2j * np.pi * (Fc - Fcz)) / denom
    if channel == "z":
        Kk = (1.0 / np.tanh(wn[:, None] - wn[None, :] + 1j * zeta)
              - kappa / np.tanh(wn[:, None] - wn[None, :] - 1j * zeta))
        Kq = (1.0 / np.tanh(-q - wn + 1j * zeta)
              - kappa / np.tanh(-q - wn - 1j * zeta))
        U = -(phi * row)[:, None] * (Kk - Kq[None, :])
    elif channel == "plus":
        wp = wn[None, :]
        scrK = (np.sinh(wp + 1.5j * zeta)
                / (np.sinh(wp - 0.5j * zeta) * np.sinh(wn[:, None] - wp - 1j * zeta))
                - kappa * np.sinh(wp - 1.5j * zeta)
                / (np.sinh(wp + 0.5j * zeta) * np.sinh(wn[:, None] - wp + 1j * zeta)))
        edge = np.sinh(wn - q) / np.sinh(wn - q + 1j * zeta)
        U = (phi * edge * row)[:, None] * scrK
    else:
        raise ValueError(f"unknown channel {channel!r}")
    A = np.eye(len(wn), dtype=complex) + U * wt[None, :] / (2j * np.pi)
    return np.exp(slogdet_c(A))


def smooth_amplitude_A(channel, grid, F, mu_p=(), mu_h=(), alpha=0.0,
                       strip_twist_zero=False, **contour_kwargs):
    """Smooth amplitude A_n: squared-modulus prefactors times the squared
    ratio of the contour Fredholm determinant to the one on [-q, q].

    strip_twist_zero replaces the (sin pi alpha)^2 factor of the z channel by
    pi^2, exposing the coefficient of alpha^2 in the limit alpha -> 0.
    """
    zeta, q = grid.zeta, grid.q
    mu_p = tuple(mu_p)
    mu_h = tuple(mu_h)
    kappa = np.exp(2j * np.pi * alpha)
    ratio = (_contour_determinant(channel, grid, F, mu_p, mu_h, kappa,
                                  **contour_kwargs)
             / _base_determinant(grid))
    if channel == "z":
        Fmq = float(np.real(F(-q)))
        pref = np.pi ** 2 if strip_twist_zero else np.sin(np.pi * alpha) ** 2
        pref = pref / np.sin(np.pi * Fmq) ** 2
        inner = np.exp(-2j * np.pi * cauchy_transform(F, -q + 1j * zeta))
        for mp, mh in zip(mu_p, mu_h):
            inner = inner * np.sinh(q + mh + 1j * zeta) / np.sinh(q + mp + 1j * zeta)
        return float(pref * np.abs(inner) ** 2 * np.abs(ratio) ** 2)
    if channel == "plus":
        inner = (np.exp(-2j * np.pi * cauchy_transform(F, 0.5j * zeta))
                 / np.sinh(q - 0.5j * zeta))
        for mp, mh in zip(mu_p, mu_h):
            inner = inner * np.sinh(mh - 0.5j * zeta) / np.sinh(mp - 0.5j * zeta)
        val = np.sin(zeta) / (2 * np.pi * kappa) * np.abs(inner * ratio) ** 2
        return float(np.real(val))
    raise ValueError(f"unknown channel {channel!r}")


def smooth_part(channel, grid, F, mu_p=(), mu_h=(), alpha=0.0, P_ex=None,
                strip_twist_zero=False, **contour_kwargs):
    """S_zz = (2/pi^2) sin^2(P_ex/2) A e^C, S_pm = A e^C."""
    A = smooth_amplitude_A(channel, grid, F, mu_p, mu_h, alpha,
                           strip_twist_zero=strip_twist_zero, **contour_kwargs)
    C = smooth_coefficient_C(channel, grid, F, mu_p, mu_h)
    if channel == "z":
        if P_ex is None:
            raise ValueError("P_ex required for the z channel")
        return 2.0 / np.pi ** 2 * np.sin(P_ex / 2) ** 2 * A * np.exp(C)
    return A * np.exp(C)


# ---------------------------------------------------------------------------
# Discrete part

def _C1(grid, F):
    """Antisymmetrized double integral plus the two boundary integrals of the
    discrete functional exponent; the integrand diagonal is a removable limit."""
    lam, wq = grid.nodes, grid.weights
    q = grid.q
    f = np.real(F(lam))
    fp = np.real(F.deriv(lam))
    h = 1e-4
    fpp = np.real(F.deriv(lam + h) - F.deriv(lam - h)) / (2 * h)
    num = fp[:, None] * f[None, :] - f[:, None] * fp[None, :]
    den = 2.0 * np.tanh(lam[:, None] - lam[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        integ = num / den
    np.fill_diagonal(integ, (fp ** 2 - f * fpp) / 2.0)
    out = wq @ integ @ wq
    Fp, Fm = float(np.real(F(q))), float(np.real(F(-q)))
    # boundary integrands have removable endpoint zeros of tanh cancelling
    bp = (Fp - f) / np.tanh(q - lam)
    bm = (Fm - f) / np.tanh(q + lam)
    out += Fp * (wq @ bp) + Fm * (wq @ bm)
    return float(out)


def D_functional(channel, grid, F):
    """Barnes-G functional of the discrete part, z channel or plus channel."""
    q = grid.q
    Fp, Fm = float(np.real(F(q))), float(np.real(F(-q)))
    rq = float(np.real(grid.rho(q)))
    base = rq * np.sinh(2 * q)
    log_out = (2 * barnes_log_G(1 - Fm) + 2 * barnes_log_G(1 + Fp)
               + (Fm - Fp) * np.log(2 * np.pi)
               - (Fm ** 2 + Fp ** 2) * np.log(base)
               + _C1(grid, F))
    if channel == "plus":
        lam, wq = grid.nodes, grid.weights
        f = np.real(F(lam))
        edge = (Fp - f) / np.tanh(q - lam)
        log_out += (np.log(np.sinh(2 * q)) + 2 * gammaln(1 + Fp)
                    - (1 + 2 * Fp) * np.log(base) + 2 * (wq @ edge))
    elif channel != "z":
        raise ValueError(f"unknown channel {channel!r}")
    return float(np.exp(log_out))


def varphi(grid, lam, mu):
    """phi(lam, mu) = 2 pi sinh(lam - mu) / (p(lam) - p(mu)); diagonal limit 1/rho."""
    lam = float(lam)
    mu = float(mu)
    if abs(lam - mu) < 1e-7:
        return float(1.0 / np.real(grid.rho(lam)))
    return float(2 * np.pi * np.sinh(lam - mu)
                 / (grid.momentum(lam) - grid.momentum(mu)))


def _pv_coth_integral(grid, F, mu):
    """Principal value of int_{-q}^{q} F(lam) coth(lam - mu) dlam."""
    lam, wq = grid.nodes, grid.weights
    q = grid.q
    f = np.real(F(lam))
    if abs(abs(mu) - q) < 1e-9:
        raise RegimeViolation(f"rapidity {mu} on the Fermi boundary")
    Fm = float(np.real(F(mu))) if abs(mu) < q else None
    if Fm is None:
        # mu outside the zone: integrand regular
        return float((f / np.tanh(lam - mu)) @ wq)
    x = lam - mu
    reg = np.where(np.abs(x) > 1e-6,
                   (f - Fm) / np.tanh(np.where(np.abs(x) > 1e-6, x, 1.0)),
                   np.real(F.deriv(lam)))
    return float(reg @ wq + Fm * np.log(np.sinh(q - mu) / np.sinh(q + mu)))


def J_functional(grid, F, omega):
    """Exponent J[F](omega) built from the dressed momentum and shift function.

    The integrand combines coth(lam - omega) with p'(lam)/(p(lam) - p(omega))
    so that the singularities at lam = omega cancel; both groupings are kept
    regular explicitly.
    """
    lam, wq = grid.nodes, grid.weights
    omega = float(omega)
    f = np.real(F(lam))
    Fo = float(np.real(F(omega)))
    p = np.real(grid.momentum(lam))
    po = float(np.real(grid.momentum(omega)))
    pp = np.real(grid.momentum_deriv(lam))
    ppo = float(np.real(grid.momentum_deriv(omega)))
    x = lam - omega
    small = np.abs(x) < 1e-5
    xs = np.where(small, 1.0, x)
    dp = np.where(small, 1.0, p - po)
    # rho'(omega) for the diagonal limit of coth - p'/(p - p(omega))
    h = 1e-4
    pppo = float(np.real(grid.rho.deriv(omega))) * 2 * np.pi
    g1 = np.where(small, -pppo / (2 * ppo), 1.0 / np.tanh(xs) - pp / dp)
    g2 = np.where(small, np.real(F.deriv(lam)) * 1.0, (f - Fo) / dp * pp)
    # second grouping: (F - F(omega)) p'/(p - p(omega)) -> F'(omega) as x -> 0
    return float(2.0 * ((f * g1 + g2) @ wq))


def _log_gamma_pair(a, b):
    """log |Gamma(a)/Gamma(b)| for the recurring pattern where a and b may be
    nonpositive integers together (then the ratio is a finite reflection limit)."""
    def is_nonpos_int(x):
        return x <= 0 and abs(x - round(x)) < 1e-12
    if is_nonpos_int(a) and is_nonpos_int(b):
        # Gamma(a)/Gamma(b) = (-1)^(b-a) Gamma(1-b)/Gamma(1-a) as a limit
        return gammaln(1 - b) - gammaln(1 - a)
    if is_nonpos_int(a) or is_nonpos_int(b):
        raise GammaPole(f"isolated Gamma pole in ratio Gamma({a})/Gamma({b})")
    return gammaln(a) - gammaln(b)


def discrete_blocks(grid, F, mu, k_int, kind, N, channel="z"):
    """One particle or hole block of the finite-size discrete part.

    kind "particle" gives P_N(mu_p, p), kind "hole" gives H_N(mu_h, h); the
    plus channel applies the tilde corrections with N standing for N + 1.
    """
    J = J_functional(grid, F, mu)
    Fm = float(np.real(F(mu)))
    rho = float(np.real(grid.rho(mu)))
    if kind == "particle":
        p = int(k_int)
        logv = J - np.log(rho)
        logv += 2 * _log_gamma_pair(p, p - N)
        logv += 2 * (gammaln(p - N + Fm) - gammaln(p + Fm))
        out = float(np.exp(logv))
        if channel == "plus":
            out *= (N - p - Fm) ** 2 * varphi(grid, grid.q, mu) ** 2
        return out
    if kind == "hole":
        h = int(k_int)
        logv = (np.log(np.sin(np.pi * Fm) ** 2) - J - np.log(np.pi ** 2 * rho)
                + 2 * (gammaln(h + Fm) + gammaln(N + 1 - h - Fm)
                       - gammaln(h) - gammaln(N + 1 - h)))
        out = float(np.exp(logv))
        if channel == "plus":
            out *= (N - h - Fm) ** (-2) * varphi(grid, grid.q, mu) ** (-2)
        return out
    raise ValueError(f"unknown kind {kind!r}")


def E0_factor(grid, mu_p, mu_h, p_ints, h_ints):
    """Cauchy-type combinatorial factor of the finite-size discrete part."""
    n = len(mu_p)
    out = 1.0
    for j in range(n):
        for k in range(n):
            if j != k:
                out *= ((h_ints[j] - h_ints[k]) * (p_ints[j] - p_ints[k])
                        * varphi(grid, mu_h[j], mu_h[k]) * varphi(grid, mu_p[j], mu_p[k]))
            out /= ((p_ints[j] - h_ints[k]) ** 2
                    * varphi(grid, mu_p[j], mu_h[k]) ** 2)
    return float(out)


def R_coefficient(p, h, F):
    """Gamma-ratio coefficient of the critical discrete part."""
    p = [int(v) for v in p]
    h = [int(v) for v in h]
    lognum = 0.0
    for i in range(len(p)):
        for j in range(i):
            lognum += 2 * np.log(abs(p[i] - p[j]))
    for i in range(len(h)):
        for j in range(i):
            lognum += 2 * np.log(abs(h[i] - h[j]))
    for pi in p:
        for hi in h:
            lognum -= 2 * np.log(abs(pi + hi - 1))
    for pi in p:
        if pi + F <= 0 and abs(pi + F - round(pi + F)) < 1e-12:
            raise GammaPole(f"Gamma({pi + F}) pole in R coefficient")
        lognum += 2 * (gammaln(pi + F) - gammaln(pi))
    for hi in h:
        if hi - F <= 0 and abs(hi - F - round(hi - F)) < 1e-12:
            raise GammaPole(f"Gamma({hi - F}) pole in R coefficient")
        lognum += 2 * (gammaln(hi - F) - gammaln(hi))
    return float(np.exp(lognum))


def discrete_part(channel, regime, grid, F, mu_p=(), mu_h=(), r=0,
                  p_plus=(), h_plus=(), p_minus=(), h_minus=(), margin=0.05):
    """Discrete part D and exponent theta for either regime.

    away: rapidity lists mu_p (outside the zone) and mu_h (inside), every one
    at distance > margin from +-q.  critical: P_r integers counted from the
    Fermi edges; F must be the shift function of the class representative.
    Returns (D, theta).
    """
    q = grid.q
    Fp, Fm = float(np.real(F(q))), float(np.real(F(-q)))
    if regime == "away":
        n = len(mu_p)
        for mu in list(mu_p) + list(mu_h):
            if abs(abs(mu) - q) < margin:
                raise RegimeViolation(
                    f"rapidity {mu} within {margin} of the Fermi boundary")
        if channel == "z":
            theta = 2 * n + Fp ** 2 + Fm ** 2
        else:
            theta = 2 * n + (Fp + 1) ** 2 + Fm ** 2
        D = D_functional(channel, grid, F)
        if n:
            cauchy = np.linalg.det(
                1.0 / np.sinh(np.asarray(mu_p)[:, None] - np.asarray(mu_h)[None, :]))
            D *= float(cauchy) ** 2
            for mp, mh in zip(mu_p, mu_h):
                Fh = float(np.real(F(mh)))
                D *= (np.sin(np.pi * Fh) ** 2
                      / (np.pi ** 2 * np.real(grid.rho(mh)) * np.real(grid.rho(mp))))
                D *= np.exp(2 * (_pv_coth_integral(grid, F, mp)
                                 - _pv_coth_integral(grid, F, mh)))
                if channel == "plus":
                    D *= (np.sinh(mp - q) / np.sinh(mh - q)) ** 2
        return float(D), float(theta)
    if regime == "critical":
        Fr = F.shifted(r)
        Frp, Frm = Fr.F_plus, Fr.F_minus
        if channel == "z":
            theta = Frp ** 2 + Frm ** 2
            gratio = (2 * barnes_log_G(1 + Fp) + 2 * barnes_log_G(1 - Fm)
                      - 2 * barnes_log_G(1 + Frp) - 2 * barnes_log_G(1 - Frm))
            Rp = R_coefficient(p_plus, h_plus, Fp)
            Rm = R_coefficient(p_minus, h_minus, -Fm)
        elif channel == "plus":
            theta = (1 + Frp) ** 2 + Frm ** 2
            gratio = (2 * barnes_log_G(2 + Fp) + 2 * barnes_log_G(1 - Fm)
                      - 2 * barnes_log_G(2 + Frp) - 2 * barnes_log_G(1 - Frm))
            Rp = R_coefficient(p_plus, h_plus, 1 + Fp)
            Rm = R_coefficient(p_minus, h_minus, -Fm)
        else:
            raise ValueError(f"unknown channel {channel!r}")
        D = (D_functional(channel, grid, Fr) * np.exp(gratio)
             * (np.sin(np.pi * Frp) / np.pi) ** (2 * len(h_plus))
             * (np.sin(np.pi * Frm) / np.pi) ** (2 * len(h_minus))
             * Rp * Rm)
        return float(D), float(theta)
    raise ValueError(f"unknown regime {regime!r}")


# ---------------------------------------------------------------------------
# Full prediction

@dataclass(frozen=True)
class FormFactorPrediction:
    """Thermodynamic-limit prediction for one form-factor product."""

    channel: str          # "zz" or "pm"
    regime: str           # "away" or "critical"
    theta: float
    P_ex: float
    smooth: float
    discrete: float

    def assembled(self, distance, M):
        mag = M ** (-self.theta) * self.smooth * self.discrete
        phase = np.exp(1j * distance * self.P_ex)
        if self.channel == "pm":
            phase = phase * (-1) ** distance
        return phase * mag

    def to_json(self):
        return {"channel": self.channel, "regime": self.regime,
                "theta": self.theta, "P_ex": self.P_ex,
                "smooth": self.smooth, "discrete": self.discrete}


def _critical_rapidities(r, p_plus, h_plus, p_minus, h_minus, q):
    mu_p = [q] * len(p_plus) + [-q] * len(p_minus)
    mu_h = [q] * len(h_plus) + [-q] * len(h_minus)
    return mu_p, mu_h


def predict_product(channel, regime, grid, mu_p=(), mu_h=(), r=0,
                    p_plus=(), h_plus=(), p_minus=(), h_minus=(),
                    alphas=(1e-2, 5e-3, 2.5e-3), **contour_kwargs):
    """Assemble the full prediction of the product of two conjugate form
    factors: exponent, excitation momentum, smooth and discrete parts.

    channel "zz" realizes the twist second derivative at zero twist through
    the same symmetric small-alpha extrapolation as the finite-size side;
    channel "pm" is evaluated directly at zero twist.
    """
    bare = "z" if channel == "zz" else "plus"
    if regime == "critical":
        mu_p, mu_h = _critical_rapidities(r, p_plus, h_plus, p_minus, h_minus, grid.q)
    mu_p = list(mu_p)
    mu_h = list(mu_h)

    def build(alpha):
        return shift_function_limit(bare, grid, alpha, mu_p, mu_h)

    def disc(F):
        return discrete_part(bare, regime, grid, F, mu_p=mu_p, mu_h=mu_h, r=r,
                             p_plus=p_plus, h_plus=h_plus,
                             p_minus=p_minus, h_minus=h_minus)

    if channel == "zz":
        P0 = excitation_momentum(grid, 0.0, mu_p, mu_h)
        vals = []
        for a in alphas:
            acc = 0.0
            for s in (a, -a):
                F = build(s)
                P = excitation_momentum(grid, s, mu_p, mu_h)
                S = smooth_part("z", grid, F, mu_p, mu_h, alpha=s, P_ex=P,
                                **contour_kwargs)
                D, theta = disc(F)
                acc += 0.5 * S * D
            vals.append(acc)
        total = second_twist_derivative(vals, alphas)
        F0 = build(0.0)
        D0, theta = disc(F0)
        return FormFactorPrediction(channel="zz", regime=regime, theta=theta,
                                    P_ex=P0, smooth=total / D0, discrete=D0)
    if channel == "pm":
        F = build(0.0)
        P0 = excitation_momentum(grid, 0.0, mu_p, mu_h)
        S = smooth_part("plus", grid, F, mu_p, mu_h, alpha=0.0, **contour_kwargs)
        D, theta = disc(F)
        return FormFactorPrediction(channel="pm", regime=regime, theta=theta,
                                    P_ex=P0, smooth=S, discrete=D)
    raise ValueError(f"unknown channel {channel!r}")


# ---------------------------------------------------------------------------
# Summation identities (label products over counting-function nodes)

def counting_inverse(grid, x):
    """lam with xi(lam) = x, where xi = (p + k_F)/(2 pi) continues the
    counting function to the whole line through the density interpolant."""
    from scipy.interpolate import PchipInterpolator
    lam_grid = np.linspace(-12.0, 12.0, 4001)
    xi = np.real(grid.xi(lam_grid))
    inv = PchipInterpolator(xi, lam_grid)
    x = np.asarray(x, dtype=float)
    if np.any(x <= xi[0]) or np.any(x >= xi[-1]):
        raise ValueError("requested counting value outside the attainable range")
    return inv(x)


def label_product_limit(grid, f, M, h_M):
    """Finite product prod_k (k - h + f(lam_k))/(k - h + f(lam_h)) against its
    thermodynamic limit exp int (f - f(lam_h))/(xi - xi(lam_h)) rho dlam.

    Returns (finite_product, limit_value).
    """
    D = grid.D
    N = int(round(M * D))
    k = np.arange(1, N + 1)
    lam_k = counting_inverse(grid, k / M)
    lam_h = float(counting_inverse(grid, h_M / M))
    fk = f(lam_k)
    fh = f(lam_h)
    finite = float(np.exp(np.sum(np.log((k - h_M + fk) / (k - h_M + fh)))))
    lam, wq = grid.nodes, grid.weights
    xi = np.real(grid.xi(lam))
    xih = h_M / M
    integ = (f(lam) - fh) / (xi - xih) * np.real(grid.rho(lam))
    limit = float(np.exp(integ @ wq))
    return finite, limit


def remainder_sum(f, M, D, h_M, n=2):
    """sum_{k != h} |f(k/M) - f(h/M)| / (k - h)^n over k = 1..N, N = M D."""
    N = int(round(M * D))
    k = np.arange(1, N + 1)
    k = k[k != h_M]
    return float(np.sum(np.abs(f(k / M) - f(h_M / M)) / np.abs(k - h_M) ** n))
