"""Solving the logarithmic (twisted) Bethe equations for real root sets.

States are labelled by integers ell_j: the ground pattern is ell_j = j, a
particle-hole excitation replaces ell_{h_k} by p_k.  The solver is a damped
Newton iteration on the full coupled system, initialized from the decoupled
single-particle guess lam_j = p0^{-1}(2 pi n_j / M).  Quantum numbers are kept
as doubled integers internally so integer/half-integer bookkeeping is exact.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .model import ModelParams, bare_momentum, bare_phase, bare_momentum_inverse

__all__ = [
    "InvalidSpec",
    "NonConvergence",
    "ExcitationSpec",
    "BetheState",
    "solve_bethe_state",
    "counting_function",
    "finite_shift_function",
    "pr_class_quantum_numbers",
]


class InvalidSpec(ValueError):
    """Particle/hole integers violate range, distinctness or class balance."""


class NonConvergence(RuntimeError):
    """Newton iteration failed to reach the requested residual."""


@dataclass(frozen=True)
class ExcitationSpec:
    """n-particle/hole excitation data on top of the twisted ground pattern.

    channel "z" keeps the down-spin number (N_kappa = N); channel "plus" works
    in the N+1 sector.  holes are removed labels in {1..N_kappa}, particles are
    added labels outside that range.
    """

    channel: str = "z"
    holes: tuple = ()
    particles: tuple = ()

    def __post_init__(self):
        if self.channel not in ("z", "plus"):
            raise InvalidSpec(f"unknown channel {self.channel!r}")
        object.__setattr__(self, "holes", tuple(int(h) for h in self.holes))
        object.__setattr__(self, "particles", tuple(int(p) for p in self.particles))
        if len(self.holes) != len(self.particles):
            raise InvalidSpec("need equally many holes and particles")
        if len(set(self.holes)) != len(self.holes):
            raise InvalidSpec("holes must be pairwise distinct")
        if len(set(self.particles)) != len(self.particles):
            raise InvalidSpec("particles must be pairwise distinct")

    @property
    def n(self):
        return len(self.holes)

    def n_kappa(self, N):
        return N if self.channel == "z" else N + 1

    def validate(self, N):
        nk = self.n_kappa(N)
        for h in self.holes:
            if not (1 <= h <= nk):
                raise InvalidSpec(f"hole {h} outside 1..{nk}")
        for p in self.particles:
            if 1 <= p <= nk:
                raise InvalidSpec(f"particle {p} inside 1..{nk}")

    def labels(self, N):
        """The full integer set {ell_j}: ell_j = j except ell_{h_k} = p_k."""
        self.validate(N)
        ell = np.arange(1, self.n_kappa(N) + 1)
        for h, p in zip(self.holes, self.particles):
            ell[h - 1] = p
        return ell

    def to_json(self):
        return {
            "channel": self.channel,
            "n": self.n,
            "holes": list(self.holes),
            "particles": list(self.particles),
        }

    @classmethod
    def from_json(cls, obj):
        if "pr" in obj:
            pr = obj["pr"]
            raise InvalidSpec(
                "P_r form needs N_kappa; use pr_class_quantum_numbers "
                f"with r={pr.get('r')} first"
            )
        return cls(
            channel=obj.get("channel", "z"),
            holes=obj.get("holes", ()),
            particles=obj.get("particles", ()),
        )


def pr_class_quantum_numbers(r, p_plus=(), h_plus=(), p_minus=(), h_minus=(),
                             N_kappa=None, channel="z"):
    """Map P_r-class integers (positive, counted from the Fermi edges) to an
    absolute ExcitationSpec.

    Right-edge particles p+ sit at N_kappa + p+, right-edge holes at
    N_kappa + 1 - h+; left-edge particles at 1 - p-, left-edge holes at h-.
    The class balance n_p^+ - n_h^+ = n_h^- - n_p^- = r is enforced.
    """
    if N_kappa is None:
        raise InvalidSpec("N_kappa is required")
    p_plus, h_plus = list(p_plus), list(h_plus)
    p_minus, h_minus = list(p_minus), list(h_minus)
    for name, lst in (("p_plus", p_plus), ("h_plus", h_plus),
                      ("p_minus", p_minus), ("h_minus", h_minus)):
        if any(int(v) < 1 for v in lst):
            raise InvalidSpec(f"{name} entries must be positive integers")
    if len(p_plus) - len(h_plus) != r or len(h_minus) - len(p_minus) != r:
        raise InvalidSpec(
            f"class balance violated: n_p^+ - n_h^+ = {len(p_plus) - len(h_plus)}, "
            f"n_h^- - n_p^- = {len(h_minus) - len(p_minus)}, r = {r}"
        )
    particles = [N_kappa + int(p) for p in p_plus] + [1 - int(p) for p in p_minus]
    holes = [N_kappa + 1 - int(h) for h in h_plus] + [int(h) for h in h_minus]
    return ExcitationSpec(channel=channel, holes=tuple(holes), particles=tuple(particles))


@dataclass(frozen=True)
class BetheState:
    """A solved real root set with its labels and residual."""

    params: ModelParams
    spec: ExcitationSpec
    roots: np.ndarray          # mu_{ell_j}, ordered as the labels ell_j
    labels: np.ndarray         # ell_j
    residual: float

    @property
    def n_kappa(self):
        return len(self.roots)

    @property
    def alpha(self):
        return self.params.alpha

    def counting(self, omega, order=0):
        return counting_function(self, omega, order)

    def root_of_label(self, j):
        """Solve xi_kappa(mu) = j/M for the root with label j (brentq)."""
        M = self.params.M
        f = lambda w: counting_function(self, w) - j / M
        lo, hi = -1.0, 1.0
        while f(lo) > 0:
            lo *= 2.0
            if lo < -100:
                raise NonConvergence("no bracket for counting-function root")
        while f(hi) < 0:
            hi *= 2.0
            if hi > 100:
                raise NonConvergence("no bracket for counting-function root")
        return brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16)


def _bethe_residual(x, ell, params, n_kappa):
    zeta, M = params.zeta, params.M
    diff = x[:, None] - x[None, :]
    rhs = 2.0 * np.pi * (ell - (n_kappa + 1) / 2.0 + params.alpha)
    return M * bare_momentum(x, zeta) - bare_phase(diff, zeta).sum(axis=1) - rhs


def _bethe_jacobian(x, params):
    zeta, M = params.zeta, params.M
    diff = x[:, None] - x[None, :]
    K = bare_phase(diff, zeta, order=1)
    np.fill_diagonal(K, 0.0)
    J = K.copy()
    np.fill_diagonal(J, M * bare_momentum(x, zeta, order=1) - K.sum(axis=1))
    return J


def solve_bethe_state(params, spec=None, tol=1e-12, max_iter=200):
    """Solve the twisted logarithmic Bethe equations for the state given by spec.

    spec=None (or an empty spec) gives the alpha-twisted ground pattern; the
    physical ground state is params.alpha = 0.  Raises NonConvergence if the
    damped Newton iteration cannot reach the residual tolerance.
    """
    if spec is None:
        spec = ExcitationSpec(channel="z")
    ell = spec.labels(params.N)
    n_kappa = len(ell)
    zeta, M = params.zeta, params.M

    # decoupled initial guess; clip momenta into the open range of p0
    p_guess = 2.0 * np.pi * (ell - (n_kappa + 1) / 2.0 + params.alpha) / M
    p_max = 0.999 * (np.pi - zeta)
    x = bare_momentum_inverse(np.clip(p_guess, -p_max, p_max), zeta)
    x = x + 1e-12 * np.arange(n_kappa)  # break exact ties from clipping

    res = _bethe_residual(x, ell, params, n_kappa)
    norm = np.max(np.abs(res))
    for _ in range(max_iter):
        if norm <= tol:
            break
        try:
            step = np.linalg.solve(_bethe_jacobian(x, params), res)
        except np.linalg.LinAlgError as exc:
            raise NonConvergence(f"singular Newton system: {exc}") from exc
        t = 1.0
        while t > 1e-6:
            x_new = x - t * step
            res_new = _bethe_residual(x_new, ell, params, n_kappa)
            norm_new = np.max(np.abs(res_new))
            if norm_new < norm:
                break
            t *= 0.5
        else:
            raise NonConvergence("line search stalled")
        x, res, norm = x_new, res_new, norm_new
    else:
        raise NonConvergence(f"Newton did not converge, residual {norm:.3e}")

    return BetheState(params=params, spec=spec, roots=x, labels=ell, residual=norm)


def counting_function(state, omega, order=0):
    """Counting function xi_kappa of a solved state (order=0) or the discrete
    density rho_kappa = xi_kappa' (order=1), at real omega."""
    p = state.params
    zeta, M = p.zeta, p.M
    omega = np.asarray(omega, dtype=float)
    diff = omega[..., None] - state.roots
    if order == 0:
        return (bare_momentum(omega, zeta) / (2 * np.pi)
                - bare_phase(diff, zeta).sum(axis=-1) / (2 * np.pi * M)
                + (state.n_kappa + 1) / (2.0 * M) - p.alpha / M)
    if order == 1:
        return (bare_momentum(omega, zeta, order=1) / (2 * np.pi)
                - bare_phase(diff, zeta, order=1).sum(axis=-1) / (2 * np.pi * M))
    raise ValueError("order must be 0 or 1")


def finite_shift_function(ground, excited, omega):
    """Finite-size shift function F(omega) = M (xi_ground - xi_excited)."""
    M = ground.params.M
    if excited.params.M != M:
        raise ValueError("states live on different chain lengths")
    return M * (counting_function(ground, omega) - counting_function(excited, omega))
