"""Brute-force diagonalization of the periodic XXZ chain in fixed-Sz sectors.

Basis states are bit configurations (bit set = down spin).  Each sector is
diagonalized densely; translation eigenvalues are resolved inside degenerate
energy subspaces so that every eigenvector carries a sharp lattice momentum.
Used as the ground truth for the determinant form factors at small M.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.linalg

__all__ = [
    "SizeLimit",
    "SelectionRule",
    "SpinSector",
    "build_and_diagonalize",
    "local_matrix_elements",
    "oracle_compare",
    "oracle_run",
]


class SizeLimit(ValueError):
    """Chain too long for dense diagonalization."""


class SelectionRule(ValueError):
    """Operator cannot connect the given pair of sectors."""


def _sector_basis(M, N):
    states = []
    for downs in combinations(range(M), N):
        s = 0
        for d in downs:
            s |= 1 << d
        states.append(s)
    return np.array(sorted(states), dtype=np.int64)


def _translate(s, M):
    """Shift every site by one: site i -> i+1 mod M."""
    return ((s << 1) | (s >> (M - 1))) & ((1 << M) - 1)


@dataclass
class SpinSector:
    """Diagonalized fixed-Sz block of the periodic chain."""

    M: int
    N: int
    Delta: float
    h: float
    basis: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray    # complex columns, translation-resolved
    momenta: np.ndarray         # lattice momenta P in (-pi, pi]

    @property
    def dim(self):
        return len(self.basis)

    def index(self, state):
        return int(np.searchsorted(self.basis, state))


def build_and_diagonalize(M, Delta, h, N):
    """Diagonalize the sector with N down spins; resolve translation inside
    degenerate energy subspaces."""
    if M > 14:
        raise SizeLimit(f"M = {M} exceeds the dense-diagonalization limit")
    if not (0 <= N <= M):
        raise ValueError(f"need 0 <= N <= M, got N={N}")
    basis = _sector_basis(M, N)
    dim = len(basis)
    H = np.zeros((dim, dim))
    for i, s in enumerate(basis):
        diag = 0.0
        for k in range(M):
            kn = (k + 1) % M
            bk, bkn = (s >> k) & 1, (s >> kn) & 1
            if bk == bkn:
                continue
            diag += -2.0 * Delta
            flipped = s ^ (1 << k) ^ (1 << kn)
            H[i, int(np.searchsorted(basis, flipped))] += 2.0
        H[i, i] = diag - 0.5 * h * (M - 2 * N)
    vals, vecs = np.linalg.eigh(H)

    # translation as a permutation on the basis
    perm = np.searchsorted(basis, np.array([_translate(int(s), M) for s in basis]))
    vecs = vecs.astype(complex)
    momenta = np.empty(dim)
    i = 0
    while i < dim:
        j = i
        while j < dim and vals[j] - vals[i] < 1e-10:
            j += 1
        block = vecs[:, i:j]
        Tblock = block.conj().T @ block[perm, :]   # <v_a| T |v_b>, unitary
        # complex Schur of a normal matrix: diagonal factor, unitary transform,
        # so orthonormality of the eigenbasis is preserved exactly
        Tdiag, tvecs = scipy.linalg.schur(Tblock, output="complex")
        vecs[:, i:j] = block @ tvecs
        momenta[i:j] = np.angle(np.diag(Tdiag))
        i = j
    return SpinSector(M=M, N=N, Delta=Delta, h=h, basis=basis,
                      eigenvalues=vals, eigenvectors=vecs, momenta=momenta)


def _apply_sigma_z(sector, m, vec):
    """sigma^z at site m (1-based) acting on a sector vector."""
    signs = np.where((sector.basis >> (m - 1)) & 1 == 1, -1.0, 1.0)
    return signs * vec


def _apply_sigma_minus(target, source, m, vec):
    """sigma^- at site m: flips an up spin down, mapping sector N to N+1."""
    out = np.zeros(target.dim, dtype=vec.dtype)
    bit = 1 << (m - 1)
    for i, s in enumerate(source.basis):
        if not (s & bit):
            out[target.index(int(s) | bit)] = vec[i]
    return out


def local_matrix_elements(sector_out, sector_in, operator, m):
    """Matrix <out_j| sigma^s_m |in_k> of a local spin operator between the
    eigenbases of two sectors.  operator is one of "z", "plus", "minus"."""
    if operator == "z":
        if sector_out.N != sector_in.N:
            raise SelectionRule("sigma^z conserves the down-spin number")
        acted = sector_in.eigenvectors * np.where(
            (sector_in.basis >> (m - 1)) & 1 == 1, -1.0, 1.0)[:, None]
        return sector_out.eigenvectors.conj().T @ acted
    if operator == "minus":
        if sector_out.N != sector_in.N + 1:
            raise SelectionRule("sigma^- adds one down spin")
        cols = [_apply_sigma_minus(sector_out, sector_in, m,
                                   sector_in.eigenvectors[:, k])
                for k in range(sector_in.dim)]
        return sector_out.eigenvectors.conj().T @ np.array(cols).T
    if operator == "plus":
        return local_matrix_elements(sector_in, sector_out, "minus", m).conj().T
    raise SelectionRule(f"unknown operator {operator!r}")


def _cluster_by_energy_momentum(sector, etol=1e-8, ptol=1e-8):
    """Group eigenstate indices with equal (E, P)."""
    order = np.lexsort((sector.momenta, sector.eigenvalues))
    clusters = []
    for idx in order:
        if clusters:
            j0 = clusters[-1][0]
            if (abs(sector.eigenvalues[idx] - sector.eigenvalues[j0]) < etol
                    and abs(np.angle(np.exp(1j * (sector.momenta[idx]
                                                  - sector.momenta[j0])))) < ptol):
                clusters[-1].append(idx)
                continue
        clusters.append([idx])
    return clusters


def oracle_compare(bethe_values, sector_out, sector_in, channel, tolerance,
                   m=1, phase_tolerance=None):
    """Multiset matching of Bethe-side form-factor products against ED.

    bethe_values: list of (|FF|^2 product, P_ex_hat) pairs.
    channel "zz" compares against |<psi_g^in| sigma^z_m |psi'>|^2 over the
    out-sector eigenstates; channel "pm" against |<psi'| sigma^-_m |psi_g>|^2.
    Degenerate (E, P) clusters are compared through the projected norm (sum of
    squared magnitudes within the cluster).  Momenta are read off the ED phase
    ratio element(m+1)/element(m) and must match P_ex_hat mod 2 pi; the pm
    channel carries an extra staggering phase of pi per site.

    Returns a report dict {"matched": [...], "orphans": [...], "tolerance": ...}.
    """
    if phase_tolerance is None:
        phase_tolerance = tolerance
    ig = int(np.argmin(sector_in.eigenvalues))
    if channel == "zz":
        op, stagger = "z", 0.0
    elif channel == "pm":
        op, stagger = "minus", np.pi
    else:
        raise ValueError(f"unknown channel {channel!r}")
    E1 = local_matrix_elements(sector_out, sector_in, op, m)[:, ig]
    E2 = local_matrix_elements(sector_out, sector_in, op, m + 1)[:, ig]

    clusters = _cluster_by_energy_momentum(sector_out)
    weights, phases = [], []
    for cl in clusters:
        weights.append(float(np.sum(np.abs(E1[cl]) ** 2)))
        num = np.sum(np.conj(E1[cl]) * E2[cl])
        phases.append(float(np.angle(num)) if abs(num) > 1e-14 else None)

    # assign each Bethe value to the momentum-compatible cluster that best
    # absorbs it; degenerate clusters may receive several values and are then
    # compared through their total projected weight
    assigned = [0.0] * len(clusters)
    entries = []
    for S, P_ex in bethe_values:
        best, best_d, best_dphi = None, np.inf, None
        for ci, w in enumerate(weights):
            dphi = None
            if phases[ci] is not None:
                dphi = abs(np.angle(np.exp(1j * (phases[ci] - P_ex + stagger))))
                if dphi > max(phase_tolerance, 1e-6):
                    continue
            d = abs(w - assigned[ci] - S)
            if d < best_d:
                best, best_d, best_dphi = ci, d, dphi
        entries.append({"S": S, "P_ex": P_ex, "cluster": best,
                        "phase_err": best_dphi})
        if best is not None:
            assigned[best] += S

    matched, orphans = [], []
    for entry in entries:
        ci = entry["cluster"]
        if ci is None:
            entry["rel_err"] = np.inf
            orphans.append(entry)
            continue
        entry["rel_err"] = abs(assigned[ci] - weights[ci]) / max(weights[ci], 1e-300)
        entry["E"] = float(sector_out.eigenvalues[clusters[ci][0]])
        ok = entry["rel_err"] <= tolerance
        if ok and entry["phase_err"] is not None:
            ok = entry["phase_err"] <= phase_tolerance
        (matched if ok else orphans).append(entry)
    return {"matched": matched, "orphans": orphans, "tolerance": tolerance}


def _oracle_specs(N_kappa, channel, kmax):
    """All 1-particle-hole specs with particle labels within kmax of either
    edge of 1..N_kappa, plus the 0-ph spec for the plus channel."""
    from .bethe import ExcitationSpec

    specs = []
    if channel == "plus":
        specs.append(ExcitationSpec(channel="plus"))
    for h in range(1, N_kappa + 1):
        for p in ([N_kappa + k for k in range(1, kmax + 1)]
                  + [1 - k for k in range(1, kmax + 1)]):
            specs.append(ExcitationSpec(channel=channel,
                                        holes=(h,), particles=(p,)))
    return specs


def oracle_run(M, zeta, N, channel, tolerance=1e-9, phase_tolerance=1e-8,
               kmax=3, alphas=(1e-2, 5e-3, 2.5e-3), root_cutoff=6.0):
    """End-to-end comparison of determinant form-factor products against ED.

    Runs every 1-particle-hole excitation (and the 0-ph state in the pm
    channel) whose roots stay below root_cutoff; labels saturating the
    counting equation at infinity have no finite root and their float
    pseudo-solutions drift far out, so those states are dropped rather than
    mismatched.  Returns the oracle_compare report plus a "skipped" list.
    """
    from .model import ModelParams
    from .bethe import solve_bethe_state, NonConvergence
    from .finite import ff_product_with_distance

    bare = "z" if channel == "zz" else "plus"
    Delta = np.cos(zeta)
    N_out = N if channel == "zz" else N + 1
    sector_in = build_and_diagonalize(M, Delta, 0.0, N)
    sector_out = (sector_in if channel == "zz"
                  else build_and_diagonalize(M, Delta, 0.0, N_out))

    values, skipped = [], []
    for spec in _oracle_specs(N_out, bare, kmax):
        def solve(a, spec=spec):
            grd = solve_bethe_state(ModelParams(zeta, M, N, 0.0))
            exc = solve_bethe_state(ModelParams(zeta, M, N, a), spec)
            if np.max(np.abs(exc.roots)) > root_cutoff:
                raise NonConvergence("root beyond the finite-root cutoff")
            return exc, grd

        try:
            v, P_ex, _ = ff_product_with_distance(solve, bare, alphas=alphas)
        except NonConvergence:
            skipped.append(spec.to_json())
            continue
        values.append((float(np.abs(v)), P_ex))

    report = oracle_compare(values, sector_out, sector_in, channel,
                            tolerance, phase_tolerance=phase_tolerance)
    report["skipped"] = skipped
    report["M"], report["N"], report["zeta"], report["channel"] = M, N, zeta, channel
    return report
