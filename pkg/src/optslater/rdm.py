"""One-particle reduced density matrix and natural orbitals."""

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, NotNormalized, WrongShape
from .fock import NORM_TOL, annihilation_matrix

DEGENERACY_GAP = 1e-9
HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class NaturalOrbitalDecomposition:
    """Occupations in descending order and the matching orbitals as columns."""

    occupations: np.ndarray
    orbitals: np.ndarray

    @property
    def d(self):
        return self.occupations.size

    @property
    def n_particles(self):
        return float(self.occupations.sum())


@dataclass(frozen=True)
class BorlandDennisReport:
    sums: tuple
    inequality_slack: float
    satisfied: bool
    tolerance: float


def one_particle_rdm(state, allow_unnormalized=False):
    """rho[k, l] = <psi| a_l^dagger a_k |psi>, normalized to trace N.

    The diagonal holds the occupation of each reference orbital.
    """
    if not allow_unnormalized and not state.is_normalized(1e-10):
        raise NotNormalized(f"state norm is {state.norm():.12g}; pass allow_unnormalized=True")
    if state.n == 0:
        return np.zeros((state.d, state.d), dtype=np.complex128)
    A = annihilation_matrix(state)
    rho = A @ A.conj().T
    return 0.5 * (rho + rho.conj().T)


def _canonical_cluster_basis(V):
    # Deterministic basis of span(V): Gram-Schmidt over the columns of the
    # projector in reference-index order.
    d, m = V.shape
    P = V @ V.conj().T
    basis = []
    for k in range(d):
        v = P[:, k].copy()
        for _ in range(2):
            for b in basis:
                v -= b * np.vdot(b, v)
        nv = np.linalg.norm(v)
        if nv > 1e-6:
            basis.append(v / nv)
            if len(basis) == m:
                return np.column_stack(basis)
    return V


def _fix_phase(v):
    k = int(np.argmax(np.abs(v)))
    return v * (np.conj(v[k]) / abs(v[k])), k


def natural_orbitals(rho):
    """Eigen-decomposition of a 1-RDM with deterministic ordering and phases.

    Eigenvalues are sorted in descending order. Eigenvalues closer than
    ``DEGENERACY_GAP`` form a cluster; inside a cluster the orbitals are
    re-derived from the cluster projector and sorted by the index of their
    largest component. Every orbital's largest component is real positive.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise NotHermitian("density matrix must be square")
    herr = np.abs(rho - rho.conj().T).max(initial=0.0)
    if herr > HERMITIAN_TOL:
        raise NotHermitian(f"matrix deviates from Hermitian by {herr:.3g}")
    w, V = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    w = w[::-1].copy()
    V = V[:, ::-1].copy()
    d = w.size
    start = 0
    while start < d:
        stop = start + 1
        while stop < d and w[stop - 1] - w[stop] < DEGENERACY_GAP:
            stop += 1
        block = V[:, start:stop]
        if stop - start > 1:
            block = _canonical_cluster_basis(block)
        fixed = [_fix_phase(block[:, i]) for i in range(block.shape[1])]
        if stop - start > 1:
            fixed.sort(key=lambda item: item[1])
        for i, (vec, _) in enumerate(fixed):
            V[:, start + i] = vec
        start = stop
    return NaturalOrbitalDecomposition(occupations=w, orbitals=V)


def natural_orbitals_of(state):
    return natural_orbitals(one_particle_rdm(state))


def envelope_rank(state, tol=1e-10):
    """Dimension of the smallest orbital subspace that carries the state."""
    occ = natural_orbitals(one_particle_rdm(state, allow_unnormalized=True)).occupations
    return int(np.count_nonzero(occ > tol))


def borland_dennis_check(dec, tol=1e-8):
    """Check the three-in-six pairing equalities and the extra inequality."""
    lam = np.asarray(getattr(dec, "occupations", dec), dtype=float)
    if lam.shape != (6,):
        raise WrongShape(f"need six occupations, got {lam.size}")
    lam = np.sort(lam)[::-1]
    sums = (float(lam[0] + lam[5]), float(lam[1] + lam[4]), float(lam[2] + lam[3]))
    slack = float(lam[4] + lam[5] - lam[3])
    ok = all(abs(s - 1.0) <= tol for s in sums) and slack >= -tol
    return BorlandDennisReport(sums=sums, inequality_slack=slack, satisfied=ok, tolerance=tol)


__all__ = [
    "BorlandDennisReport",
    "NaturalOrbitalDecomposition",
    "borland_dennis_check",
    "envelope_rank",
    "natural_orbitals",
    "natural_orbitals_of",
    "one_particle_rdm",
    "NORM_TOL",
]
