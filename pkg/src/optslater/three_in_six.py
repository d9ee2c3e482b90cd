"""Three fermions in six orbitals: canonical form and paired ansatz.

Given an optimal frame f_1, f_2, f_3, a state in this space can be rewritten as

    A e1^e2^e3 + B e1^h2^h3 + C e2^h3^h1 + D e3^h1^h2 + E h1^h2^h3

in an orthonormal basis (e_k, h_k) with span(e) = span(f). In that basis
the one-particle density matrix splits into three 2x2 blocks of unit
trace, one per pair {e_k, h_k}.
"""

from dataclasses import dataclass
from itertools import product
import math

import numpy as np
from scipy.optimize import minimize

from .catalog import builtin_state  # re-exported for convenience
from .errors import NotOptimal, NotPaired, WrongShape
from .fock import FermionState, as_frame, canonical_order, complete_basis, rotate_basis
from .optimizer import ApproximationResult, restart_rng
from .rdm import natural_orbitals_of, one_particle_rdm

FORBIDDEN_TOL = 1e-7
PAIR_TOL = 1e-10
# local labels: e1 e2 e3 -> 1 2 3, h1 h2 h3 -> 4 5 6
_CANONICAL_TERMS = {"A": (1, 2, 3), "B": (1, 5, 6), "C": (2, 6, 4), "D": (3, 4, 5), "E": (4, 5, 6)}


def _require_36(state):
    if (state.n, state.d) != (3, 6):
        raise WrongShape(f"need N=3, d=6, got N={state.n}, d={state.d}")


@dataclass(frozen=True)
class CanonicalForm36:
    basis: np.ndarray  # 6x6 unitary, columns e1 e2 e3 h1 h2 h3
    A: complex
    B: complex
    C: complex
    D: complex
    E: complex
    forbidden_max: float = 0.0

    @property
    def coeffs(self):
        return (self.A, self.B, self.C, self.D, self.E)

    @property
    def e(self):
        return self.basis[:, :3]

    @property
    def h(self):
        return self.basis[:, 3:]

    def local_state(self):
        """The five-term state written in its own basis (e_k -> k, h_k -> k + 3)."""
        return FermionState(6, 3, {t: getattr(self, k) for k, t in _CANONICAL_TERMS.items()})

    def reconstruct(self):
        return rotate_basis(self.local_state(), self.basis)


def canonicalize36(state, opt_frame, tol=FORBIDDEN_TOL):
    """Canonical five-term form built on an optimal (6, 3) frame.

    Raises NotOptimal when a coefficient of some f_i ^ f_j ^ g_k exceeds
    ``tol``; such terms vanish exactly at any stationary frame.
    """
    _require_36(state)
    F = as_frame(opt_frame, 6)
    if F.shape[1] != 3:
        raise WrongShape("optimal frame must have three orbitals")
    basis = complete_basis(F)
    local = rotate_basis(state, basis.conj().T)
    amp = local.amplitude
    forbidden = [abs(amp((i, j, k))) for i in (1, 2, 3) for j in (1, 2, 3) if i < j for k in (4, 5, 6)]
    worst = max(forbidden)
    if worst > tol:
        raise NotOptimal(f"coefficient {worst:.3g} on an f^f^g term; the frame is not stationary")
    a = amp((1, 2, 3))
    c = amp((4, 5, 6))
    # b[i, j]: coefficient of f_i ^ G_j with G = (g2^g3, g3^g1, g1^g2)
    b = np.array([[amp((i, 5, 6)), amp((i, 6, 4)), amp((i, 4, 5))] for i in (1, 2, 3)])
    U, s, Vh = np.linalg.svd(b)
    V = Vh.conj().T
    e = basis[:, :3] @ U
    h = basis[:, 3:] @ V
    du, dv = np.linalg.det(U), np.linalg.det(V)
    A = a * np.conj(du)
    Bc, Cc, Dc = (s * np.conj(dv)).tolist()
    E = c * np.conj(dv)
    # rephase e1 so that A is real and non-negative
    if abs(A) > 0:
        w = A / abs(A)
        e[:, 0] *= w
        A = abs(A)
        Bc *= np.conj(w)
    return CanonicalForm36(
        basis=np.column_stack([e, h]),
        A=complex(A),
        B=complex(Bc),
        C=complex(Cc),
        D=complex(Dc),
        E=complex(E),
        forbidden_max=float(worst),
    )


@dataclass(frozen=True)
class BlockReport:
    blocks: tuple  # three 2x2 Hermitian matrices for {e_k, h_k}
    traces: tuple
    eigenvalues: tuple  # per block, descending
    ok: bool
    tolerance: float


def bd_blocks_from_coeffs(A, B, C, D, E):
    """The three 2x2 blocks of the density matrix in the (e_k, h_k) pairs."""
    A, B, C, D, E = (complex(x) for x in (A, B, C, D, E))
    a2, b2, c2, d2, e2 = (abs(x) ** 2 for x in (A, B, C, D, E))

    def block(top, bottom, off):
        return np.array([[top, off], [np.conj(off), bottom]], dtype=np.complex128)

    return (
        block(a2 + b2, c2 + d2 + e2, B * np.conj(E)),
        block(a2 + c2, b2 + d2 + e2, C * np.conj(E)),
        block(a2 + d2, b2 + c2 + e2, D * np.conj(E)),
    )


def verify_bd_blocks(cf, tol=1e-10):
    """Block matrices of the density matrix for a canonical form, with unit-trace check."""
    blocks = bd_blocks_from_coeffs(*cf.coeffs)
    traces = tuple(float(np.trace(b).real) for b in blocks)
    eig = tuple(tuple(np.linalg.eigvalsh(b)[::-1].tolist()) for b in blocks)
    ok = all(abs(t - 1.0) <= tol for t in traces)
    return BlockReport(blocks=blocks, traces=traces, eigenvalues=eig, ok=ok, tolerance=tol)


def natural_pair_leakage(state, frame):
    """How far each canonical optimal orbital strays from a single natural pair.

    The canonical e_k of the optimal frame are expanded in the natural
    orbitals; each is assigned to the pair {phi_m, phi_{7-m}} carrying most
    of its weight. Returns ``(max_leakage, assignment)`` where leakage is the
    norm of the components outside the assigned pair and ``assignment`` lists
    the 1-based pair index m for e_1, e_2, e_3.
    """
    cf = canonicalize36(state, frame, tol=np.inf)
    dec = natural_orbitals_of(state)
    X = dec.orbitals.conj().T @ cf.e
    pairs = [(0, 5), (1, 4), (2, 3)]
    worst = 0.0
    assignment = []
    for k in range(3):
        col = np.abs(X[:, k]) ** 2
        weights = [col[p] + col[q] for p, q in pairs]
        m = int(np.argmax(weights))
        outside = [r for r in range(6) if r not in pairs[m]]
        worst = max(worst, float(np.sqrt(col[outside].sum())))
        assignment.append(m + 1)
    return worst, assignment


# ----------------------------------------------------------------------
# paired ansatz


@dataclass(frozen=True)
class PairedAnsatz:
    pairing: tuple  # ((p_1, q_1), ...) 1-based
    alphas: tuple
    betas: tuple

    @property
    def thetas(self):
        return tuple(math.atan2(abs(b), abs(a)) for a, b in zip(self.alphas, self.betas))

    @property
    def chis(self):
        out = []
        for b in self.betas:
            chi = float(np.angle(b)) % (2 * math.pi)
            out.append(0.0 if 2 * math.pi - chi < 1e-8 else chi)
        return tuple(out)

    def frame(self, d):
        F = np.zeros((d, len(self.pairing)), dtype=np.complex128)
        for i, ((p, q), a, b) in enumerate(zip(self.pairing, self.alphas, self.betas)):
            F[p - 1, i] += a
            F[q - 1, i] += b
        return F


def paired_tensor(state, pairing, project=False, tol=PAIR_TOL):
    """Coefficients T[b_1, .., b_N] of the ordered wedges e_{x_1} ^ .. ^ e_{x_N}.

    ``x_i`` is the first (b_i = 0) or second (b_i = 1) orbital of pair i;
    the sign of reordering each wedge is applied here.
    """
    pairing = tuple(tuple(int(x) for x in p) for p in pairing)
    n = len(pairing)
    flat = [x for p in pairing for x in p]
    if n != state.n or len(set(flat)) != 2 * n or any(not 1 <= x <= state.d for x in flat):
        raise WrongShape(f"pairing must hold {state.n} disjoint pairs of orbitals 1..{state.d}")
    T = np.zeros((2,) * n, dtype=np.complex128)
    inside = 0.0
    for bits in product((0, 1), repeat=n):
        x = tuple(pairing[i][b] for i, b in enumerate(bits))
        key, sign = canonical_order(x)
        value = state.amplitude(key)
        T[bits] = sign * value
        inside += abs(value) ** 2
    outside = state.norm() ** 2 - inside
    if not project and outside > tol ** 2:
        for key, value in state.amplitudes.items():
            chosen = [sum(1 for x in key if x in p) for p in pairing]
            if any(c != 1 for c in chosen) and abs(value) > tol:
                raise NotPaired(f"amplitude {abs(value):.3g} on {key} lies outside the pairing")
    return pairing, T


def _contract(T, vecs):
    out = T
    for v in vecs:
        out = np.tensordot(np.conj(v), out, axes=([0], [0]))
    return complex(out)


def _coeffs(theta, chi):
    return np.stack([np.cos(theta), np.sin(theta) * np.exp(1j * chi)], axis=1)


def _objective(x, T, n):
    theta, chi = x[:n], x[n:]
    c = _coeffs(theta, chi)
    z = _contract(T, list(c))
    grad = np.empty(2 * n)
    for i in range(n):
        dth = np.array([-np.sin(theta[i]), np.cos(theta[i]) * np.exp(1j * chi[i])])
        dch = np.array([0.0, 1j * np.sin(theta[i]) * np.exp(1j * chi[i])])
        for target, dv in ((i, dth), (n + i, dch)):
            vs = list(c)
            vs[i] = dv
            grad[target] = 2.0 * np.real(np.conj(z) * _contract(T, vs))
    return -abs(z) ** 2, -grad


def paired_ansatz_optimize(state, pairing=((1, 6), (2, 5), (3, 4)), restarts=16, seed=0, project=False):
    """Best determinant of the form (a_1 e_p1 + b_1 e_q1) ^ (a_2 e_p2 + b_2 e_q2) ^ ...

    Each pair is parametrized on the torus as a = cos(theta),
    b = sin(theta) exp(i chi) and the overlap is maximized by BFGS from
    ``restarts`` random starting points.
    """
    pairing, T = paired_tensor(state, pairing, project=project)
    n = len(pairing)
    best = None
    iterations = 0
    for r in range(restarts):
        rng = restart_rng(seed, r)
        x0 = np.concatenate([rng.uniform(0, math.pi / 2, n), rng.uniform(0, 2 * math.pi, n)])
        res = minimize(_objective, x0, args=(T, n), jac=True, method="BFGS",
                       options={"gtol": 1e-12, "maxiter": 1000})
        iterations += int(res.nit)
        if best is None or -res.fun > -best.fun:
            best = res
    c = _coeffs(best.x[:n], best.x[n:])
    alphas, betas = [], []
    for a, b in c:
        if abs(a) > 1e-15:
            w = a / abs(a)
            a, b = abs(a), b / w
        alphas.append(complex(a))
        betas.append(complex(b))
    value = abs(_contract(T, [np.array([a, b]) for a, b in zip(alphas, betas)])) ** 2
    # drop a common phase of the betas when the overlap does not depend on it
    ref = next((np.angle(b) for b in betas if abs(b) > 1e-12), 0.0)
    shifted = [b * np.exp(-1j * ref) for b in betas]
    if abs(abs(_contract(T, [np.array([a, b]) for a, b in zip(alphas, shifted)])) ** 2 - value) < 1e-12:
        betas = [complex(b) for b in shifted]
    ansatz = PairedAnsatz(pairing=pairing, alphas=tuple(alphas), betas=tuple(betas))
    return ApproximationResult(
        value=float(value),
        frame=ansatz.frame(state.d),
        iterations=iterations,
        restarts_used=restarts,
        converged=bool(best.success) or abs(best.jac).max() < 1e-8,
        params=ansatz,
    )


def density_blocks(state, basis):
    """2x2 blocks of the density matrix in pairs (basis[:, k], basis[:, k + 3])."""
    rho = one_particle_rdm(state)
    R = basis.conj().T @ rho @ basis
    return tuple(R[np.ix_([k, k + 3], [k, k + 3])] for k in range(3))


__all__ = [
    "BlockReport",
    "CanonicalForm36",
    "PairedAnsatz",
    "bd_blocks_from_coeffs",
    "builtin_state",
    "canonicalize36",
    "density_blocks",
    "natural_pair_leakage",
    "paired_ansatz_optimize",
    "paired_tensor",
    "verify_bd_blocks",
]
