"""Maximal overlap of a state with Slater determinants and orbital subspaces.

``optimize_slater`` runs an alternating sweep: each orbital slot in turn is
set to the normalized contraction of the state with the other N-1 orbitals,
which is the exact optimum for that slot. ``optimize_subspace`` handles rank
M > N by Riemannian gradient ascent on orthonormal frames, with closed-form
shortcuts for M = d, d-1 and N+1.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
import warnings

import numpy as np
from scipy.optimize import minimize

from . import _tables
from ._backend import kernels
from .errors import BadRank, NoConvergence, NotNormalized, TooLarge
from .fock import (
    annihilation_matrix,
    as_frame,
    complete_basis,
    haar_frame,
    overlap,
    slater_amplitudes,
)
from .rdm import natural_orbitals, one_particle_rdm

DEGENERATE_NORM = 1e-13
MONOTONE_SLACK = 1e-13


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iterations: int = 2000
    tol: float = 1e-12
    seed: int = 0
    # per-sweep orbital movement; the gain test alone stalls near sqrt(tol)
    frame_tol: float = 1e-10
    # ascent step policy (M > N)
    initial_step: float = 1.0
    backtrack: float = 0.5
    min_step: float = 1e-14
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1 or self.workers < 1:
            raise ValueError("restarts, max_iterations and workers must be positive")
        if not 0 < self.tol < 1 or self.frame_tol <= 0:
            raise ValueError("tol must lie in (0, 1) and frame_tol must be positive")
        if self.initial_step <= 0 or self.min_step <= 0 or not 0 < self.backtrack < 1:
            raise ValueError("step policy needs positive steps and backtrack in (0, 1)")

    def replace(self, **changes):
        values = {f: getattr(self, f) for f in self.__dataclass_fields__}
        values.update(changes)
        return OptimizerConfig(**values)


@dataclass
class ApproximationResult:
    value: float
    frame: np.ndarray
    iterations: int
    restarts_used: int
    converged: bool
    history: list = field(default_factory=list, repr=False)
    params: object = None


def restart_rng(seed, index):
    """Generator for restart ``index``; independent of how restarts are scheduled."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(index)]))


def _require_normalized(state):
    if not state.is_normalized(1e-10):
        raise NotNormalized(f"state norm is {state.norm():.12g}")


# ----------------------------------------------------------------------
# objective


def subspace_weight(state, frame):
    """Weight of the state inside the N-fold exterior power of span(frame)."""
    F = as_frame(frame, state.d)
    m = F.shape[1]
    if m < state.n or m > state.d:
        raise BadRank(f"rank M={m} outside N={state.n} <= M <= d={state.d}")
    C = kernels.compound(F, _tables.subsets(state.n, state.d), _tables.subsets(state.n, m))
    o = C.conj().T @ state.vector
    return float(np.vdot(o, o).real)


def weight_gradient(state, frame):
    """Value and Euclidean gradient G of ``subspace_weight`` at a frame.

    G is defined by df = Re tr(G^H dF) and is assembled from (N-1)-minors of
    the frame, i.e. the cofactors of every N x N minor.
    """
    F = np.asarray(frame, dtype=np.complex128)
    d, m = F.shape
    n = state.n
    C = kernels.compound(F, _tables.subsets(n, d), _tables.subsets(n, m))
    w = C.T @ state.vector.conj()
    value = float(np.vdot(w, w).real)
    if n == 0:
        return value, np.zeros_like(F)
    A = annihilation_matrix(state)
    minors_lo = kernels.compound(F, _tables.subsets(n - 1, d), _tables.subsets(n - 1, m))
    t = _tables.creation_table(n, m)
    B = np.zeros((m, t.sub_rows.shape[0]), dtype=np.complex128)
    B[t.k, t.l] = t.sign * w[t.j]
    G = 2.0 * (A @ minors_lo.conj() @ B.T)
    return value, G


# ----------------------------------------------------------------------
# single configuration (M = N)


def _random_orthogonal_unit(F, slot, rng):
    others = np.delete(F, slot, axis=1)
    d = F.shape[0]
    while True:
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        v -= others @ (others.conj().T @ v)
        v -= others @ (others.conj().T @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            return v / nv


def _frame_step(old, new):
    c = np.einsum("ij,ij->j", old.conj(), new)
    mag = np.abs(c)
    ph = np.where(mag > 0, c / np.where(mag > 0, mag, 1.0), 1.0)
    return float(np.abs(new - old * ph[None, :]).max())


def alternating_sweeps(state, frame, cfg, rng, record_history=False):
    """Run alternating slot updates from ``frame`` until the sweep stalls.

    A sweep counts as stalled when the overlap gain is below ``cfg.tol`` and
    no orbital moved by more than ``cfg.frame_tol`` (phase-aligned).

    Returns ``(value, frame, sweeps, converged, history)``; ``history`` holds
    the squared overlap after every slot update when requested.
    """
    vec = state.vector
    n = state.n
    F = np.array(frame, dtype=np.complex128, order="C")
    table = _tables.creation_table(n, state.d)
    value = abs(overlap(F, state)) ** 2
    history = [value] if record_history else []
    converged = False
    sweeps = 0
    for sweeps in range(1, cfg.max_iterations + 1):
        prev = value
        replaced = False
        if record_history:
            start = F.copy()
            for i in range(n):
                nv = kernels.update_slot(vec, F, i, table, DEGENERATE_NORM)
                if nv <= DEGENERATE_NORM:
                    F[:, i] = _random_orthogonal_unit(F, i, rng)
                    nv = abs(overlap(F, state))
                    replaced = True
                value = nv * nv
                history.append(value)
            step = _frame_step(start, F)
        else:
            slot = 0
            step = 0.0
            while True:
                nv, s, bad = kernels.sweep(vec, F, table, DEGENERATE_NORM, slot)
                step = max(step, s)
                if bad < 0:
                    break
                F[:, bad] = _random_orthogonal_unit(F, bad, rng)
                nv = abs(overlap(F, state))
                replaced = True
                slot = bad + 1
                if slot == n:
                    break
            value = nv * nv
        if not replaced and value - prev < cfg.tol and step < cfg.frame_tol:
            converged = True
            break
    return value, F, sweeps, converged, history


def _slater_restart(args):
    state, cfg, index, record_history = args
    rng = restart_rng(cfg.seed, index)
    F0 = haar_frame(state.d, state.n, rng)
    return alternating_sweeps(state, F0, cfg, rng, record_history)


def _run_restarts(fn, state, cfg, record_history):
    jobs = [(state, cfg, i, record_history) for i in range(cfg.restarts)]
    if cfg.workers > 1 and cfg.restarts > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(job) for job in jobs]


def _best(outcomes):
    best = 0
    for i, out in enumerate(outcomes):
        if out[0] > outcomes[best][0]:
            best = i
    return best


def optimize_slater(state, cfg=None, initial_frame=None, record_history=False):
    """Best single Slater determinant for a normalized state (multi-start)."""
    cfg = cfg or OptimizerConfig()
    _require_normalized(state)
    d, n = state.d, state.n
    if n == 0 or n == d:
        F = np.eye(d, n, dtype=np.complex128)
        return ApproximationResult(abs(overlap(F, state)) ** 2, F, 0, 0, True)
    if initial_frame is not None:
        F0 = as_frame(initial_frame, d)
        out = alternating_sweeps(state, F0, cfg, restart_rng(cfg.seed, 0), record_history)
        outcomes = [out]
    else:
        outcomes = _run_restarts(_slater_restart, state, cfg, record_history)
    b = _best(outcomes)
    value, F, sweeps, converged, history = outcomes[b]
    if not converged:
        warnings.warn(f"alternating sweep hit max_iterations={cfg.max_iterations}", NoConvergence, 2)
    return ApproximationResult(
        value=float(value),
        frame=F,
        iterations=int(sweeps),
        restarts_used=len(outcomes),
        converged=bool(converged),
        history=history,
    )


# ----------------------------------------------------------------------
# multi-configuration (M > N)


def _retract(X):
    q, r = np.linalg.qr(X)
    diag = np.diagonal(r)
    ph = np.where(np.abs(diag) > 0, diag / np.where(diag == 0, 1, np.abs(diag)), 1.0)
    return q * ph[None, :]


def riemannian_ascent(state, frame, cfg):
    """Gradient ascent of ``subspace_weight`` over orthonormal (d, M) frames.

    Armijo backtracking along the projected gradient, QR retraction after
    every step. Returns ``(value, frame, iterations, converged, history)``.
    """
    F = _retract(np.asarray(frame, dtype=np.complex128))
    f, G = weight_gradient(state, F)
    history = [f]
    step = cfg.initial_step
    converged = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        xi = G - F @ (F.conj().T @ G)
        g2 = float(np.vdot(xi, xi).real)
        if g2 < 1e-28:
            converged = True
            break
        while True:
            Fn = _retract(F + step * xi)
            fn, Gn = weight_gradient(state, Fn)
            if fn >= f + 1e-4 * step * g2:
                break
            step *= cfg.backtrack
            if step < cfg.min_step:
                converged = True
                break
        if fn < f:
            break
        gain = fn - f
        F, f, G = Fn, fn, Gn
        history.append(f)
        step = min(2.0 * step, 1e3 * cfg.initial_step)
        if gain < cfg.tol:
            converged = True
            break
    return f, F, it, converged, history


def _subspace_restart(args):
    state, cfg, index, m = args
    rng = restart_rng(cfg.seed, index)
    return riemannian_ascent(state, haar_frame(state.d, m, rng), cfg)


def exact_rank_dminus1(state):
    """Drop the least-occupied natural orbital; exact optimum for M = d - 1."""
    if state.d <= state.n:
        raise BadRank(f"need d > N, got d={state.d}, N={state.n}")
    dec = natural_orbitals(one_particle_rdm(state))
    frame = dec.orbitals[:, : state.d - 1].copy()
    return ApproximationResult(
        value=float(1.0 - dec.occupations[-1]),
        frame=frame,
        iterations=0,
        restarts_used=0,
        converged=True,
    )


def _extend_by_residual(state, res):
    # Add the orbital most occupied by the residual, within the complement of the frame.
    F = res.frame
    S = slater_amplitudes(F)
    c = complex(np.vdot(S.vector, state.vector))
    residual = state - c * S
    Q = complete_basis(F)[:, F.shape[1]:]
    rho = one_particle_rdm(residual, allow_unnormalized=True)
    w, V = np.linalg.eigh(Q.conj().T @ rho @ Q)
    u = Q @ V[:, -1]
    return np.column_stack([F, u / np.linalg.norm(u)])


def optimize_subspace(state, M, cfg=None, fast_paths=True, record_history=False):
    """Maximize ``subspace_weight`` over M-dimensional orbital subspaces."""
    cfg = cfg or OptimizerConfig()
    _require_normalized(state)
    d, n = state.d, state.n
    M = int(M)
    if M < n or M > d:
        raise BadRank(f"rank M={M} outside N={n} <= M <= d={d}")
    if fast_paths:
        if M == d:
            return ApproximationResult(1.0, np.eye(d, dtype=np.complex128), 0, 0, True)
        if M == d - 1:
            return exact_rank_dminus1(state)
    if M == n:
        return optimize_slater(state, cfg, record_history=record_history)
    if fast_paths and M == n + 1:
        res = optimize_slater(state, cfg)
        frame = _extend_by_residual(state, res)
        return ApproximationResult(
            value=subspace_weight(state, frame),
            frame=frame,
            iterations=res.iterations,
            restarts_used=res.restarts_used,
            converged=res.converged,
        )
    jobs = [(state, cfg, i, M) for i in range(cfg.restarts)]
    if cfg.workers > 1 and cfg.restarts > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(_subspace_restart, jobs))
    else:
        outcomes = [_subspace_restart(job) for job in jobs]
    b = _best(outcomes)
    value, F, iters, converged, history = outcomes[b]
    if not converged:
        warnings.warn(f"subspace ascent hit max_iterations={cfg.max_iterations}", NoConvergence, 2)
    return ApproximationResult(
        value=float(value),
        frame=F,
        iterations=int(iters),
        restarts_used=len(outcomes),
        converged=bool(converged),
        history=history if record_history else [],
    )


# ----------------------------------------------------------------------
# independent oracle


def _oracle_weights(vec, frames, n):
    # Direct determinant sums, deliberately not routed through the kernels.
    S, d, m = frames.shape
    row_sets = [list(J) for J in combinations(range(d), n)]
    total = np.zeros(S)
    for K in combinations(range(m), n):
        sub = frames[:, :, list(K)]
        dets = np.stack([np.linalg.det(sub[:, J, :]) for J in row_sets], axis=1)
        total += np.abs(dets.conj() @ vec) ** 2
    return total


def _orth(X):
    q, r = np.linalg.qr(X)
    return q


def brute_force_oracle(state, M=None, samples=2000, seed=0, polish=3, return_frame=False):
    """Lower bound on the best rank-M weight from random frames plus local polish.

    Frames are drawn Haar-uniformly; the best ``polish`` of them are refined
    with BFGS on an unconstrained parametrization (frame = Q factor of a free
    complex matrix) using finite-difference gradients.
    """
    d, n = state.d, state.n
    M = n if M is None else int(M)
    if d > 8:
        raise TooLarge(f"oracle is limited to d <= 8, got d={d}")
    if M < n or M > d:
        raise BadRank(f"rank M={M} outside N={n} <= M <= d={d}")
    rng = np.random.default_rng(seed)
    vec = state.vector
    best_val, best_F = -1.0, None
    chunk = 1000
    seen = 0
    pool = []
    while seen < samples:
        k = min(chunk, samples - seen)
        frames = np.stack([haar_frame(d, M, rng) for _ in range(k)])
        vals = _oracle_weights(vec, frames, n)
        order = np.argsort(vals)[::-1][: max(polish, 1)]
        pool.extend((float(vals[i]), frames[i]) for i in order)
        pool.sort(key=lambda item: -item[0])
        pool = pool[: max(polish, 1)]
        seen += k
    best_val, best_F = pool[0]

    def unpack(x):
        return x[: d * M].reshape(d, M) + 1j * x[d * M:].reshape(d, M)

    def neg(x):
        return -_oracle_weights(vec, _orth(unpack(x))[None], n)[0]

    for val, F in pool[:polish]:
        x0 = np.concatenate([F.real.ravel(), F.imag.ravel()])
        res = minimize(neg, x0, method="BFGS", options={"gtol": 1e-11, "maxiter": 2000})
        polished_val = -float(res.fun)
        if polished_val > best_val:
            best_val, best_F = polished_val, _orth(unpack(res.x))
    if return_frame:
        return best_val, best_F
    return best_val
