"""Structural reductions of a state before optimization.

Two reductions leave the optimal overlap unchanged:

* an orbital occupied with probability one can be factored out
  (N -> N-1 particles), and the optimal determinant contains it;
* if two reference orbitals are only ever occupied together, the state
  splits into the part holding both and the part holding neither, and the
  optimal overlap is the larger of the two parts' (weighted) optima.

``decompose_full`` applies both greedily and returns a tree whose
leaves are irreducible.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import _tables
from .errors import NotCertain, NotSimultaneous, WrongShape
from .fock import FermionState, complete_basis, embed, overlap, rotate_basis, wedge
from .optimizer import OptimizerConfig, optimize_slater
from .rdm import natural_orbitals, one_particle_rdm

CERTAIN_TOL = 1e-10
AMPLITUDE_TOL = 1e-12


def find_certain_orbitals(state, tol=CERTAIN_TOL):
    """Natural orbitals whose occupation is within ``tol`` of one."""
    dec = natural_orbitals(one_particle_rdm(state))
    return [dec.orbitals[:, i].copy() for i in np.flatnonzero(dec.occupations > 1.0 - tol)]


def _factor(state, f, tol):
    f = np.asarray(f, dtype=np.complex128).reshape(-1)
    f = f / np.linalg.norm(f)
    occ = float(np.real(np.vdot(f, one_particle_rdm(state, allow_unnormalized=True) @ f)))
    if occ < state.norm() ** 2 * (1.0 - tol):
        raise NotCertain(f"orbital occupation {occ:.12g} is below 1 - {tol:g}")
    B = complete_basis(f[:, None])
    local = rotate_basis(state, B.conj().T)
    d, n = state.d, state.n
    upper = _tables.subset_index(n, d)
    rows = _tables.subsets(n - 1, d - 1)
    # orbital 0 sits first in every sorted tuple, so no sign appears
    idx = [upper[(0,) + tuple(int(x) + 1 for x in row)] for row in rows]
    child = FermionState.from_vector(d - 1, n - 1, local.vector[idx])
    return child, B[:, 1:], f


def factor_out(state, f, tol=CERTAIN_TOL):
    """The (N-1)-particle state psi' with psi = f ^ psi', on the d-1 orbitals orthogonal to f."""
    return _factor(state, f, tol)[0]


def _support(state, tol):
    rows = _tables.subsets(state.n, state.d)
    return rows[np.abs(state.vector) > tol]


def find_simultaneous_pairs(state, tol=AMPLITUDE_TOL):
    """Reference-orbital pairs (1-based) that every term holds together or not at all.

    Pairs that no term occupies are left out.
    """
    sup = _support(state, tol)
    occ = np.zeros((sup.shape[0], state.d), dtype=bool)
    for r, row in enumerate(sup):
        occ[r, row] = True
    pairs = []
    for i, j in combinations(range(state.d), 2):
        if occ[:, i].any() and np.array_equal(occ[:, i], occ[:, j]):
            pairs.append((i + 1, j + 1))
    return pairs


@dataclass
class BranchSplit:
    without: FermionState
    with_pair: FermionState
    weight_without: float
    weight_with: float
    keep: tuple  # 1-based reference orbitals carried by both children


def branch(state, i, j, tol=AMPLITUDE_TOL):
    """Split along a simultaneous pair (i, j) of reference orbitals (1-based).

    ``with_pair`` is the (N-2)-particle state left after moving e_i ^ e_j to
    the front; both children live on the remaining d-2 orbitals and are
    renormalized, with the squared norms returned as weights. A child with
    zero weight is returned as None.
    """
    i, j = sorted((int(i), int(j)))
    if (i, j) not in find_simultaneous_pairs(state, tol):
        raise NotSimultaneous(f"orbitals {i} and {j} are not always occupied together")
    d, n = state.d, state.n
    keep = tuple(k for k in range(1, d + 1) if k not in (i, j))
    local = {k: p + 1 for p, k in enumerate(keep)}
    without, with_pair = {}, {}
    for key, value in state.amplitudes.items():
        if abs(value) <= tol:
            continue
        if i in key:
            pi, pj = key.index(i), key.index(j)
            sign = (-1) ** (pi + pj - 1)
            with_pair[tuple(local[k] for k in key if k not in (i, j))] = sign * value
        else:
            without[tuple(local[k] for k in key)] = value

    def child(amps, m):
        if not amps:
            return None, 0.0
        s = FermionState(d - 2, m, amps)
        w = s.norm() ** 2
        return s * (1.0 / np.sqrt(w)), w

    a, wa = child(without, n)
    b, wb = child(with_pair, n - 2)
    return BranchSplit(a, b, wa, wb, keep)


def slater_form_nplus1(state):
    """Orbital frame whose determinant equals a state with d = N + 1.

    The frame is built from the N occupied natural orbitals, and its first
    column is rephased so that the overlap with the state is real positive.
    """
    if state.d != state.n + 1:
        raise WrongShape(f"need d = N + 1, got N={state.n}, d={state.d}")
    dec = natural_orbitals(one_particle_rdm(state))
    F = dec.orbitals[:, : state.n].copy()
    c = overlap(F, state)
    if abs(c) > 0:
        F[:, 0] *= c / abs(c)
    return F


# ----------------------------------------------------------------------
# reduction tree


def _leaf_value(state, cfg):
    nz = np.count_nonzero(np.abs(state.vector) > AMPLITUDE_TOL)
    if state.n <= 1 or state.n >= state.d - 1 or nz <= 1:
        local = _trivial_frame(state)
        return abs(overlap(local, state)) ** 2, local
    res = optimize_slater(state, cfg)
    return res.value, res.frame


def _trivial_frame(state):
    d, n = state.d, state.n
    if n == 0:
        return np.zeros((d, 0), dtype=np.complex128)
    if n == d:
        return np.eye(d, dtype=np.complex128)
    if n == 1:
        v = state.vector / np.linalg.norm(state.vector)
        return v[:, None].astype(np.complex128)
    if n == d - 1:
        return slater_form_nplus1(state)
    k = int(np.argmax(np.abs(state.vector)))
    F = np.zeros((d, n), dtype=np.complex128)
    for c, r in enumerate(_tables.subsets(n, d)[k]):
        F[r, c] = 1.0
    return F


@dataclass
class Leaf:
    state: FermionState
    embedding: np.ndarray  # (d_original, d_local) isometry

    kind = "leaf"

    def leaves(self):
        return [self]

    def reconstruct(self):
        return embed(self.state, self.embedding)

    def solve(self, cfg):
        value, frame = _leaf_value(self.state, cfg)
        return value, self.embedding @ frame

    def describe(self, cfg=None):
        value, _ = self.solve(cfg or OptimizerConfig())
        return {
            "kind": "leaf",
            "N": self.state.n,
            "d": self.state.d,
            "terms": int(np.count_nonzero(np.abs(self.state.vector) > AMPLITUDE_TOL)),
            "orbitals": _orbital_labels(self.embedding),
            "imax": value,
        }


@dataclass
class Factor:
    orbital: np.ndarray  # in the original basis
    child: object

    kind = "factor"

    def leaves(self):
        return self.child.leaves()

    def reconstruct(self):
        return wedge(self.orbital, self.child.reconstruct())

    def solve(self, cfg):
        value, frame = self.child.solve(cfg)
        return value, np.column_stack([self.orbital, frame])

    def describe(self, cfg=None):
        return {
            "kind": "factor",
            "orbital": _orbital_labels(self.orbital[:, None])[0],
            "child": self.child.describe(cfg),
        }


@dataclass
class Branch:
    orbitals: tuple  # (f, g) in the original basis
    child_with: object
    child_without: object
    weight_with: float
    weight_without: float

    kind = "branch"

    def leaves(self):
        out = self.child_with.leaves()
        if self.child_without is not None:
            out = out + self.child_without.leaves()
        return out

    def reconstruct(self):
        f, g = self.orbitals
        total = wedge(f, wedge(g, self.child_with.reconstruct())) * np.sqrt(self.weight_with)
        if self.child_without is not None:
            total = total + self.child_without.reconstruct() * np.sqrt(self.weight_without)
        return total

    def solve(self, cfg):
        vw, fw = self.child_with.solve(cfg)
        best = (self.weight_with * vw, np.column_stack([self.orbitals[0], self.orbitals[1], fw]))
        if self.child_without is not None:
            vo, fo = self.child_without.solve(cfg)
            if self.weight_without * vo > best[0]:
                best = (self.weight_without * vo, fo)
        return best

    def describe(self, cfg=None):
        return {
            "kind": "branch",
            "pair": [_orbital_labels(o[:, None])[0] for o in self.orbitals],
            "weight_with": self.weight_with,
            "weight_without": self.weight_without,
            "with": self.child_with.describe(cfg),
            "without": None if self.child_without is None else self.child_without.describe(cfg),
        }


def _orbital_labels(E):
    # Reference index when a column is a coordinate vector, else "mixed".
    labels = []
    for c in range(E.shape[1]):
        col = np.abs(E[:, c])
        k = int(np.argmax(col))
        labels.append(k + 1 if abs(col[k] - 1.0) < 1e-10 else "mixed")
    return labels


class ReductionTree:
    """Result of ``decompose_full``: a root node plus convenience accessors."""

    def __init__(self, root, d):
        self.root = root
        self.d = d

    def leaves(self):
        return self.root.leaves()

    def reconstruct(self):
        return self.root.reconstruct()

    def solve(self, cfg=None):
        """Optimal overlap and frame assembled from the leaves."""
        return self.root.solve(cfg or OptimizerConfig())

    def imax(self, cfg=None):
        return float(self.solve(cfg)[0])

    def describe(self, cfg=None):
        return self.root.describe(cfg)


def _decompose(state, E, tol):
    if state.n == 0 or state.n == state.d:
        return Leaf(state=state, embedding=E)
    if state.n >= 1:
        certain = find_certain_orbitals(state, tol)
        if certain:
            child, B, f = _factor(state, certain[0], tol)
            child = child * (1.0 / child.norm())
            return Factor(orbital=E @ f, child=_decompose(child, E @ B, tol))
    pairs = find_simultaneous_pairs(state) if state.n >= 2 else []
    if pairs:
        i, j = pairs[0]
        split = branch(state, i, j)
        keep = [k - 1 for k in split.keep]
        Ek = E[:, keep]
        return Branch(
            orbitals=(E[:, i - 1].copy(), E[:, j - 1].copy()),
            child_with=_decompose(split.with_pair, Ek, tol),
            child_without=None if split.without is None else _decompose(split.without, Ek, tol),
            weight_with=split.weight_with,
            weight_without=split.weight_without,
        )
    return Leaf(state=state, embedding=E)


def decompose_full(state, tol=CERTAIN_TOL):
    """Greedy reduction: factor certain orbitals, then branch on the first pair, recursively."""
    E = np.eye(state.d, dtype=np.complex128)
    return ReductionTree(_decompose(state, E, tol), state.d)
