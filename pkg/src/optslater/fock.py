"""N-fermion states in the exterior power of a d-dimensional orbital space.

States are stored densely over the lexicographically ordered N-subsets of
the d orbitals, with a sparse 1-based view (``FermionState.amplitudes``) for
input and output. Orbital frames are plain ``(d, M)`` complex arrays whose
columns are the orbitals expanded in the reference basis.
"""

from math import comb

import numpy as np

from . import _tables
from ._backend import kernels
from .errors import BadShape, NotOrthonormal, NotUnitary, ShapeMismatch, ZeroState

ORTHO_TOL = 1e-8
UNITARY_TOL = 1e-10
NORM_TOL = 1e-12
ZERO_TOL = 1e-14


def canonical_order(indices):
    """Sort an index tuple, returning ``(sorted_tuple, sign)``.

    Raises BadShape when an index repeats (the wedge product vanishes).
    """
    idx = list(indices)
    if len(set(idx)) != len(idx):
        raise BadShape(f"repeated orbital in {tuple(indices)}")
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return tuple(idx), sign


class FermionState:
    """Immutable N-fermion amplitude vector over d orbitals.

    Parameters
    ----------
    d, n : int
        Orbital count and particle count, ``0 <= n <= d``.
    amplitudes : mapping, optional
        1-based index tuples to complex amplitudes. Unsorted tuples are
        reordered with the permutation sign; tuples naming the same set are
        summed.
    """

    __slots__ = ("d", "n", "_vec")

    def __init__(self, d, n, amplitudes=None):
        d = int(d)
        n = int(n)
        if d < 1 or not 0 <= n <= d:
            raise BadShape(f"need 0 <= N <= d with d >= 1, got N={n}, d={d}")
        index = _tables.subset_index(n, d)
        vec = np.zeros(len(index), dtype=np.complex128)
        for key, value in (amplitudes or {}).items():
            key = tuple(int(k) for k in key)
            if len(key) != n:
                raise BadShape(f"index set {key} does not have {n} orbitals")
            if any(k < 1 or k > d for k in key):
                raise BadShape(f"index set {key} out of range 1..{d}")
            ordered, sign = canonical_order(key)
            vec[index[tuple(k - 1 for k in ordered)]] += sign * complex(value)
        vec.setflags(write=False)
        self.d = d
        self.n = n
        self._vec = vec

    @classmethod
    def from_vector(cls, d, n, vec):
        vec = np.array(vec, dtype=np.complex128).reshape(-1)
        if vec.size != comb(d, n):
            raise BadShape(f"vector of length {vec.size} does not match C({d},{n})")
        obj = cls(d, n)
        vec.setflags(write=False)
        obj._vec = vec
        return obj

    @property
    def vector(self):
        """Dense read-only amplitude vector in lexicographic subset order."""
        return self._vec

    @property
    def dim(self):
        return self._vec.size

    @property
    def amplitudes(self):
        """Nonzero amplitudes keyed by sorted 1-based tuples."""
        rows = _tables.subsets(self.n, self.d)
        nz = np.flatnonzero(self._vec)
        return {tuple(int(x) + 1 for x in rows[i]): complex(self._vec[i]) for i in nz}

    def amplitude(self, indices):
        ordered, sign = canonical_order(indices)
        i = _tables.subset_index(self.n, self.d)[tuple(k - 1 for k in ordered)]
        return sign * complex(self._vec[i])

    def norm(self):
        return float(np.linalg.norm(self._vec))

    def is_normalized(self, tol=NORM_TOL):
        return abs(self.norm() ** 2 - 1.0) <= tol

    def normalized(self):
        return normalize(self)

    def allclose(self, other, atol=1e-10):
        return (self.d, self.n) == (other.d, other.n) and bool(
            np.allclose(self._vec, other._vec, rtol=0.0, atol=atol)
        )

    def __eq__(self, other):
        if not isinstance(other, FermionState):
            return NotImplemented
        return (self.d, self.n) == (other.d, other.n) and np.array_equal(self._vec, other._vec)

    def __hash__(self):
        return hash((self.d, self.n, self._vec.tobytes()))

    def __add__(self, other):
        _check_same_shape(self, other)
        return FermionState.from_vector(self.d, self.n, self._vec + other._vec)

    def __sub__(self, other):
        _check_same_shape(self, other)
        return FermionState.from_vector(self.d, self.n, self._vec - other._vec)

    def __mul__(self, scalar):
        return FermionState.from_vector(self.d, self.n, complex(scalar) * self._vec)

    __rmul__ = __mul__

    def __repr__(self):
        terms = " + ".join(
            f"({v.real:.6g}{v.imag:+.6g}j)|{''.join(map(str, k)) if self.d < 10 else ','.join(map(str, k))}>"
            for k, v in list(self.amplitudes.items())[:6]
        )
        more = " + ..." if np.count_nonzero(self._vec) > 6 else ""
        return f"FermionState(d={self.d}, N={self.n}: {terms or '0'}{more})"


def _check_same_shape(a, b):
    if (a.d, a.n) != (b.d, b.n):
        raise ShapeMismatch(f"(N, d) = ({a.n}, {a.d}) vs ({b.n}, {b.d})")


def as_frame(frame, d=None, tol=ORTHO_TOL):
    """Validate an orbital frame and return it as a complex (d, M) array."""
    F = np.asarray(frame, dtype=np.complex128)
    if F.ndim == 1:
        F = F[:, None]
    if F.ndim != 2:
        raise ShapeMismatch("orbital frame must be a 2-d array")
    if d is not None and F.shape[0] != d:
        raise ShapeMismatch(f"frame has {F.shape[0]} rows, state has d={d}")
    if tol is not None:
        err = np.abs(F.conj().T @ F - np.eye(F.shape[1])).max(initial=0.0)
        if err > tol:
            raise NotOrthonormal(f"column Gram matrix deviates from identity by {err:.3g}")
    return F


def normalize(state):
    nrm = state.norm()
    if nrm <= ZERO_TOL:
        raise ZeroState("cannot normalize the zero state")
    return FermionState.from_vector(state.d, state.n, state.vector / nrm)


def inner_product(a, b):
    """<a|b>, conjugate-linear in ``a``."""
    _check_same_shape(a, b)
    return complex(np.vdot(a.vector, b.vector))


def slater_amplitudes(frame):
    """Expand the Slater determinant of an orthonormal (d, N) frame."""
    F = as_frame(frame)
    d, n = F.shape
    if n > d:
        raise ShapeMismatch(f"{n} orbitals cannot be orthonormal in d={d}")
    return FermionState.from_vector(d, n, kernels.minors(F, _tables.subsets(n, d)))


def overlap(frame, state):
    """<phi_1 ^ ... ^ phi_N | psi> for the columns of ``frame``."""
    F = as_frame(frame, state.d)
    if F.shape[1] != state.n:
        raise ShapeMismatch(f"frame has {F.shape[1]} orbitals, state has N={state.n}")
    mins = kernels.minors(F, _tables.subsets(state.n, state.d))
    return complex(np.vdot(mins, state.vector))


def interior_contraction(state, partial):
    """Vector v with (phi, v) = <phi ^ partial_1 ^ ... ^ partial_{N-1} | psi>."""
    if state.n < 1:
        raise ShapeMismatch("interior contraction needs N >= 1")
    if isinstance(partial, (list, tuple)):
        if partial:
            P = np.column_stack([np.asarray(p, dtype=np.complex128) for p in partial])
        else:
            P = np.zeros((state.d, 0), dtype=np.complex128)
    else:
        P = np.asarray(partial, dtype=np.complex128)
        if P.ndim == 1:
            P = P[:, None]
    if P.shape != (state.d, state.n - 1):
        raise ShapeMismatch(f"expected {state.n - 1} orbitals of length {state.d}, got shape {P.shape}")
    return kernels.interior(state.vector, P, _tables.creation_table(state.n, state.d))


def rotate_basis(state, U):
    """Apply the orbital map e_k -> U e_k to every orbital of the state."""
    U = np.asarray(U, dtype=np.complex128)
    if U.shape != (state.d, state.d):
        raise ShapeMismatch(f"unitary must be {state.d}x{state.d}")
    err = np.abs(U.conj().T @ U - np.eye(state.d)).max()
    if err > UNITARY_TOL:
        raise NotUnitary(f"U^dagger U deviates from identity by {err:.3g}")
    rows = _tables.subsets(state.n, state.d)
    return FermionState.from_vector(state.d, state.n, kernels.compound(U, rows, rows) @ state.vector)


def embed(state, isometry):
    """Map a state on d' local orbitals into d orbitals via a (d, d') isometry."""
    E = np.asarray(isometry, dtype=np.complex128)
    if E.shape[1] != state.d:
        raise ShapeMismatch(f"isometry has {E.shape[1]} columns, state has d={state.d}")
    d = E.shape[0]
    if state.n == 0:
        return FermionState.from_vector(d, 0, state.vector)
    C = kernels.compound(E, _tables.subsets(state.n, d), _tables.subsets(state.n, state.d))
    return FermionState.from_vector(d, state.n, C @ state.vector)


def wedge(f, state):
    """The (N+1)-fermion state f ^ psi."""
    f = np.asarray(f, dtype=np.complex128).reshape(-1)
    if f.size != state.d:
        raise ShapeMismatch(f"orbital has length {f.size}, state has d={state.d}")
    if state.n >= state.d:
        raise ShapeMismatch("cannot add a particle to a full state")
    t = _tables.creation_table(state.n + 1, state.d)
    contrib = t.sign * f[t.k] * state.vector[t.l]
    nj = comb(state.d, state.n + 1)
    out = np.bincount(t.j, weights=contrib.real, minlength=nj) + 1j * np.bincount(
        t.j, weights=contrib.imag, minlength=nj
    )
    return FermionState.from_vector(state.d, state.n + 1, out)


def haar_frame(d, m, rng):
    """Haar-random (d, m) frame with orthonormal columns."""
    z = rng.standard_normal((d, m)) + 1j * rng.standard_normal((d, m))
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph[None, :]


def haar_unitary(d, rng):
    return haar_frame(d, d, rng)


def random_state(n, d, seed=None):
    """Normalized state with i.i.d. complex Gaussian amplitudes."""
    if not (0 < n <= d):
        raise BadShape(f"need 0 < N <= d, got N={n}, d={d}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    dim = comb(d, n)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return FermionState.from_vector(d, n, z / np.linalg.norm(z))


def basis_state(d, *indices):
    """The Slater determinant |i_1 i_2 ... i_N> of reference orbitals (1-based)."""
    return FermionState(d, len(indices), {tuple(indices): 1.0})


def complete_basis(F, tol=1e-6):
    """Extend orthonormal columns F (d, m) to a d x d unitary.

    Reference vectors e_1..e_d are appended in order by Gram-Schmidt and kept
    when their residual norm exceeds ``tol``, so a coordinate-aligned F is
    completed by the remaining coordinate vectors in their natural order.
    """
    F = np.asarray(F, dtype=np.complex128)
    d, m = F.shape
    cols = [F[:, i] for i in range(m)]
    for k in range(d):
        if len(cols) == d:
            break
        v = np.zeros(d, dtype=np.complex128)
        v[k] = 1.0
        for _ in range(2):
            for c in cols:
                v = v - c * np.vdot(c, v)
        nv = np.linalg.norm(v)
        if nv > tol:
            cols.append(v / nv)
    return np.column_stack(cols)


def annihilation_matrix(state):
    """Matrix A of shape (d, C(d, N-1)) with A[k, L] = <L| a_k |psi>.

    ``a_k`` removes orbital k from the front of the wedge product, so
    A[k, L] = (-1)**p * C_J where J = L + {k} and p is the position of k in J.
    """
    t = _tables.creation_table(state.n, state.d)
    A = np.zeros((state.d, t.sub_rows.shape[0]), dtype=np.complex128)
    A[t.k, t.l] = t.sign * state.vector[t.j]
    return A
