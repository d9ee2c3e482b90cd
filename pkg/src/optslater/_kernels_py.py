"""Pure numpy implementations of the hot kernels.

Same signatures as the compiled ``_kernels`` extension; used when the
extension is unavailable or ``OPTSLATER_PURE_PYTHON`` is set.
"""

import numpy as np

NAME = "python"


def minors(F, rows):
    """Determinants of the square row-submatrices ``F[rows[r], :]``."""
    F = np.asarray(F, dtype=np.complex128)
    rows = np.asarray(rows, dtype=np.int64)
    if F.shape[1] == 0:
        return np.ones(rows.shape[0], dtype=np.complex128)
    return np.linalg.det(F[rows])


def compound(F, rows, cols):
    """Matrix of minors ``det F[rows[r]][:, cols[c]]``, shape (len(rows), len(cols))."""
    F = np.asarray(F, dtype=np.complex128)
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    if rows.shape[1] == 0:
        return np.ones((rows.shape[0], cols.shape[0]), dtype=np.complex128)
    sub = F[rows[:, None, :, None], cols[None, :, None, :]]
    return np.linalg.det(sub)


def interior(vec, phi, table):
    """v_k = <e_k ^ phi_1 ^ ... ^ phi_{n-1} | psi> for every basis orbital k."""
    m = minors(phi, table.sub_rows)
    contrib = table.sign * np.conj(m[table.l]) * vec[table.j]
    re = np.bincount(table.k, weights=contrib.real, minlength=table.d)
    im = np.bincount(table.k, weights=contrib.imag, minlength=table.d)
    return re + 1j * im


def update_slot(vec, F, slot, table, thresh):
    """Replace column ``slot`` of F (in place) by its optimal orbital.

    Returns the norm of the projected contraction vector, which equals the
    overlap magnitude after the update. F is left untouched when that norm
    is not above ``thresh``.
    """
    others = np.delete(F, slot, axis=1)
    v = interior(vec, others, table)
    v -= others @ (others.conj().T @ v)
    nv = float(np.linalg.norm(v))
    if nv > thresh:
        F[:, slot] = v / nv
    return nv


def sweep(vec, F, table, thresh, start=0):
    """Update slots ``start..n-1`` in order.

    Returns ``(norm, step, bad)``: the last norm, the largest phase-aligned
    column change, and the first slot whose norm fell to ``thresh`` (-1 if
    none; the sweep stops there).
    """
    worst = 0.0
    nv = 0.0
    for slot in range(start, F.shape[1]):
        old = F[:, slot].copy()
        nv = update_slot(vec, F, slot, table, thresh)
        if nv <= thresh:
            return nv, worst, slot
        g = np.vdot(old, F[:, slot])
        ph = g / abs(g) if abs(g) > 0 else 1.0
        worst = max(worst, float(np.abs(F[:, slot] - old * ph).max()))
    return nv, worst, -1
