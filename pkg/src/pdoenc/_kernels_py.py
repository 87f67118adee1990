"""Pure-numpy statevector gate kernels.

Fallback implementation used when the compiled extension (``pdoenc._kernels``)
is unavailable.  All kernels share the same conventions:

* ``psi`` is a complex128 vector of length 2**n over n wires, wire 0 being the
  least significant bit of the basis index.
* ``one_mask`` / ``zero_mask`` are bit masks of control wires that must be 1
  (resp. 0) for the gate to act; basis states failing the controls are left
  untouched.
* Target wires never overlap control masks (validated by the caller).

Each kernel returns the updated array (which may be ``psi`` itself).
"""

import numpy as np


def _selected(n, one_mask, zero_mask):
    """Indices of basis states satisfying the control masks."""
    idx = np.arange(1 << n, dtype=np.int64)
    if one_mask:
        idx = idx[(idx & one_mask) == one_mask]
    if zero_mask:
        idx = idx[(idx & zero_mask) == 0]
    return idx


def _gather_bits(idx, wires):
    """Pack the bits of idx at the given wires into a dense sub-index."""
    sub = np.zeros_like(idx)
    for j, w in enumerate(wires):
        sub |= ((idx >> w) & 1) << j
    return sub


def _scatter_bits(sub, wires):
    """Inverse of _gather_bits: spread a dense sub-index onto the wires."""
    idx = np.zeros_like(sub)
    for j, w in enumerate(wires):
        idx |= ((sub >> j) & 1) << w
    return idx


def apply_1q(psi, n, target, mat, one_mask, zero_mask):
    """Apply a 2x2 matrix on one wire (with controls)."""
    tbit = 1 << target
    i0 = _selected(n, one_mask, zero_mask | tbit)
    i1 = i0 | tbit
    a0 = psi[i0]
    a1 = psi[i1]
    psi[i0] = mat[0, 0] * a0 + mat[0, 1] * a1
    psi[i1] = mat[1, 0] * a0 + mat[1, 1] * a1
    return psi


def apply_diag(psi, n, wires, table, one_mask, zero_mask):
    """Multiply amplitudes by a diagonal table over the given wires."""
    if not one_mask and not zero_mask:
        idx = np.arange(1 << n, dtype=np.int64)
        psi *= table[_gather_bits(idx, wires)]
        return psi
    sel = _selected(n, one_mask, zero_mask)
    psi[sel] = psi[sel] * table[_gather_bits(sel, wires)]
    return psi


def apply_perm(psi, n, wires, perm, one_mask, zero_mask):
    """Apply a basis permutation |s> -> |perm[s]> on the given wires."""
    sel = _selected(n, one_mask, zero_mask)
    wmask = 0
    for w in wires:
        wmask |= 1 << w
    dest = (sel & ~wmask) | _scatter_bits(perm[_gather_bits(sel, wires)], wires)
    out = psi.copy()
    out[dest] = psi[sel]
    return out


def apply_dense(psi, n, wires, mat, one_mask, zero_mask):
    """Apply a dense 2^k x 2^k matrix on k wires (with controls)."""
    k = len(wires)
    wmask = 0
    for w in wires:
        wmask |= 1 << w
    base = _selected(n, one_mask, zero_mask | wmask)
    offs = _scatter_bits(np.arange(1 << k, dtype=np.int64), np.asarray(wires))
    im = base[:, None] + offs[None, :]
    psi[im] = psi[im] @ mat.T
    return psi
