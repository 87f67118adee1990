# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled statevector gate kernels.

Same contract as ``pdoenc._kernels_py`` (see its docstring); selected at
import time by ``pdoenc.kernels`` when available.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.complex128_t cplx
ctypedef cnp.int64_t i64


cdef inline bint _ctrl_ok(i64 idx, i64 one_mask, i64 zero_mask) nogil:
    if one_mask and (idx & one_mask) != one_mask:
        return 0
    if zero_mask and (idx & zero_mask) != 0:
        return 0
    return 1


def apply_1q(cplx[::1] psi, int n, int target, cplx[:, ::1] mat,
             i64 one_mask, i64 zero_mask):
    cdef i64 size = 1 << n
    cdef i64 tbit = 1 << target
    cdef i64 i
    cdef cplx a0, a1
    cdef cplx m00 = mat[0, 0], m01 = mat[0, 1], m10 = mat[1, 0], m11 = mat[1, 1]
    with nogil:
        for i in range(size):
            if i & tbit:
                continue
            if not _ctrl_ok(i, one_mask, zero_mask):
                continue
            a0 = psi[i]
            a1 = psi[i | tbit]
            psi[i] = m00 * a0 + m01 * a1
            psi[i | tbit] = m10 * a0 + m11 * a1
    return np.asarray(psi)


def apply_diag(cplx[::1] psi, int n, i64[::1] wires, cplx[::1] table,
               i64 one_mask, i64 zero_mask):
    cdef i64 size = 1 << n
    cdef int k = wires.shape[0]
    cdef i64 i, sub
    cdef int j
    with nogil:
        for i in range(size):
            if not _ctrl_ok(i, one_mask, zero_mask):
                continue
            sub = 0
            for j in range(k):
                sub |= ((i >> wires[j]) & 1) << j
            psi[i] = psi[i] * table[sub]
    return np.asarray(psi)


def apply_perm(cplx[::1] psi, int n, i64[::1] wires, i64[::1] perm,
               i64 one_mask, i64 zero_mask):
    cdef i64 size = 1 << n
    cdef int k = wires.shape[0]
    cdef i64 i, sub, dest, wmask = 0
    cdef int j
    out_arr = np.array(psi, copy=True)
    cdef cplx[::1] out = out_arr
    for j in range(k):
        wmask |= <i64>1 << wires[j]
    with nogil:
        for i in range(size):
            if not _ctrl_ok(i, one_mask, zero_mask):
                continue
            sub = 0
            for j in range(k):
                sub |= ((i >> wires[j]) & 1) << j
            sub = perm[sub]
            dest = i & ~wmask
            for j in range(k):
                dest |= ((sub >> j) & 1) << wires[j]
            out[dest] = psi[i]
    return out_arr


def apply_dense(cplx[::1] psi, int n, i64[::1] wires, cplx[:, ::1] mat,
                i64 one_mask, i64 zero_mask):
    cdef i64 size = 1 << n
    cdef int k = wires.shape[0]
    cdef i64 dim = 1 << k
    cdef i64 i, s, t, idx, wmask = 0
    cdef int j
    cdef cplx acc
    offs_arr = np.zeros(dim, dtype=np.int64)
    cdef i64[::1] offs = offs_arr
    scratch_arr = np.zeros(dim, dtype=np.complex128)
    cdef cplx[::1] scratch = scratch_arr
    for j in range(k):
        wmask |= <i64>1 << wires[j]
    for s in range(dim):
        idx = 0
        for j in range(k):
            idx |= ((s >> j) & 1) << wires[j]
        offs[s] = idx
    with nogil:
        for i in range(size):
            if i & wmask:
                continue
            if not _ctrl_ok(i, one_mask, zero_mask):
                continue
            for s in range(dim):
                scratch[s] = psi[i + offs[s]]
            for s in range(dim):
                acc = 0
                for t in range(dim):
                    acc = acc + mat[s, t] * scratch[t]
                psi[i + offs[s]] = acc
    return np.asarray(psi)
