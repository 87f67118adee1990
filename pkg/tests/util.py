"""Shared helpers for the test suite."""

import numpy as np

from pdoenc.simcore import Circuit


def haar_unitary(n, rng):
    """Haar-random n x n unitary."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def dft_matrix(dim):
    """Unitary DFT with the e^{+2 pi i jk / N} kernel."""
    j = np.arange(dim)
    return np.exp(2j * np.pi * np.outer(j, j) / dim) / np.sqrt(dim)


def random_circuit(n, n_gates, rng, allow_oracles=False):
    """Random circuit over n wires mixing all gate kinds."""
    c = Circuit(n)
    kinds = ["H", "X", "S", "RY", "RZ", "SWAP", "GPHASE", "CX", "CRZ"]
    if allow_oracles:
        kinds += ["PERM", "DIAG"]
    for _ in range(n_gates):
        kind = kinds[rng.integers(len(kinds))]
        w = int(rng.integers(n))
        if kind == "H":
            c.h(w)
        elif kind == "X":
            c.x(w)
        elif kind == "S":
            c.s(w)
        elif kind == "RY":
            c.ry(w, rng.uniform(-np.pi, np.pi))
        elif kind == "RZ":
            c.rz(w, rng.uniform(-np.pi, np.pi))
        elif kind == "GPHASE":
            c.gphase(w, rng.uniform(-np.pi, np.pi))
        elif kind in ("SWAP", "CX", "CRZ") and n >= 2:
            w2 = int(rng.integers(n - 1))
            if w2 >= w:
                w2 += 1
            if kind == "SWAP":
                c.swap(w, w2)
            elif kind == "CX":
                c.x(w, [(w2, int(rng.integers(2)))])
            else:
                c.rz(w, rng.uniform(-np.pi, np.pi), [(w2, 1)])
        elif kind == "PERM":
            k = min(n, 2)
            wires = tuple(rng.permutation(n)[:k])
            c.oracle_perm(wires, rng.permutation(1 << k))
        elif kind == "DIAG":
            k = min(n, 2)
            wires = tuple(rng.permutation(n)[:k])
            c.oracle_diag(wires, np.exp(2j * np.pi * rng.random(1 << k)))
    return c
