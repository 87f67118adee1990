"""Concrete circuit primitives: QFT, phase multiplication, CR_phi, and the
element-wise multiplication circuit.

Wire conventions follow simcore (wire 0 = least significant bit).  Circuits
acting on two registers |x>|xi> put the xi register on the low wires.
"""

from __future__ import annotations

import numpy as np

from .simcore import Circuit, ContractViolationError, GateInstance


def qft_circuit(p: int) -> Circuit:
    """QFT on p wires: |j> -> (1/sqrt(N)) sum_k e^{2 pi i jk/N} |k>.

    Standard controlled-rotation cascade plus floor(p/2) final swaps:
    p Hadamards, p(p-1)/2 controlled rotations.
    """
    if p < 1:
        raise ContractViolationError("p must be >= 1")
    c = Circuit(p)
    for m in range(p - 1, -1, -1):
        c.h(m)
        for k in range(2, m + 2):
            # R_k = diag(1, e^{2 pi i / 2^k}) targeting wire m,
            # controlled by the wire k-1 places below.
            c.crz(m - k + 1, m, 2 * np.pi / (1 << k))
    for i in range(p // 2):
        c.swap(i, p - 1 - i)
    return c


def phase_mult_circuit(p: int) -> Circuit:
    """U_ph on 2p wires: |x>|xi> -> e^{2 pi i x xi / P} |x>|xi>, exactly.

    xi occupies wires 0..p-1, x occupies wires p..2p-1.  One controlled
    rotation R_{p-j-k} per pair (j, k) with j + k < p — p(p+1)/2 in total —
    exploiting that the omitted pairs contribute unit phase.
    """
    if p < 1:
        raise ContractViolationError("p must be >= 1")
    c = Circuit(2 * p)
    for j in range(p):
        for k in range(p - j):
            # R_m = diag(1, e^{2 pi i 2^-m}) with m = p - j - k,
            # target x_j, control xi_k.
            m = p - j - k
            c.crz(k, p + j, 2 * np.pi / (1 << m))
    return c


def phase_mult_multidim(p: int, d: int) -> Circuit:
    """U_ph^{(x)d} on 2pd wires: |x>|xi> -> e^{2 pi i x.xi/P} |x>|xi>.

    The d xi registers sit on wires 0..pd-1 (register k lowest-first), the d
    x registers on wires pd..2pd-1, and phase_mult_circuit is applied to each
    (x_k, xi_k) pair.
    """
    if d < 1:
        raise ContractViolationError("d must be >= 1")
    base = phase_mult_circuit(p)
    c = Circuit(2 * p * d)
    for k in range(d):
        wire_map = {j: k * p + j for j in range(p)}
        wire_map.update({p + j: p * d + k * p + j for j in range(p)})
        c.extend(base, wire_map)
    return c


def cr_phi_gate(phi: float) -> Circuit:
    """CR_phi on 2 wires: e^{-i phi Z} on the signal in the ancilla-|0>
    subspace, e^{+i phi Z} in the ancilla-|1> subspace.

    Wire 0 is the ancilla (control), wire 1 the signal.  Realized as the
    X - e^{-i phi Z} - X sandwich; the rotation's scalar factor e^{-i phi}
    lives in the circuit's global phase.
    """
    if not -np.pi <= phi <= np.pi:
        raise ContractViolationError("phi must lie in [-pi, pi]")
    c = Circuit(2)
    c.x(1, [(0, 1)])
    c.rz(1, 2 * phi)
    c.x(1, [(0, 1)])
    c.global_phase = np.exp(-1j * phi)
    return c


def elementwise_mult_circuit(u_a, u_b):
    """Circuit computing the element-wise product of two prepared states.

    Applies U_a on the top register (wires n..2n-1), U_b on the bottom
    register (wires 0..n-1), then transversal CNOTs.  Post-selecting the
    bottom register on |0^n> leaves (1/c) sum_j a_j b_j |j> on the top
    register, where a, b are the first columns of U_a, U_b and
    c = sqrt(sum |a_j b_j|^2); the success probability is c^2.

    Returns (circuit, c).  c == 0 is flagged as degenerate.
    """
    u_a = np.asarray(u_a, dtype=complex)
    u_b = np.asarray(u_b, dtype=complex)
    if u_a.shape != u_b.shape or u_a.ndim != 2 or u_a.shape[0] != u_a.shape[1]:
        raise ContractViolationError("U_a, U_b must be square and equal-sized")
    dim = u_a.shape[0]
    n = int(dim).bit_length() - 1
    if 1 << n != dim:
        raise ContractViolationError("dimension must be a power of two")
    c_val = float(np.sqrt(np.sum(np.abs(u_a[:, 0] * u_b[:, 0]) ** 2)))
    if c_val == 0.0:
        raise ContractViolationError(
            "degenerate pair: element-wise product vanishes, post-selection impossible"
        )
    circ = Circuit(2 * n)
    a_wires = tuple(range(n, 2 * n))
    b_wires = tuple(range(n))
    circ.unitary(a_wires, u_a, label="U_a")
    circ.unitary(b_wires, u_b, label="U_b")
    for l in range(n):
        circ.cnot(n + l, l)
    return circ, c_val
