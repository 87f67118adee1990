"""Block-encoding algebra: linear combinations (LCU), products, tensor
lifts, and QFT conjugation.

Scale bookkeeping for ``lcu``: each input encoding j contributes its
phase-corrected block B_j, and the result encodes sum_j y_j B_j.  When all
inputs share one scale alpha this equals (1/alpha) sum_j y_j A_j, so the
reported gamma is alpha*beta; with mixed scales the coefficients y are
understood to weight the blocks directly and gamma = beta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gatelib import qft_circuit
from .simcore import (
    BlockEncoding,
    Circuit,
    ContractViolationError,
    DimensionError,
    canonicalize_encoding,
)


def _complete_unitary(first_column):
    """A unitary whose first column is the given unit vector."""
    v = np.asarray(first_column, dtype=complex)
    dim = v.shape[0]
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ContractViolationError("column must be normalized")
    k = int(np.argmax(np.abs(v)))
    cols = [v] + [np.eye(dim, dtype=complex)[:, j] for j in range(dim) if j != k]
    q, _ = np.linalg.qr(np.column_stack(cols))
    # QR fixes the first column only up to a unit scalar; rotate it back.
    q[:, 0] *= v[k] / q[k, 0]
    return q


@dataclass(frozen=True)
class PreparePair:
    """Prepare unitaries (U_L, U_R) whose first columns c, d satisfy
    beta * conj(c_j) * d_j = y_j for j < len(y) and c_j* d_j = 0 beyond."""

    u_l: np.ndarray
    u_r: np.ndarray
    y: np.ndarray
    beta: float

    @property
    def wires(self):
        return int(self.u_l.shape[0]).bit_length() - 1


def prepare_pair(y, beta) -> PreparePair:
    """Build the (U_L, U_R) pair for coefficients y with budget beta >= ||y||_1.

    First columns: c_j = sqrt(|y_j|/beta), d_j = e^{i arg y_j} sqrt(|y_j|/beta).
    If ||y||_1 < beta, the slack goes into disjoint padding slots (index m for
    c, index m+1 for d) so the cross terms beyond m vanish exactly.
    """
    y = np.asarray(y, dtype=complex)
    m = y.shape[0]
    beta = float(beta)
    if m < 1 or not np.any(y):
        raise ContractViolationError("coefficient vector must be nonzero")
    one_norm = float(np.sum(np.abs(y)))
    if one_norm > beta * (1 + 1e-12):
        raise ContractViolationError("beta must dominate the 1-norm of y")
    slack = max(0.0, 1.0 - one_norm / beta)
    pad = slack > 1e-14
    dim_needed = m + 2 if pad else m
    b = max(1, int(np.ceil(np.log2(dim_needed))))
    dim = 1 << b
    c = np.zeros(dim, dtype=complex)
    d = np.zeros(dim, dtype=complex)
    mag = np.sqrt(np.abs(y) / beta)
    c[:m] = mag
    phases = np.where(np.abs(y) > 0, y / np.where(np.abs(y) > 0, np.abs(y), 1.0), 1.0)
    d[:m] = phases * mag
    if pad:
        c[m] = np.sqrt(slack)
        d[m + 1] = np.sqrt(slack)
    return PreparePair(
        u_l=_complete_unitary(c), u_r=_complete_unitary(d), y=y, beta=beta
    )


def lcu(pair: PreparePair, encodings) -> BlockEncoding:
    """(U_L^dag (x) I) . select(W) . (U_R (x) I): encodes sum_j y_j B_j.

    B_j are the phase-corrected blocks of the inputs.  Layout: system wires
    at the bottom, the (max-width) encoding ancilla bank above them, the
    b-wire index register on top.
    """
    encodings = [canonicalize_encoding(be) for be in encodings]
    if len(encodings) != pair.y.shape[0]:
        raise DimensionError("one encoding per coefficient required")
    s = encodings[0].system_size
    if any(be.system_size != s for be in encodings):
        raise DimensionError("encodings act on different system sizes")
    gammas = [be.gamma for be in encodings]
    alpha = gammas[0]
    if any(abs(g - alpha) > 1e-9 * max(abs(g), abs(alpha)) for g in gammas):
        alpha = 1.0
    a = max(len(be.ancilla_wires) for be in encodings)
    b = pair.wires
    n = s + a + b
    idx_wires = tuple(range(s + a, n))

    circ = Circuit(n)
    circ.unitary(idx_wires, pair.u_r, label="U_R")
    for j, be in enumerate(encodings):
        controls = [(idx_wires[i], (j >> i) & 1) for i in range(b)]
        wire_map = {w: k for k, w in enumerate(be.input_system_wires)}
        wire_map.update({w: s + k for k, w in enumerate(be.ancilla_wires)})
        sub = Circuit(be.circuit.wire_count)
        sub.extend(be.circuit)
        # Divide out the recorded phase so each branch contributes the
        # canonical block.
        sub.global_phase *= np.conj(be.phase)
        circ.extend_controlled(sub, controls, wire_map)
    circ.unitary(idx_wires, pair.u_l.conj().T, label="U_L_dag")

    eps = alpha * float(
        sum(abs(yj) * be.epsilon / be.gamma for yj, be in zip(pair.y, encodings))
    )
    sys_wires = tuple(range(s))
    return BlockEncoding(
        circuit=circ,
        gamma=alpha * pair.beta,
        ancilla_wires=tuple(range(s, n)),
        epsilon=eps,
        input_system_wires=sys_wires,
        output_system_wires=sys_wires,
    )


def product(be1: BlockEncoding, be2: BlockEncoding) -> BlockEncoding:
    """Encoding of A1 . A2 (be2 applied first), gamma = g1*g2, ancillas add."""
    be1 = canonicalize_encoding(be1)
    be2 = canonicalize_encoding(be2)
    s = be1.system_size
    if be2.system_size != s:
        raise DimensionError("system sizes differ")
    a1, a2 = len(be1.ancilla_wires), len(be2.ancilla_wires)
    n = s + a1 + a2
    circ = Circuit(n)
    map2 = {w: k for k, w in enumerate(be2.input_system_wires)}
    map2.update({w: s + k for k, w in enumerate(be2.ancilla_wires)})
    circ.extend(be2.circuit, map2)
    map1 = {w: k for k, w in enumerate(be1.input_system_wires)}
    map1.update({w: s + a2 + k for k, w in enumerate(be1.ancilla_wires)})
    circ.extend(be1.circuit, map1)
    sys_wires = tuple(range(s))
    return BlockEncoding(
        circuit=circ,
        gamma=be1.gamma * be2.gamma,
        ancilla_wires=tuple(range(s, n)),
        epsilon=be1.gamma * be2.epsilon + be2.gamma * be1.epsilon,
        input_system_wires=sys_wires,
        output_system_wires=sys_wires,
        phase=be1.phase * be2.phase,
    )


def conjugate_by_qft(be: BlockEncoding, d: int) -> BlockEncoding:
    """Encoding of F^{(x)d} . B . F^{(x)d dag} (F = unitary DFT per register)."""
    be = canonicalize_encoding(be)
    s = be.system_size
    if d < 1 or s % d:
        raise DimensionError("system wires must split into d equal registers")
    p = s // d
    qft = qft_circuit(p)
    iqft = qft.inverse()
    sys = be.input_system_wires
    circ = Circuit(be.circuit.wire_count)
    for k in range(d):
        circ.extend(iqft, {j: sys[k * p + j] for j in range(p)})
    circ.extend(be.circuit)
    for k in range(d):
        circ.extend(qft, {j: sys[k * p + j] for j in range(p)})
    return BlockEncoding(
        circuit=circ,
        gamma=be.gamma,
        ancilla_wires=be.ancilla_wires,
        epsilon=be.epsilon,
        hermitian=be.hermitian,
        input_system_wires=sys,
        output_system_wires=sys,
        phase=be.phase,
    )


def tensor_encodings(encodings) -> BlockEncoding:
    """Kronecker combination; the list's last encoding lands on the lowest
    wires (matching tensor(A, B) = kron(A, B) with B low)."""
    encodings = [canonicalize_encoding(be) for be in encodings]
    if not encodings:
        raise DimensionError("empty encoding list")
    s = sum(be.system_size for be in encodings)
    n = s + sum(len(be.ancilla_wires) for be in encodings)
    circ = Circuit(n)
    sys_base, anc_base = 0, s
    gamma, phase = 1.0, complex(1.0)
    eps_terms = []
    for be in reversed(encodings):
        wire_map = {w: sys_base + k for k, w in enumerate(be.input_system_wires)}
        wire_map.update({w: anc_base + k for k, w in enumerate(be.ancilla_wires)})
        circ.extend(be.circuit, wire_map)
        sys_base += be.system_size
        anc_base += len(be.ancilla_wires)
        gamma *= be.gamma
        phase *= be.phase
        eps_terms.append((be.epsilon, be.gamma))
    eps = sum(
        e * np.prod([g2 for j2, (_, g2) in enumerate(eps_terms) if j2 != j])
        for j, (e, _) in enumerate(eps_terms)
    )
    sys_wires = tuple(range(s))
    return BlockEncoding(
        circuit=circ,
        gamma=float(gamma),
        ancilla_wires=tuple(range(s, n)),
        epsilon=float(eps),
        hermitian=all(be.hermitian for be in encodings),
        input_system_wires=sys_wires,
        output_system_wires=sys_wires,
        phase=phase,
    )
