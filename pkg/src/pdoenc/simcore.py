"""Circuit representation, exact statevector simulation, and block extraction.

Bit-order convention (used globally): a basis state |y_{n-1} ... y_1 y_0> has
index sum_k y_k 2^k, i.e. wire 0 carries the least significant bit.  For
multi-register systems, register 1 sits on the lowest wires.  Under this
convention ``tensor(A, B) = kron(A, B)`` puts B on the low wires.

Gate kinds:

==============  =======================================================
H, X, S         fixed one-qubit gates; S = diag(1, i)
RY(theta)       exp(-i*theta*Y/2) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]
RZ(theta)       diag(1, e^{i*theta})
SWAP            two-wire swap
GPHASE(theta)   diag(e^{i*theta}, e^{i*theta}) on one wire — a global phase
                restricted to the control-satisfied subspace
ORACLE_PERM     basis permutation |s> -> |perm[s]> over the target wires
ORACLE_DIAG     unit-modulus diagonal over the target wires
UNITARY         dense matrix over the target wires
==============  =======================================================

Every gate may carry controls, each a (wire, polarity) pair with polarity 1
(filled) or 0 (open).  CNOT is ``X`` with one control; controlled rotations
are RZ/RY with controls; the multi-controlled phase is RZ or GPHASE with
several controls.

Circuits carry an explicit ``global_phase`` factor (applied by the
simulator) rather than realizing it with gates.  Instances are treated as
immutable once built; the builder methods exist only during construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

# Simulation caps (wires): dense unitary construction / statevector runs.
DENSE_WIRE_CAP = 16
STATE_WIRE_CAP = 24

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
_X = np.array([[0, 1], [1, 0]], dtype=complex)


class DimensionError(ValueError):
    """Operand dimensions are inconsistent."""


class ResourceLimitError(RuntimeError):
    """A simulation cap would be exceeded."""


class ContractViolationError(ValueError):
    """A caller-supplied bound or constant fails its precondition."""


class SolverError(RuntimeError):
    """An iterative solver failed to converge."""


@dataclass(frozen=True)
class GridSpec:
    """Discretization parameters: p qubits per dimension, d dimensions.

    Points per dimension P = 2^p, total points N = P^d, system wires p*d.
    """

    p: int
    d: int = 1

    def __post_init__(self):
        if self.p < 1 or self.d < 1:
            raise ContractViolationError("GridSpec requires p >= 1 and d >= 1")

    @property
    def P(self):
        return 1 << self.p

    @property
    def N(self):
        return self.P**self.d

    @property
    def wires(self):
        return self.p * self.d

    def coords(self, n):
        """Per-dimension coordinates of flat index n (dimension 1 lowest)."""
        n = np.asarray(n, dtype=np.int64)
        return np.stack([(n >> (k * self.p)) & (self.P - 1) for k in range(self.d)])

    def fold(self, xi):
        """Frequency folding: components >= P/2 map to their negative alias."""
        xi = np.asarray(xi, dtype=np.int64)
        return np.where(xi >= self.P // 2, xi - self.P, xi)


def gather_bits(idx, wires):
    """Pack the bits of ``idx`` at ``wires`` into a dense sub-index."""
    idx = np.asarray(idx, dtype=np.int64)
    sub = np.zeros_like(idx)
    for j, w in enumerate(wires):
        sub |= ((idx >> w) & 1) << j
    return sub


def scatter_bits(sub, wires):
    """Spread a dense sub-index onto the given wires (inverse of gather)."""
    sub = np.asarray(sub, dtype=np.int64)
    idx = np.zeros_like(sub)
    for j, w in enumerate(wires):
        idx |= ((sub >> j) & 1) << w
    return idx


@dataclass(frozen=True, eq=False)
class GateInstance:
    """One gate: kind, target wires, (wire, polarity) controls, parameters."""

    kind: str
    targets: tuple
    controls: tuple = ()
    param: float = 0.0
    table: np.ndarray | None = None
    label: str = ""

    def control_masks(self):
        one = 0
        zero = 0
        for w, pol in self.controls:
            if pol:
                one |= 1 << w
            else:
                zero |= 1 << w
        return one, zero

    @property
    def wires(self):
        return self.targets + tuple(w for w, _ in self.controls)

    def cost(self):
        """Elementary (one/two-qubit) gate tally for this gate.

        Oracles are counted separately; composite gates use documented
        synthesis estimates (linear in the wire count for multi-controlled
        one-qubit gates, 4^k for a dense k-wire unitary).
        """
        if self.kind in ("ORACLE_PERM", "ORACLE_DIAG"):
            return 0
        nt, nc = len(self.targets), len(self.controls)
        if self.kind == "UNITARY":
            return 4 ** (nt + nc)
        if self.kind == "GPHASE" and nc == 0:
            return 0
        total = nt + nc
        if total <= 2:
            return 1
        return 8 * (total - 2) + 1


_SELF_INVERSE = ("H", "X", "SWAP")


def _invert_gate(g: GateInstance) -> GateInstance:
    if g.kind in _SELF_INVERSE:
        return g
    if g.kind == "S":
        return replace(g, kind="RZ", param=-np.pi / 2)
    if g.kind in ("RY", "RZ", "GPHASE"):
        return replace(g, param=-g.param)
    if g.kind == "ORACLE_PERM":
        inv = np.empty_like(g.table)
        inv[g.table] = np.arange(len(g.table), dtype=g.table.dtype)
        return replace(g, table=inv)
    if g.kind == "ORACLE_DIAG":
        return replace(g, table=np.conj(g.table))
    if g.kind == "UNITARY":
        return replace(g, table=g.table.conj().T.copy())
    raise ValueError(f"unknown gate kind {g.kind!r}")


@dataclass
class Circuit:
    """Ordered gate list over ``wire_count`` wires with a global-phase tag."""

    wire_count: int
    gates: list = field(default_factory=list)
    global_phase: complex = 1.0 + 0.0j

    # -- builders ---------------------------------------------------------

    def append(self, gate: GateInstance):
        seen = set()
        for w in gate.wires:
            if not (0 <= w < self.wire_count):
                raise DimensionError(
                    f"wire {w} out of range for {self.wire_count}-wire circuit"
                )
            if w in seen:
                raise DimensionError(f"duplicate wire {w} in gate {gate.kind}")
            seen.add(w)
        if gate.kind in ("RY", "RZ", "GPHASE") and not np.isfinite(gate.param):
            raise ContractViolationError("gate angle must be finite")
        self.gates.append(gate)
        return self

    def h(self, w):
        return self.append(GateInstance("H", (w,)))

    def x(self, w, controls=()):
        return self.append(GateInstance("X", (w,), tuple(controls)))

    def s(self, w):
        return self.append(GateInstance("S", (w,)))

    def ry(self, w, theta, controls=()):
        return self.append(GateInstance("RY", (w,), tuple(controls), float(theta)))

    def rz(self, w, theta, controls=()):
        return self.append(GateInstance("RZ", (w,), tuple(controls), float(theta)))

    def cnot(self, control, target):
        return self.x(target, [(control, 1)])

    def crz(self, control, target, theta):
        return self.rz(target, theta, [(control, 1)])

    def cry(self, control, target, theta):
        return self.ry(target, theta, [(control, 1)])

    def swap(self, a, b):
        return self.append(GateInstance("SWAP", (a, b)))

    def gphase(self, w, theta, controls=()):
        return self.append(GateInstance("GPHASE", (w,), tuple(controls), float(theta)))

    def oracle_perm(self, wires, perm, label=""):
        perm = np.asarray(perm, dtype=np.int64)
        if len(perm) != 1 << len(wires) or sorted(perm) != list(range(len(perm))):
            raise ContractViolationError("oracle table is not a permutation")
        return self.append(
            GateInstance("ORACLE_PERM", tuple(wires), table=perm, label=label)
        )

    def oracle_diag(self, wires, diag, label=""):
        diag = np.asarray(diag, dtype=complex)
        if len(diag) != 1 << len(wires) or not np.allclose(np.abs(diag), 1.0, atol=1e-12):
            raise ContractViolationError("oracle diagonal must be unit modulus")
        return self.append(
            GateInstance("ORACLE_DIAG", tuple(wires), table=diag, label=label)
        )

    def unitary(self, wires, mat, label="", controls=()):
        mat = np.ascontiguousarray(mat, dtype=complex)
        dim = 1 << len(wires)
        if mat.shape != (dim, dim):
            raise DimensionError("matrix shape does not match wire count")
        if np.max(np.abs(mat.conj().T @ mat - np.eye(dim))) > 1e-12:
            raise ContractViolationError("UNITARY gate matrix is not unitary")
        return self.append(
            GateInstance("UNITARY", tuple(wires), tuple(controls), table=mat, label=label)
        )

    def extend(self, other: "Circuit", wire_map=None):
        """Append another circuit's gates, optionally remapping its wires."""
        for g in other.gates:
            self.append(_remap(g, wire_map))
        self.global_phase *= other.global_phase
        return self

    def extend_controlled(self, other: "Circuit", controls, wire_map=None):
        """Append another circuit with extra controls on every gate.

        A nonunit global phase of ``other`` becomes a GPHASE on the first
        control wire (conditioned on the remaining controls), so the
        controlled sub-circuit is exactly |c><c| (x) U + rest (x) I.
        """
        controls = tuple(controls)
        for g in other.gates:
            g = _remap(g, wire_map)
            self.append(replace(g, controls=g.controls + controls))
        ph = complex(other.global_phase)
        if abs(ph - 1.0) > 1e-15:
            w0, pol0 = controls[0]
            ang = float(np.angle(ph))
            if pol0 == 0:
                # GPHASE tables are symmetric in the wire value, so realize an
                # open-controlled phase by angle bookkeeping on the RZ form:
                # e^{i*ang} on wire==0 is e^{i*ang} * RZ(-ang).
                self.append(GateInstance("GPHASE", (w0,), controls[1:], ang))
                self.append(GateInstance("RZ", (w0,), controls[1:], -ang))
            else:
                self.append(GateInstance("RZ", (w0,), controls[1:], ang))
        return self

    # -- structure --------------------------------------------------------

    def inverse(self) -> "Circuit":
        inv = Circuit(self.wire_count)
        inv.gates = [_invert_gate(g) for g in reversed(self.gates)]
        inv.global_phase = np.conj(self.global_phase)
        return inv

    @property
    def elementary_gate_count(self):
        return sum(g.cost() for g in self.gates)

    @property
    def oracle_call_count(self):
        return sum(1 for g in self.gates if g.kind.startswith("ORACLE"))


def _remap(g: GateInstance, wire_map) -> GateInstance:
    if wire_map is None:
        return g
    return replace(
        g,
        targets=tuple(wire_map[w] for w in g.targets),
        controls=tuple((wire_map[w], pol) for w, pol in g.controls),
    )


# -- simulation -------------------------------------------------------------


def _apply_gate(psi, n, g: GateInstance):
    from . import kernels

    one, zero = g.control_masks()
    k = g.kind
    if k == "H":
        return kernels.apply_1q(psi, n, g.targets[0], _H, one, zero)
    if k == "X":
        return kernels.apply_1q(psi, n, g.targets[0], _X, one, zero)
    if k == "RY":
        c, s = np.cos(g.param / 2), np.sin(g.param / 2)
        mat = np.array([[c, -s], [s, c]], dtype=complex)
        return kernels.apply_1q(psi, n, g.targets[0], mat, one, zero)
    if k == "S":
        table = np.array([1.0, 1.0j], dtype=complex)
    elif k == "RZ":
        table = np.array([1.0, np.exp(1j * g.param)], dtype=complex)
    elif k == "GPHASE":
        ph = np.exp(1j * g.param)
        table = np.array([ph, ph], dtype=complex)
    elif k == "SWAP":
        perm = np.array([0, 2, 1, 3], dtype=np.int64)
        wires = np.asarray(g.targets, dtype=np.int64)
        return kernels.apply_perm(psi, n, wires, perm, one, zero)
    elif k == "ORACLE_PERM":
        wires = np.asarray(g.targets, dtype=np.int64)
        return kernels.apply_perm(psi, n, wires, g.table, one, zero)
    elif k == "ORACLE_DIAG":
        wires = np.asarray(g.targets, dtype=np.int64)
        return kernels.apply_diag(psi, n, wires, g.table, one, zero)
    elif k == "UNITARY":
        wires = np.asarray(g.targets, dtype=np.int64)
        return kernels.apply_dense(psi, n, wires, g.table, one, zero)
    else:
        raise ValueError(f"unknown gate kind {k!r}")
    wires = np.asarray(g.targets, dtype=np.int64)
    return kernels.apply_diag(psi, n, wires, table, one, zero)


def apply_circuit(c: Circuit, state) -> np.ndarray:
    """Apply the circuit to a statevector (without building the unitary)."""
    n = c.wire_count
    if n > STATE_WIRE_CAP:
        raise ResourceLimitError(
            f"{n} wires exceeds the statevector cap of {STATE_WIRE_CAP}"
        )
    psi = np.array(state, dtype=complex)
    if psi.shape != (1 << n,):
        raise DimensionError(
            f"state has {psi.shape} amplitudes; expected ({1 << n},)"
        )
    for g in c.gates:
        psi = _apply_gate(psi, n, g)
    if c.global_phase != 1.0:
        psi = psi * c.global_phase
    return psi


def circuit_unitary(c: Circuit, max_wires=None) -> np.ndarray:
    """Full 2^n unitary of the circuit, including global_phase."""
    cap = DENSE_WIRE_CAP if max_wires is None else max_wires
    n = c.wire_count
    if n > cap:
        raise ResourceLimitError(f"{n} wires exceeds the dense-unitary cap of {cap}")
    dim = 1 << n
    u = np.zeros((dim, dim), dtype=complex)
    col = np.zeros(dim, dtype=complex)
    for j in range(dim):
        col[:] = 0
        col[j] = 1
        u[:, j] = apply_circuit(c, col)
    return u


# -- dense-operator helpers --------------------------------------------------


def tensor(a, b):
    """Kronecker product; the second factor occupies the low wires."""
    return np.kron(np.asarray(a), np.asarray(b))


def dagger(a):
    return np.asarray(a).conj().T


def compose(a, b):
    a, b = np.asarray(a), np.asarray(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError("operator dimensions do not compose")
    return a @ b


# -- block encodings ----------------------------------------------------------


@dataclass(frozen=True)
class BlockEncoding:
    """A circuit promising ``gamma * block ~ target`` within ``epsilon``.

    ``phase`` records the global phase the physical unitary carries relative
    to its canonical form (e.g. the factor i of the sin(theta D) primitive);
    the encoded block is read off after dividing it out.  The extraction
    projector fixes every wire outside ``output_system_wires`` (that is, all
    of ``ancilla_wires``) to |0>.
    """

    circuit: Circuit
    gamma: float
    ancilla_wires: tuple
    epsilon: float
    hermitian: bool = False
    input_system_wires: tuple = ()
    output_system_wires: tuple = ()
    phase: complex = 1.0 + 0.0j

    def __post_init__(self):
        n = self.circuit.wire_count
        anc, inp, out = (
            set(self.ancilla_wires),
            set(self.input_system_wires),
            set(self.output_system_wires),
        )
        if not (anc | inp | out) <= set(range(n)):
            raise DimensionError("wire maps exceed circuit wires")
        if len(inp) != len(out):
            raise DimensionError("input/output system sizes differ")
        if anc | out != set(range(n)) or anc & out:
            raise DimensionError("ancillas must be the complement of the output system")

    @property
    def system_size(self):
        return len(self.input_system_wires)


def identity_encoding(s: int) -> BlockEncoding:
    """Trivial exact encoding of the identity on s wires."""
    wires = tuple(range(s))
    return BlockEncoding(
        circuit=Circuit(s),
        gamma=1.0,
        ancilla_wires=(),
        epsilon=0.0,
        hermitian=True,
        input_system_wires=wires,
        output_system_wires=wires,
    )


def extract_block(be: BlockEncoding, phase_corrected=False) -> np.ndarray:
    """(<0^m| (x) I) U (|0^m> (x) I), re-indexed input -> output wires.

    Never materializes the full unitary: runs one statevector per system
    basis state.
    """
    c = be.circuit
    n = c.wire_count
    s = be.system_size
    out_idx = scatter_bits(np.arange(1 << s), be.output_system_wires)
    block = np.empty((1 << s, 1 << s), dtype=complex)
    psi0 = np.zeros(1 << n, dtype=complex)
    for j in range(1 << s):
        psi0[:] = 0
        psi0[scatter_bits(j, be.input_system_wires)] = 1.0
        block[:, j] = apply_circuit(c, psi0)[out_idx]
    if phase_corrected and be.phase != 1.0:
        block = block / be.phase
    return block


def success_probability(be: BlockEncoding, input_state) -> float:
    """Probability of the all-zero ancilla outcome on the given system input."""
    c = be.circuit
    n = c.wire_count
    s = be.system_size
    vec = np.asarray(input_state, dtype=complex)
    if vec.shape != (1 << s,):
        raise DimensionError("input state does not match the system size")
    if abs(np.linalg.norm(vec) - 1.0) > 1e-10:
        raise ContractViolationError("input state must be normalized")
    psi0 = np.zeros(1 << n, dtype=complex)
    psi0[scatter_bits(np.arange(1 << s), be.input_system_wires)] = vec
    psi = apply_circuit(c, psi0)
    out_idx = scatter_bits(np.arange(1 << s), be.output_system_wires)
    return float(np.sum(np.abs(psi[out_idx]) ** 2))


def canonicalize_encoding(be: BlockEncoding) -> BlockEncoding:
    """Make input and output system wires coincide by appending SWAPs."""
    if be.input_system_wires == be.output_system_wires:
        return be
    inp, out = set(be.input_system_wires), set(be.output_system_wires)
    if inp & out:
        raise DimensionError("cannot canonicalize partially overlapping registers")
    c = Circuit(be.circuit.wire_count)
    c.extend(be.circuit)
    for a, b in zip(be.input_system_wires, be.output_system_wires):
        c.swap(a, b)
    wires = be.input_system_wires
    anc = tuple(w for w in range(c.wire_count) if w not in wires)
    return BlockEncoding(
        circuit=c,
        gamma=be.gamma,
        ancilla_wires=anc,
        epsilon=be.epsilon,
        hermitian=be.hermitian,
        input_system_wires=wires,
        output_system_wires=wires,
        phase=be.phase,
    )
