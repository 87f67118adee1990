"""Tests for the circuit representation and statevector simulator."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdoenc import simcore
from pdoenc.simcore import (
    BlockEncoding,
    Circuit,
    ContractViolationError,
    DimensionError,
    ResourceLimitError,
    apply_circuit,
    canonicalize_encoding,
    circuit_unitary,
    compose,
    dagger,
    extract_block,
    gather_bits,
    identity_encoding,
    scatter_bits,
    success_probability,
    tensor,
)
from util import haar_unitary, random_circuit


def single_gate_unitary(kind, *args, **kwargs):
    c = Circuit(1)
    getattr(c, kind)(0, *args, **kwargs)
    return circuit_unitary(c)


class TestGateConventions:
    def test_hadamard(self):
        h = single_gate_unitary("h")
        assert np.allclose(h, np.array([[1, 1], [1, -1]]) / np.sqrt(2))

    def test_s_gate(self):
        assert np.allclose(single_gate_unitary("s"), np.diag([1, 1j]))

    def test_rz_is_relative_phase(self):
        # RZ(theta) = diag(1, e^{i theta}); RZ(pi/2) matches S exactly.
        theta = 0.7321
        assert np.allclose(
            single_gate_unitary("rz", theta), np.diag([1, np.exp(1j * theta)])
        )
        assert np.allclose(
            single_gate_unitary("rz", np.pi / 2), single_gate_unitary("s")
        )

    def test_ry_real_rotation(self):
        theta = 1.234
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        assert np.allclose(
            single_gate_unitary("ry", theta), np.array([[c, -s], [s, c]])
        )

    def test_gphase(self):
        theta = 0.4
        assert np.allclose(
            single_gate_unitary("gphase", theta), np.exp(1j * theta) * np.eye(2)
        )

    def test_cnot_little_endian(self):
        # Wire 0 is the LSB: CNOT(control=0, target=1) maps index 1 -> 3.
        c = Circuit(2)
        c.cnot(0, 1)
        u = circuit_unitary(c)
        expect = np.zeros((4, 4))
        for src, dst in [(0, 0), (1, 3), (2, 2), (3, 1)]:
            expect[dst, src] = 1
        assert np.allclose(u, expect)

    def test_swap(self):
        c = Circuit(2)
        c.swap(0, 1)
        u = circuit_unitary(c)
        assert np.allclose(u, np.eye(4)[[0, 2, 1, 3]])

    def test_open_control(self):
        # X on wire 1 fires only when wire 0 is |0>.
        c = Circuit(2)
        c.x(1, [(0, 0)])
        u = circuit_unitary(c)
        expect = np.zeros((4, 4))
        for src, dst in [(0, 2), (2, 0), (1, 1), (3, 3)]:
            expect[dst, src] = 1
        assert np.allclose(u, expect)

    def test_tensor_low_wire_convention(self):
        # tensor(A, B) puts B on the low wires: a 2-wire circuit with X on
        # wire 1 equals kron(X, I).
        c = Circuit(2)
        c.x(1)
        x = np.array([[0, 1], [1, 0]])
        assert np.allclose(circuit_unitary(c), tensor(x, np.eye(2)))

    def test_oracle_perm_and_diag(self):
        rng = np.random.default_rng(7)
        perm = rng.permutation(8)
        c = Circuit(3)
        c.oracle_perm((0, 1, 2), perm)
        u = circuit_unitary(c)
        assert np.allclose(u, np.eye(8)[:, :].T[perm].T)  # column j -> e_perm[j]
        for j in range(8):
            assert u[perm[j], j] == 1.0
        diag = np.exp(2j * np.pi * rng.random(8))
        c2 = Circuit(3)
        c2.oracle_diag((0, 1, 2), diag)
        assert np.allclose(circuit_unitary(c2), np.diag(diag))

    def test_unitary_gate(self):
        rng = np.random.default_rng(3)
        m = haar_unitary(4, rng)
        c = Circuit(3)
        c.unitary((0, 2), m)
        u = circuit_unitary(c)
        # Wire 1 untouched: check both wire-1 sectors equal m (with bit
        # interleaving: index bits (w2 w1 w0), sub-index bits (w2 w0)).
        idx0 = [0, 1, 4, 5]
        idx1 = [2, 3, 6, 7]
        assert np.allclose(u[np.ix_(idx0, idx0)], m)
        assert np.allclose(u[np.ix_(idx1, idx1)], m)
        assert np.allclose(u[np.ix_(idx0, idx1)], 0)


class TestValidation:
    def test_wire_out_of_range(self):
        with pytest.raises(DimensionError):
            Circuit(2).h(2)

    def test_duplicate_wire(self):
        with pytest.raises(DimensionError):
            Circuit(2).x(0, [(0, 1)])

    def test_bad_perm(self):
        with pytest.raises(ContractViolationError):
            Circuit(2).oracle_perm((0, 1), [0, 0, 1, 2])

    def test_bad_diag(self):
        with pytest.raises(ContractViolationError):
            Circuit(1).oracle_diag((0,), [1.0, 0.5])

    def test_nonunitary_matrix(self):
        with pytest.raises(ContractViolationError):
            Circuit(1).unitary((0,), np.array([[1, 1], [0, 1]]))

    def test_state_cap(self):
        c = Circuit(simcore.STATE_WIRE_CAP + 1)
        with pytest.raises(ResourceLimitError):
            apply_circuit(c, np.zeros(1 << c.wire_count))

    def test_dense_cap(self):
        c = Circuit(simcore.DENSE_WIRE_CAP + 1)
        with pytest.raises(ResourceLimitError):
            circuit_unitary(c)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            apply_circuit(Circuit(2), np.zeros(3))
        with pytest.raises(DimensionError):
            compose(np.eye(2), np.eye(4))


class TestBitHelpers:
    def test_gather_scatter_roundtrip(self):
        rng = np.random.default_rng(0)
        wires = (4, 0, 2)
        sub = rng.integers(0, 8, size=50)
        assert np.array_equal(gather_bits(scatter_bits(sub, wires), wires), sub)

    def test_scatter_example(self):
        # sub-index bit j lands on wires[j].
        assert scatter_bits(0b101, (1, 3, 5)) == (1 << 1) + (1 << 5)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(2, 4))
def test_apply_matches_unitary(seed, n):
    """apply_circuit agrees with multiplying by the dense unitary."""
    rng = np.random.default_rng(seed)
    c = random_circuit(n, 12, rng, allow_oracles=True)
    u = circuit_unitary(c)
    psi = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    psi /= np.linalg.norm(psi)
    assert np.allclose(apply_circuit(c, psi), u @ psi, atol=1e-12)
    assert np.max(np.abs(u.conj().T @ u - np.eye(1 << n))) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(1, 4))
def test_inverse_is_dagger(seed, n):
    rng = np.random.default_rng(seed)
    c = random_circuit(n, 10, rng, allow_oracles=True)
    c.global_phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
    u = circuit_unitary(c)
    v = circuit_unitary(c.inverse())
    assert np.max(np.abs(v - dagger(u))) < 1e-12


class TestCircuitStructure:
    def test_extend_with_wire_map(self):
        inner = Circuit(2)
        inner.cnot(0, 1)
        inner.global_phase = 1j
        outer = Circuit(3)
        outer.extend(inner, {0: 2, 1: 0})
        u = circuit_unitary(outer)
        direct = Circuit(3)
        direct.cnot(2, 0)
        assert np.allclose(u, 1j * circuit_unitary(direct))

    @pytest.mark.parametrize("pol", [1, 0])
    def test_extend_controlled_exact(self, pol):
        """Controlled sub-circuit equals |c><c| (x) U + complement (x) I,
        including the sub-circuit's global phase."""
        rng = np.random.default_rng(11 + pol)
        inner = random_circuit(2, 8, rng)
        inner.global_phase = np.exp(1j * 0.913)
        u_in = circuit_unitary(inner)
        outer = Circuit(3)
        outer.extend_controlled(inner, [(2, pol)])
        u = circuit_unitary(outer)
        proj = np.diag([1.0 - pol, float(pol)])
        expect = tensor(proj, u_in) + tensor(np.eye(2) - proj, np.eye(4))
        assert np.max(np.abs(u - expect)) < 1e-12

    def test_gate_counts(self):
        c = Circuit(4)
        c.h(0)
        c.cnot(0, 1)
        c.rz(2, 0.3, [(0, 1), (1, 0)])  # 3 wires -> 8*(3-2)+1 = 9
        c.oracle_perm((0, 1), [1, 0, 3, 2])
        c.unitary((0, 1), np.eye(4))
        assert c.elementary_gate_count == 1 + 1 + 9 + 0 + 16
        assert c.oracle_call_count == 1


class TestBlockEncoding:
    def test_identity_encoding(self):
        be = identity_encoding(2)
        assert np.allclose(extract_block(be), np.eye(4))
        assert success_probability(be, np.array([1, 0, 0, 0.0])) == pytest.approx(1.0)

    def test_extract_block_matches_corner(self):
        # One ancilla on the top wire: block = upper-left corner of U.
        rng = np.random.default_rng(5)
        m = haar_unitary(8, rng)
        c = Circuit(3)
        c.unitary((0, 1, 2), m)
        be = BlockEncoding(
            circuit=c,
            gamma=1.0,
            ancilla_wires=(2,),
            epsilon=0.0,
            input_system_wires=(0, 1),
            output_system_wires=(0, 1),
        )
        assert np.allclose(extract_block(be), m[:4, :4])

    def test_phase_corrected_extraction(self):
        c = Circuit(1)
        c.global_phase = 1j
        be = BlockEncoding(
            circuit=c,
            gamma=1.0,
            ancilla_wires=(),
            epsilon=0.0,
            input_system_wires=(0,),
            output_system_wires=(0,),
            phase=1j,
        )
        assert np.allclose(extract_block(be), 1j * np.eye(2))
        assert np.allclose(extract_block(be, phase_corrected=True), np.eye(2))

    def test_success_probability_value(self):
        # RY(theta) on the ancilla: success prob = cos^2(theta/2).
        theta = 0.8
        c = Circuit(2)
        c.ry(1, theta)
        be = BlockEncoding(
            circuit=c,
            gamma=1.0,
            ancilla_wires=(1,),
            epsilon=0.0,
            input_system_wires=(0,),
            output_system_wires=(0,),
        )
        got = success_probability(be, np.array([0, 1.0]))
        assert got == pytest.approx(np.cos(theta / 2) ** 2, abs=1e-12)

    def test_success_probability_requires_normalized(self):
        be = identity_encoding(1)
        with pytest.raises(ContractViolationError):
            success_probability(be, np.array([1.0, 1.0]))

    def test_canonicalize_swaps_registers(self):
        # Circuit moving wire 0 -> wire 1 via SWAP, input on 0, output on 1.
        c = Circuit(2)
        c.swap(0, 1)
        c.rz(1, 0.3)
        be = BlockEncoding(
            circuit=c,
            gamma=1.0,
            ancilla_wires=(0,),
            epsilon=0.0,
            input_system_wires=(0,),
            output_system_wires=(1,),
        )
        blk = extract_block(be)
        canon = canonicalize_encoding(be)
        assert canon.input_system_wires == canon.output_system_wires
        assert np.allclose(extract_block(canon), blk)

    def test_ancilla_complement_enforced(self):
        with pytest.raises(DimensionError):
            BlockEncoding(
                circuit=Circuit(2),
                gamma=1.0,
                ancilla_wires=(),
                epsilon=0.0,
                input_system_wires=(0,),
                output_system_wires=(0,),
            )
