"""Block encodings of diagonal operators.

Two constructions:

* ``sin_diag_encoding`` — the 2p+5-gate primitive encoding sin(theta D_sigma),
  where D_sigma = diag(v_sigma) with v_+ = (0, ..., P-1) and
  v_- = (0, ..., P/2-1, -P/2, ..., -1).
* ``arith_diag_encoding`` — arithmetic-oracle encoding of an arbitrary
  bounded diagonal D_g: a reversible oracle writes the sign bit and a t-bit
  fixed-point angle theta(x) = arcsin(|g(x)|/C)/pi, a controlled-Ry cascade
  rotates a flag qubit by 2*pi*theta(x), and the oracle is uncomputed.

The reversible arithmetic is realized at desk scale as a single tabulated
permutation oracle; oracle calls are counted separately from elementary
gates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .simcore import (
    BlockEncoding,
    Circuit,
    ContractViolationError,
    GridSpec,
)


@dataclass(frozen=True)
class SignedAngleBits:
    """Sign bit plus t-bit fixed-point fraction (.b_{t-1} ... b_0)."""

    sign: int
    bits: tuple  # bits[j] has weight 2^{j-t}
    t: int

    @property
    def fraction(self):
        return sum(b << j for j, b in enumerate(self.bits)) / (1 << self.t)


@dataclass(frozen=True)
class DiagonalSpec:
    """Parameters of the sin(theta D_sigma) primitive."""

    sigma: str  # '-' or '+'
    theta: float
    p: int

    def __post_init__(self):
        if self.sigma not in ("-", "+"):
            raise ContractViolationError("sigma must be '-' or '+'")
        if self.p < 1:
            raise ContractViolationError("p must be >= 1")
        if not 0.0 < self.theta < np.pi / (2 << self.p):
            raise ContractViolationError("theta must lie in (0, pi/(2P))")

    @property
    def P(self):
        return 1 << self.p

    def eigenvalues(self):
        """The diagonal v_sigma as integers."""
        v = np.arange(self.P, dtype=np.int64)
        if self.sigma == "-":
            v = np.where(v >= self.P // 2, v - self.P, v)
        return v


def default_theta(P: int) -> float:
    """pi/(3P): the reference choice, strictly inside (0, pi/(2P))."""
    return np.pi / (3 * P)


def rot_diag(spec: DiagonalSpec) -> Circuit:
    """R_sigma = exp(i theta D_sigma) as p single-wire Rz gates, exact.

    v_+ = sum_j 2^j x_j gives Rz(2^j theta) on wire j; v_- differs only in
    the top bit, whose weight 2^{p-1} - 2^p = -2^{p-1} flips that angle.
    """
    c = Circuit(spec.p)
    for j in range(spec.p):
        ang = (1 << j) * spec.theta
        if spec.sigma == "-" and j == spec.p - 1:
            ang = -ang
        c.rz(j, ang)
    return c


def sin_diag_encoding(spec: DiagonalSpec) -> BlockEncoding:
    """(1, 1)-Hermitian-block-encoding of sin(theta D_sigma), 2p+5 gates.

    Gate product (ancilla on the top wire) equals
    i * [[sin(theta D), cos(theta D)], [cos(theta D), -sin(theta D)]];
    the scalar i is recorded in the encoding's ``phase``.
    """
    p = spec.p
    anc = p
    c = Circuit(p + 1)
    c.s(anc)
    c.h(anc)
    for g in rot_diag(spec).gates:  # R_sigma, applied when ancilla is |0>
        c.rz(g.targets[0], g.param, [(anc, 0)])
    for g in rot_diag(spec).gates:  # R_sigma^dag, applied when ancilla is |1>
        c.rz(g.targets[0], -g.param, [(anc, 1)])
    c.h(anc)
    c.x(anc)
    c.s(anc)
    sys_wires = tuple(range(p))
    return BlockEncoding(
        circuit=c,
        gamma=1.0,
        ancilla_wires=(anc,),
        epsilon=0.0,
        hermitian=True,
        input_system_wires=sys_wires,
        output_system_wires=sys_wires,
        phase=1j,
    )


def theta_bits(g, x, C, t: int) -> SignedAngleBits:
    """Sign and nearest t-bit fixed-point value of arcsin(|g(x)|/C)/pi.

    Rounding is to nearest with ties toward zero, so the fraction error is
    at most 2^{-t-1} and g(x) = +-C maps to exactly (.10...0) = 1/2.
    """
    if t < 1:
        raise ContractViolationError("t must be >= 1")
    val = g(x)
    if not np.isfinite(val):
        raise ContractViolationError(f"g is not finite at {x!r}")
    val = float(val)
    if abs(val) > C * (1 + 1e-12):
        raise ContractViolationError("|g| exceeds the stated bound C")
    frac = math.asin(min(abs(val) / C, 1.0)) / math.pi
    k = max(0, math.ceil(frac * (1 << t) - 0.5))
    bits = tuple((k >> j) & 1 for j in range(t))
    return SignedAngleBits(sign=int(val < 0), bits=bits, t=t)


def _angle_oracle_perm(g, grid: GridSpec, C, t):
    """Permutation table XOR-ing (theta bits, sign) into the ancilla register.

    Wires: system (grid.wires), then t fraction wires, then the sign wire.
    The XOR form is an involution, so the same oracle uncomputes.
    """
    sys_n = grid.wires
    n = sys_n + t + 1
    perm = np.arange(1 << n, dtype=np.int64)
    for xflat in range(grid.N):
        x = grid.coords(xflat)
        arg = int(x[0]) if grid.d == 1 else x
        ang = theta_bits(g, arg, C, t)
        pattern = sum(b << j for j, b in enumerate(ang.bits)) | (ang.sign << t)
        if pattern == 0:
            continue
        anc = np.arange(1 << (t + 1), dtype=np.int64)
        perm[xflat | (anc << sys_n)] = xflat | ((anc ^ pattern) << sys_n)
    return perm


def arith_diag_encoding(g, grid: GridSpec, C, epsilon) -> BlockEncoding:
    """(C, t+2, epsilon)-block-encoding of D_g via the arithmetic oracle.

    t = ceil(log2(C*pi/epsilon)).  Circuit: oracle computing the signed
    angle, Z on the sign wire (realizing the (-1)^sign factor), the
    Ry(pi/2^k) cascade on a flag controlled by bit theta_{t-1-k} (total flag
    rotation 2*pi*frac), X on the flag, then oracle uncomputation.  The
    flag's |0> amplitude is then sin(pi*frac) ~ |g|/C.
    """
    C = float(C)
    if C <= 0 or epsilon <= 0:
        raise ContractViolationError("C and epsilon must be positive")
    vals = np.array(
        [g(int(grid.coords(i)[0]) if grid.d == 1 else grid.coords(i)) for i in range(grid.N)],
        dtype=float,
    )
    if np.max(np.abs(vals)) > C * (1 + 1e-12):
        raise ContractViolationError("C does not dominate sup|g| on the grid")
    t = max(1, math.ceil(math.log2(C * math.pi / epsilon)))
    sys_n = grid.wires
    theta_wires = list(range(sys_n, sys_n + t))
    sign_wire = sys_n + t
    flag = sys_n + t + 1
    n = flag + 1

    perm = _angle_oracle_perm(g, grid, C, t)
    oracle_wires = tuple(range(sys_n + t + 1))

    c = Circuit(n)
    c.oracle_perm(oracle_wires, perm, label="angle")
    c.rz(sign_wire, np.pi)  # Z up to global phase: (-1)^sign on the sign wire
    for k in range(t):
        c.ry(flag, np.pi / (1 << k), [(theta_wires[t - 1 - k], 1)])
    c.x(flag)
    c.oracle_perm(oracle_wires, perm, label="angle")
    sys_wires = tuple(range(sys_n))
    return BlockEncoding(
        circuit=c,
        gamma=C,
        ancilla_wires=tuple(range(sys_n, n)),
        epsilon=float(epsilon),
        hermitian=True,
        input_system_wires=sys_wires,
        output_system_wires=sys_wires,
    )


def complex_diag_encoding(g, grid: GridSpec, C_re, C_im, epsilon) -> BlockEncoding:
    """Encoding of a complex diagonal as C_re*D_re/C_re + i*C_im*D_im/C_im.

    A two-term LCU over arith encodings of Re g and Im g with coefficients
    (C_re, i*C_im); scale C_re + C_im, error <= epsilon.  A vanishing real
    or imaginary part drops out (plain arith encoding of the other part).
    """
    from .combinators import lcu, prepare_pair

    def re_g(x):
        return complex(g(x)).real

    def im_g(x):
        return complex(g(x)).imag

    vals = np.array(
        [complex(g(int(grid.coords(i)[0]) if grid.d == 1 else grid.coords(i))) for i in range(grid.N)]
    )
    has_re = np.max(np.abs(vals.real)) > 0
    has_im = np.max(np.abs(vals.imag)) > 0
    if not has_im:
        return arith_diag_encoding(re_g, grid, C_re, epsilon)
    if not has_re:
        be = arith_diag_encoding(im_g, grid, C_im, epsilon)
        # i * D_im: fold the factor i into the recorded phase.
        c = Circuit(be.circuit.wire_count)
        c.extend(be.circuit)
        c.global_phase *= 1j
        return BlockEncoding(
            circuit=c,
            gamma=be.gamma,
            ancilla_wires=be.ancilla_wires,
            epsilon=be.epsilon,
            input_system_wires=be.input_system_wires,
            output_system_wires=be.output_system_wires,
            phase=1j,
        )
    be_re = arith_diag_encoding(re_g, grid, C_re, epsilon / 2)
    be_im = arith_diag_encoding(im_g, grid, C_im, epsilon / 2)
    pair = prepare_pair(np.array([C_re, 1j * C_im]), C_re + C_im)
    return lcu(pair, [be_re, be_im])
