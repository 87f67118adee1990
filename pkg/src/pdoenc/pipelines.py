"""End-to-end block-encoding pipelines for discretized PDOs.

Three assembly schemes — generic (sampled symbol table on the doubled
space-frequency register), separable (one diagonal encoding per side of the
DFT), and fully separable (per-dimension factors lifted through QET) — plus
their linear-combination extension and the two multiplier applications
(variable-coefficient elliptic operator, inverse radial multiplier).
``verify_encoding`` measures every claim against a dense reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .approx import ExpSumApprox, inv_elliptic_terms
from .combinators import (
    conjugate_by_qft,
    lcu,
    prepare_pair,
    product,
    tensor_encodings,
)
from .diagenc import (
    DiagonalSpec,
    arith_diag_encoding,
    complex_diag_encoding,
    default_theta,
)
from .gatelib import phase_mult_multidim, qft_circuit
from .pdoref import (
    FullySeparableSymbol,
    GenericSymbol,
    LinearCombinationSymbol,
    SeparableSymbol,
    SymbolFactor,
    WrappedSymbol,
    dense_pdo_matrix,
    elliptic_symbol,
    wrap_symbol,
)
from .qspqet import diag_function_encoding
from .simcore import (
    STATE_WIRE_CAP,
    BlockEncoding,
    Circuit,
    ContractViolationError,
    GridSpec,
    ResourceLimitError,
    extract_block,
    identity_encoding,
    success_probability,
)

__all__ = [
    "EncodingReport",
    "generic_pdo_encoding",
    "separable_pdo_encoding",
    "fully_separable_pdo_encoding",
    "lcu_pdo_encoding",
    "elliptic_encoding",
    "inverse_multiplier_terms",
    "radial_multiplier_inverse_encoding",
    "verify_encoding",
]


# -- reporting -----------------------------------------------------------------


@dataclass(frozen=True)
class EncodingReport:
    """Measured properties of a block encoding against a dense reference."""

    gamma: float
    ancillas: int
    epsilon_claimed: float
    defect_spectral: float
    defect_max: float
    gates_elementary: int
    oracle_calls: int
    success_probability: float

    @property
    def passed(self):
        return self.defect_spectral <= self.epsilon_claimed * (1 + 1e-9) + 1e-12

    def to_dict(self):
        return {
            "gamma": self.gamma,
            "ancillas": self.ancillas,
            "epsilon_claimed": self.epsilon_claimed,
            "defect_spectral": self.defect_spectral,
            "defect_max": self.defect_max,
            "gates_elementary": self.gates_elementary,
            "oracle_calls": self.oracle_calls,
            "success_probability": self.success_probability,
        }


def verify_encoding(be: BlockEncoding, reference: np.ndarray) -> EncodingReport:
    """Measure ||gamma * block - reference|| and record resource counts."""
    reference = np.asarray(reference, dtype=complex)
    block = extract_block(be, phase_corrected=True)
    if block.shape != reference.shape:
        raise ContractViolationError("reference shape does not match the system")
    defect = be.gamma * block - reference
    uniform = np.ones(1 << be.system_size) / math.sqrt(1 << be.system_size)
    return EncodingReport(
        gamma=float(be.gamma),
        ancillas=len(be.ancilla_wires),
        epsilon_claimed=float(be.epsilon),
        defect_spectral=float(np.linalg.norm(defect, ord=2)),
        defect_max=float(np.max(np.abs(defect))),
        gates_elementary=be.circuit.elementary_gate_count,
        oracle_calls=be.circuit.oracle_call_count,
        success_probability=success_probability(be, uniform),
    )


# -- shared helpers ------------------------------------------------------------


def _diag_encoding_of(values_fn, grid: GridSpec, constant, epsilon) -> BlockEncoding:
    """Diagonal encoding of a sampled profile, real fast path or complex LCU.

    ``values_fn`` maps a flat grid index to the (possibly complex) diagonal
    entry.  Real profiles use the arithmetic encoder directly so the scale is
    exactly ``constant``; complex profiles split into real/imaginary branches
    with sampled dominating constants.
    """
    vals = np.asarray([values_fn(n) for n in range(grid.N)], dtype=complex)
    if np.max(np.abs(vals)) > constant * (1 + 1e-12):
        raise ContractViolationError("constant does not dominate the sampled profile")

    def lookup(x):
        n = x if grid.d == 1 else int(np.sum(np.asarray(x) << (grid.p * np.arange(grid.d))))
        return vals[n]

    if np.max(np.abs(vals.imag)) <= 1e-14 * max(constant, 1.0):
        return arith_diag_encoding(lambda x: float(lookup(x).real), grid, constant, epsilon)
    c_re = max(float(np.max(np.abs(vals.real))), 1e-12)
    c_im = max(float(np.max(np.abs(vals.imag))), 1e-12)
    return complex_diag_encoding(lambda x: complex(lookup(x)), grid, c_re, c_im, epsilon)


def _check_wire_budget(wires):
    if wires > STATE_WIRE_CAP:
        raise ResourceLimitError(
            f"pipeline needs {wires} wires, above the simulation cap {STATE_WIRE_CAP}"
        )


# -- generic pipeline ----------------------------------------------------------


def generic_pdo_encoding(spec: GenericSymbol, grid: GridSpec, epsilon) -> BlockEncoding:
    """(2^{pd/2} C_a, pd + t + 2)-encoding of a generic sampled symbol.

    Input register: iQFT per dimension; a fresh x register is spread by
    Hadamards; the pairwise phase multiplier imprints e^{2 pi i x.xi/P}; a
    diagonal encoding of the wrapped symbol on the doubled register applies
    a(x, xi)/C_a; closing Hadamards on the frequency register complete the
    inverse transform.  Diagonal tolerance epsilon / sqrt(P^d).
    """
    if spec.variant != "generic":
        raise ContractViolationError("generic pipeline needs a generic symbol")
    w = wrap_symbol(spec, grid)
    pd = grid.wires
    table = np.stack([w.table(x) for x in range(grid.N)])  # [x, xi]
    grid2 = GridSpec(grid.p, 2 * grid.d)

    def doubled(n):
        return table[n >> pd, n & ((1 << pd) - 1)]

    diag = _diag_encoding_of(doubled, grid2, spec.c_a, epsilon / math.sqrt(grid.N))
    n_wires = diag.circuit.wire_count
    _check_wire_budget(n_wires)

    circ = Circuit(n_wires)
    iqft = qft_circuit(grid.p).inverse()
    for k in range(grid.d):
        circ.extend(iqft, {j: k * grid.p + j for j in range(grid.p)})
    for wgt in range(pd, 2 * pd):
        circ.h(wgt)
    circ.extend(phase_mult_multidim(grid.p, grid.d))
    circ.extend(diag.circuit)
    for wgt in range(pd):
        circ.h(wgt)

    xi_reg = tuple(range(pd))
    x_reg = tuple(range(pd, 2 * pd))
    extra = tuple(range(2 * pd, n_wires))
    return BlockEncoding(
        circuit=circ,
        gamma=math.sqrt(grid.N) * diag.gamma,
        ancilla_wires=xi_reg + extra,
        epsilon=float(epsilon),
        hermitian=False,
        input_system_wires=xi_reg,
        output_system_wires=x_reg,
        phase=diag.phase,
    )


# -- separable pipeline --------------------------------------------------------


def separable_pdo_encoding(spec: SeparableSymbol, grid: GridSpec, epsilon) -> BlockEncoding:
    """(C_alpha C_beta, m)-encoding of diag(alpha) F diag(beta_folded) F^dag."""
    if spec.variant != "separable":
        raise ContractViolationError("separable pipeline needs a separable symbol")
    w = wrap_symbol(spec, grid)
    alpha_vals = w.alpha_values()
    beta_vals = w.beta_values()
    be_beta = _diag_encoding_of(
        lambda n: beta_vals[n], grid, spec.c_beta, epsilon / (2 * spec.c_alpha)
    )
    be_alpha = _diag_encoding_of(
        lambda n: alpha_vals[n], grid, spec.c_alpha, epsilon / (2 * spec.c_beta)
    )
    out = product(be_alpha, conjugate_by_qft(be_beta, grid.d))
    _check_wire_budget(out.circuit.wire_count)
    return replace(out, epsilon=float(epsilon))


# -- fully separable pipeline --------------------------------------------------


def _is_unit_factor(fac: SymbolFactor, grid: GridSpec, side):
    if fac.kind != "even" or fac.constant != 1.0:
        return False
    k = np.arange(grid.P)
    arg = k / grid.P if side == "x" else grid.fold(k)
    return np.max(np.abs(np.asarray(fac.func(arg), dtype=complex) - 1.0)) <= 1e-14


def _exp_factor_encoding(theta, p) -> BlockEncoding:
    circ = Circuit(p)
    for j in range(p):
        circ.rz(j, theta * (1 << j))
    wires = tuple(range(p))
    return BlockEncoding(
        circuit=circ,
        gamma=1.0,
        ancilla_wires=(),
        epsilon=0.0,
        hermitian=False,
        input_system_wires=wires,
        output_system_wires=wires,
    )


def _factor_profile(fac: SymbolFactor, grid: GridSpec, side):
    """(g, C) for the QET step: g on [-P, P] and a dominating constant.

    x-side factors are reparametrized to the lattice variable y = P x.  The
    constant must dominate over the whole QET interval [-P, P], which can
    exceed the factor's declared constant on the sampled grid (e.g. an odd
    xi-profile bounded by 1 on the folded range [-P/2, P/2)).
    """
    if side == "x":
        g = lambda y: np.asarray(fac.func(np.asarray(y, dtype=float) / grid.P))
    else:
        g = fac.func
    sup = float(np.max(np.abs(np.asarray(g(np.linspace(-grid.P, grid.P, 2001))))))
    return g, max(float(fac.constant), sup)


def _factor_encoding(fac: SymbolFactor, grid: GridSpec, side, tol) -> BlockEncoding:
    if fac.kind == "exponential":
        return _exp_factor_encoding(fac.theta, grid.p)
    if _is_unit_factor(fac, grid, side):
        return identity_encoding(grid.p)
    sigma = "+" if side == "x" else "-"
    dspec = DiagonalSpec(sigma, default_theta(grid.P), grid.p)
    g, c_enc = _factor_profile(fac, grid, side)
    return diag_function_encoding(g, dspec, c_enc, tol)


def fully_separable_pdo_encoding(
    spec: FullySeparableSymbol, grid: GridSpec, epsilon
) -> BlockEncoding:
    """(C, m)-encoding built from per-dimension factor encodings.

    Exponential factors are exact zero-ancilla diagonal rotations; parity
    factors go through QET at tolerance epsilon / (2 d C) with C the product
    of the per-factor dominating constants.
    """
    if spec.variant != "fully_separable":
        raise ContractViolationError("pipeline needs a fully separable symbol")
    if len(spec.x_factors) != grid.d:
        raise ContractViolationError("factor count must match the grid dimension")
    wrap_symbol(spec, grid)  # validates tags and constants
    c_total = 1.0
    for side, facs in (("x", spec.x_factors), ("xi", spec.xi_factors)):
        for fac in facs:
            if fac.kind != "exponential" and not _is_unit_factor(fac, grid, side):
                c_total *= _factor_profile(fac, grid, side)[1]
    tol = epsilon / (2 * grid.d * c_total)
    # tensor_encodings puts the list's last element on the lowest wires, so
    # dimension 0 (lowest register) goes last.
    x_encs = [
        _factor_encoding(spec.x_factors[k], grid, "x", tol)
        for k in reversed(range(grid.d))
    ]
    xi_encs = [
        _factor_encoding(spec.xi_factors[k], grid, "xi", tol)
        for k in reversed(range(grid.d))
    ]
    be_alpha = tensor_encodings(x_encs)
    be_beta = tensor_encodings(xi_encs)
    out = product(be_alpha, conjugate_by_qft(be_beta, grid.d))
    _check_wire_budget(out.circuit.wire_count)
    return replace(out, epsilon=float(epsilon))


# -- linear combinations -------------------------------------------------------


def _term_encoding(term, grid: GridSpec, epsilon) -> BlockEncoding:
    if term.variant == "separable":
        return separable_pdo_encoding(term, grid, epsilon)
    if term.variant == "fully_separable":
        return fully_separable_pdo_encoding(term, grid, epsilon)
    raise ContractViolationError(f"cannot encode term variant {term.variant!r}")


def lcu_pdo_encoding(
    spec: LinearCombinationSymbol, grid: GridSpec, epsilon
) -> BlockEncoding:
    """(delta, a+b, (1+delta) epsilon)-encoding of sum_j y_j A_j."""
    if spec.variant != "linear_combination":
        raise ContractViolationError("pipeline needs a linear-combination symbol")
    encodings = [_term_encoding(t, grid, epsilon) for t in spec.terms]
    if len(encodings) == 1:
        only = encodings[0]
        y0 = complex(spec.coefficients[0])
        if abs(y0) == 0.0:
            raise ContractViolationError("coefficient vector must be nonzero")
        gamma = float(abs(y0) * only.gamma)
        return replace(
            only,
            gamma=gamma,
            # The coefficient's phase rides on the recorded block phase.
            phase=only.phase * np.conj(y0 / abs(y0)),
            epsilon=float((1 + gamma) * epsilon),
        )
    gammas = np.array([be.gamma for be in encodings])
    if np.allclose(gammas, gammas[0], rtol=1e-9, atol=0.0):
        y = np.asarray(spec.coefficients, dtype=complex)
    else:
        # Fold unequal scales into the coefficients so the select operator
        # still sums the operators themselves.
        y = np.asarray(spec.coefficients, dtype=complex) * gammas
    beta = float(np.sum(np.abs(y)))
    out = lcu(prepare_pair(y, beta), encodings)
    _check_wire_budget(out.circuit.wire_count)
    return replace(out, epsilon=float((1 + out.gamma) * epsilon))


# -- applications --------------------------------------------------------------


def elliptic_encoding(coeffs, grid: GridSpec, epsilon) -> BlockEncoding:
    """Encoding of the low-rank elliptic symbol 1 - div(omega grad) analogue.

    gamma = 1 + 4 pi^2 (P sum|c_j| ||q_j||_1 + P^2 d sum|c_j|); error bound
    (1 + gamma) epsilon.
    """
    return lcu_pdo_encoding(elliptic_symbol(coeffs, grid), grid, epsilon)


def inverse_multiplier_terms(grid: GridSpec, epsilon) -> ExpSumApprox:
    """Pruned Gaussian sum for 1/(1 + |xi|^2) on the folded lattice.

    Terms of negligible total weight (which would otherwise force extreme
    QET degrees) are dropped while keeping the dense-sampled error within
    epsilon.
    """
    base = inv_elliptic_terms(grid.d, grid.P, 0.8 * epsilon)
    order = np.argsort(np.abs(base.weights))
    cum = np.cumsum(np.abs(base.weights[order]))
    drop = set(order[cum <= 0.1 * epsilon].tolist())
    keep = np.array([m for m in range(base.M) if m not in drop])
    pruned = ExpSumApprox(
        weights=base.weights[keep],
        exponents=base.exponents[keep],
        epsilon=base.epsilon,
        validity=base.validity,
        form="gaussian",
    )
    y = np.linspace(-base.validity[1], base.validity[1], 4001)
    if np.max(np.abs(pruned(y) - 1.0 / (1.0 + y * y))) > epsilon:
        return base
    return pruned


def radial_multiplier_inverse_encoding(grid: GridSpec, epsilon) -> BlockEncoding:
    """Encoding of F diag(1/(1 + |xi_folded|^2)) F^dag within 2 epsilon.

    Each Gaussian term e^{-a_m |xi|^2} factors over dimensions; the factors
    go through QET at tolerance epsilon / (2 W d) and the terms combine by
    LCU with gamma = sum w_m <= 1 + epsilon.
    """
    terms = inverse_multiplier_terms(grid, epsilon)
    w_sum = terms.W
    tol = epsilon / (2 * w_sum * grid.d)
    dspec = DiagonalSpec("-", default_theta(grid.P), grid.p)
    encodings = []
    for a_m in terms.exponents:
        factors = [
            diag_function_encoding(
                lambda v, a=a_m: np.exp(-a * np.asarray(v, dtype=float) ** 2),
                dspec,
                1.0,
                tol,
            )
            for _ in range(grid.d)
        ]
        encodings.append(factors[0] if grid.d == 1 else tensor_encodings(factors))
    combined = lcu(prepare_pair(terms.weights.astype(complex), w_sum), encodings)
    out = conjugate_by_qft(combined, grid.d)
    _check_wire_budget(out.circuit.wire_count)
    return replace(out, epsilon=float(2 * epsilon))
