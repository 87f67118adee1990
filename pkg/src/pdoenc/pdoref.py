"""Classical reference for discretized pseudo-differential operators.

Symbols a(x, xi) live on the unit cell [0, 1)^d in space and the folded
integer frequency lattice in xi.  ``wrap_symbol`` rescales and folds a
symbol onto the discrete grid; ``dense_pdo_matrix`` assembles the exact
operator every quantum pipeline is verified against; ``apply_pdo_fft``
applies separable symbols in O(P^d log P).

Conventions: the discretized operator is
    A[x, y] = P^{-d} sum_xi a_wrapped(x, xi) e^{2 pi i (x - y) xi / P},
and the unitary DFT F[x, xi] = e^{2 pi i x xi / P} / sqrt(P^d) diagonalizes
every x-independent (multiplier) symbol: A = F diag(beta_folded) F^dag.
x-side factor payloads are callables of x/P on [-1, 1]; xi-side payloads are
callables of the folded integer frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .simcore import (
    ContractViolationError,
    DimensionError,
    GridSpec,
    ResourceLimitError,
)

__all__ = [
    "GridSpec",
    "GenericSymbol",
    "SeparableSymbol",
    "SymbolFactor",
    "FullySeparableSymbol",
    "LinearCombinationSymbol",
    "WrappedSymbol",
    "wrap_symbol",
    "dft_coefficients",
    "dense_pdo_matrix",
    "apply_pdo_fft",
    "elliptic_symbol",
]

DENSE_PDO_CAP = 1 << 12


# -- symbol specifications ----------------------------------------------------


@dataclass(frozen=True)
class GenericSymbol:
    """a(x, xi) with x in [0,1)^d and xi a folded integer frequency.

    For d = 1 the callable receives scalars; for d > 1, length-d arrays.
    """

    a: object
    c_a: float
    variant: str = field(default="generic", init=False)


@dataclass(frozen=True)
class SeparableSymbol:
    """a(x, xi) = alpha(x) beta(xi); alpha on [0,1)^d, beta on folded ints."""

    alpha: object
    beta: object
    c_alpha: float
    c_beta: float
    variant: str = field(default="separable", init=False)


@dataclass(frozen=True)
class SymbolFactor:
    """One per-dimension factor of a fully separable symbol.

    kind 'even'/'odd': ``func`` is a parity-definite callable (of x/P for
    x-side factors, of the folded integer frequency for xi-side factors)
    dominated by ``constant``.  kind 'exponential': the factor is the unit-
    modulus diagonal e^{i theta k} with k the (unfolded) grid integer.
    """

    kind: str
    func: object = None
    theta: float = 0.0
    constant: float = 1.0

    def __post_init__(self):
        if self.kind not in ("even", "odd", "exponential"):
            raise ContractViolationError("factor kind must be even, odd or exponential")
        if self.kind != "exponential" and self.func is None:
            raise ContractViolationError("parity factors need a callable payload")
        if self.constant <= 0:
            raise ContractViolationError("factor constant must be positive")


@dataclass(frozen=True)
class FullySeparableSymbol:
    """alpha(x) = prod_k alpha_k(x_k), beta(xi) = prod_k beta_k(xi_k)."""

    x_factors: tuple
    xi_factors: tuple
    variant: str = field(default="fully_separable", init=False)

    def __post_init__(self):
        object.__setattr__(self, "x_factors", tuple(self.x_factors))
        object.__setattr__(self, "xi_factors", tuple(self.xi_factors))
        if len(self.x_factors) != len(self.xi_factors):
            raise DimensionError("x and xi factor lists must have equal length")

    @property
    def constant(self):
        out = 1.0
        for fac in self.x_factors + self.xi_factors:
            if fac.kind != "exponential":
                out *= fac.constant
        return out


@dataclass(frozen=True)
class LinearCombinationSymbol:
    """sum_j y_j * term_j over separable or fully separable terms."""

    coefficients: np.ndarray
    terms: tuple
    variant: str = field(default="linear_combination", init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", np.asarray(self.coefficients, dtype=complex)
        )
        object.__setattr__(self, "terms", tuple(self.terms))
        if len(self.coefficients) != len(self.terms) or not self.terms:
            raise DimensionError("coefficient/term lists must match and be nonempty")


# -- wrapping ------------------------------------------------------------------


def _factor_values(fac: SymbolFactor, grid: GridSpec, side: str) -> np.ndarray:
    """Values of one factor over the per-dimension grid 0..P-1."""
    k = np.arange(grid.P)
    if fac.kind == "exponential":
        return np.exp(1j * fac.theta * k)
    if side == "x":
        vals = np.asarray(fac.func(k / grid.P), dtype=complex)
    else:
        vals = np.asarray(fac.func(grid.fold(k)), dtype=complex)
    return vals


def _check_factor(fac: SymbolFactor, grid: GridSpec, side: str):
    if fac.kind == "exponential":
        return
    y = np.linspace(0.0, 1.0 if side == "x" else grid.P, 65)[1:]
    plus = np.asarray(fac.func(y), dtype=complex)
    minus = np.asarray(fac.func(-y), dtype=complex)
    scale = max(float(np.max(np.abs(plus))), 1.0)
    want = plus if fac.kind == "even" else -plus
    if np.max(np.abs(minus - want)) > 1e-10 * scale:
        raise ContractViolationError(f"factor tagged {fac.kind} is not {fac.kind}")
    vals = _factor_values(fac, grid, side)
    if np.max(np.abs(vals)) > fac.constant * (1 + 1e-12):
        raise ContractViolationError("factor constant does not dominate the sampled sup")


@dataclass(frozen=True)
class WrappedSymbol:
    """A symbol rescaled and frequency-folded onto the discrete grid.

    ``table(x, xi)`` evaluates the wrapped symbol at flat grid indices
    (vectorized over xi).  For (fully) separable variants, ``alpha_values``
    and ``beta_values`` give the two diagonal profiles over flat indices.
    """

    spec: object
    grid: GridSpec

    @property
    def variant(self):
        return self.spec.variant

    def alpha_values(self) -> np.ndarray:
        g = self.grid
        n = np.arange(g.N)
        if self.variant == "separable":
            xs = g.coords(n) / g.P
            args = xs[0] if g.d == 1 else xs.T
            return np.asarray([self.spec.alpha(a) for a in args], dtype=complex)
        if self.variant == "fully_separable":
            out = np.ones(g.N, dtype=complex)
            xs = g.coords(n)
            for k, fac in enumerate(self.spec.x_factors):
                out *= _factor_values(fac, g, "x")[xs[k]]
            return out
        raise ContractViolationError(f"no alpha profile for variant {self.variant}")

    def beta_values(self) -> np.ndarray:
        g = self.grid
        n = np.arange(g.N)
        if self.variant == "separable":
            xis = g.fold(g.coords(n))
            args = xis[0] if g.d == 1 else xis.T
            return np.asarray([self.spec.beta(a) for a in args], dtype=complex)
        if self.variant == "fully_separable":
            out = np.ones(g.N, dtype=complex)
            xs = g.coords(n)
            for k, fac in enumerate(self.spec.xi_factors):
                out *= _factor_values(fac, g, "xi")[xs[k]]
            return out
        raise ContractViolationError(f"no beta profile for variant {self.variant}")

    def table(self, x: int, xi=None) -> np.ndarray:
        """Wrapped symbol at flat space index x and flat frequency indices xi."""
        g = self.grid
        if xi is None:
            xi = np.arange(g.N)
        xi = np.asarray(xi, dtype=np.int64)
        if self.variant == "generic":
            xc = g.coords(x) / g.P
            xic = g.fold(g.coords(xi))
            if g.d == 1:
                return np.asarray(
                    [self.spec.a(float(xc[0]), int(v)) for v in xic[0]], dtype=complex
                )
            return np.asarray(
                [self.spec.a(xc, xic[:, j]) for j in range(len(xi))], dtype=complex
            )
        if self.variant in ("separable", "fully_separable"):
            return self.alpha_values()[x] * self.beta_values()[xi]
        out = np.zeros(len(xi), dtype=complex)
        for y, term in zip(self.spec.coefficients, self.spec.terms):
            out += y * WrappedSymbol(term, g).table(x, xi)
        return out

    def to_text(self) -> str:
        g = self.grid
        lines = [f"# p={g.p} d={g.d} variant={self.variant}"]
        for x in range(g.N):
            row = self.table(x)
            lines.append(
                " ".join(f"{v.real:.12e}{v.imag:+.12e}j" for v in row)
            )
        return "\n".join(lines) + "\n"


def wrap_symbol(spec, grid: GridSpec) -> WrappedSymbol:
    """Rescale x to the unit cell and fold frequencies; validate constants."""
    w = WrappedSymbol(spec, grid)
    if spec.variant == "generic":
        # Sampled domination check; subsample rows on large grids.
        if grid.N <= 256:
            rows = range(grid.N)
        else:
            rows = np.linspace(0, grid.N - 1, 64, dtype=np.int64)
        sup = max(float(np.max(np.abs(w.table(int(x))))) for x in rows)
        if sup > spec.c_a * (1 + 1e-12):
            raise ContractViolationError("C_a does not dominate the sampled sup")
    elif spec.variant == "separable":
        if float(np.max(np.abs(w.alpha_values()))) > spec.c_alpha * (1 + 1e-12):
            raise ContractViolationError("C_alpha does not dominate the sampled sup")
        if float(np.max(np.abs(w.beta_values()))) > spec.c_beta * (1 + 1e-12):
            raise ContractViolationError("C_beta does not dominate the sampled sup")
    elif spec.variant == "fully_separable":
        if len(spec.x_factors) != grid.d:
            raise DimensionError("factor count must match the grid dimension")
        for fac in spec.x_factors:
            _check_factor(fac, grid, "x")
        for fac in spec.xi_factors:
            _check_factor(fac, grid, "xi")
    elif spec.variant == "linear_combination":
        for term in spec.terms:
            wrap_symbol(term, grid)
    else:
        raise ContractViolationError(f"unknown symbol variant {spec.variant!r}")
    return w


# -- reference operators -------------------------------------------------------


def _to_nd(vec, grid: GridSpec):
    """Flat vector -> d-dimensional array (axis d-1-k holds dimension k)."""
    return np.asarray(vec, dtype=complex).reshape((grid.P,) * grid.d)


def dft_coefficients(f, grid: GridSpec = None) -> np.ndarray:
    """f_hat(xi) = P^{-d} sum_x f(x) e^{-2 pi i x xi / P} over flat indices."""
    f = np.asarray(f, dtype=complex)
    if grid is None:
        p = int(round(math.log2(len(f))))
        grid = GridSpec(p, 1)
    if len(f) != grid.N:
        raise DimensionError("vector length does not match the grid")
    return np.fft.fftn(_to_nd(f, grid)).ravel() / grid.N


def dense_pdo_matrix(w: WrappedSymbol, grid: GridSpec = None) -> np.ndarray:
    """A[x, y] = P^{-d} sum_xi a_wrapped(x, xi) e^{2 pi i (x - y) xi / P}."""
    grid = grid or w.grid
    if grid.N > DENSE_PDO_CAP:
        raise ResourceLimitError(f"dense assembly capped at P^d <= {DENSE_PDO_CAP}")
    n = grid.N
    xi = np.arange(n)
    a = np.empty((n, n), dtype=complex)
    xc = grid.coords(np.arange(n))
    xic = grid.coords(xi)
    phase_xi = np.exp(
        2j * np.pi / grid.P * np.einsum("kn,km->nm", xc, xic)
    )  # e^{2 pi i x.xi / P}
    for x in range(n):
        row = w.table(x) * phase_xi[x]
        a[x] = np.fft.fftn(_to_nd(row, grid)).ravel() / n
    return a


def apply_pdo_fft(w: WrappedSymbol, f) -> np.ndarray:
    """Fast application diag(alpha) F diag(beta) F^dag f for separable symbols."""
    grid = w.grid
    f = np.asarray(f, dtype=complex)
    if len(f) != grid.N:
        raise DimensionError("vector length does not match the grid")
    if w.variant == "generic":
        raise ContractViolationError("no fast path for generic symbols")
    if w.variant == "linear_combination":
        out = np.zeros(grid.N, dtype=complex)
        for y, term in zip(w.spec.coefficients, w.spec.terms):
            out += y * apply_pdo_fft(WrappedSymbol(term, grid), f)
        return out
    fhat = np.fft.fftn(_to_nd(f, grid))
    fhat *= _to_nd(w.beta_values(), grid)
    return w.alpha_values() * np.fft.ifftn(fhat).ravel()


# -- elliptic application ------------------------------------------------------


def _one_factor():
    return SymbolFactor("even", func=lambda y: np.ones_like(np.asarray(y, dtype=float)))


def elliptic_symbol(coeffs, grid: GridSpec) -> LinearCombinationSymbol:
    """Low-rank symbol 1 + 4 pi^2 sum_j c_j e^{2 pi i q_j . x} (|xi|^2 + ...).

    ``coeffs`` is a list of (c_j, q_j) pairs with q_j an integer vector;
    the result has 1 + 2 r d fully separable terms whose coefficient vector
    y satisfies ||y||_1 = 1 + 4 pi^2 (P sum|c_j| ||q_j||_1 + P^2 d sum|c_j|).
    """
    d, big_p = grid.d, grid.P
    ys = [1.0 + 0j]
    terms = [
        FullySeparableSymbol(
            tuple(_one_factor() for _ in range(d)),
            tuple(_one_factor() for _ in range(d)),
        )
    ]
    for c, q in coeffs:
        q = np.atleast_1d(np.asarray(q, dtype=np.int64))
        if len(q) != d:
            raise DimensionError("q_j must have one entry per dimension")
        x_factors = tuple(
            SymbolFactor("exponential", theta=2 * np.pi * int(qk) / big_p) for qk in q
        )
        for ell in range(d):
            xi_lin = tuple(
                SymbolFactor("odd", func=lambda v, pp=big_p: np.asarray(v) / pp)
                if k == ell
                else _one_factor()
                for k in range(d)
            )
            ys.append(4 * np.pi**2 * big_p * int(q[ell]) * c)
            terms.append(FullySeparableSymbol(x_factors, xi_lin))
        for ell in range(d):
            xi_sq = tuple(
                SymbolFactor("even", func=lambda v, pp=big_p: (np.asarray(v) / pp) ** 2)
                if k == ell
                else _one_factor()
                for k in range(d)
            )
            ys.append(4 * np.pi**2 * big_p**2 * c)
            terms.append(FullySeparableSymbol(x_factors, xi_sq))
    return LinearCombinationSymbol(np.asarray(ys), tuple(terms))
