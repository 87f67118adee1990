"""Command-line front end: encode, verify, and phase-factor commands.

Config files are JSON.  Complex scalars are written as ``[re, im]`` pairs
(plain numbers are taken as real).  Factor payloads are monomial coefficient
lists; builtins cover the elliptic and inverse-elliptic operators.

Exit codes: 0 pass, 1 verification/solver failure, 2 config error,
3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .approx import RealPolynomial
from .pdoref import (
    FullySeparableSymbol,
    GenericSymbol,
    LinearCombinationSymbol,
    SeparableSymbol,
    SymbolFactor,
    dense_pdo_matrix,
    elliptic_symbol,
    wrap_symbol,
)
from .pipelines import (
    elliptic_encoding,
    fully_separable_pdo_encoding,
    generic_pdo_encoding,
    inverse_multiplier_terms,
    lcu_pdo_encoding,
    radial_multiplier_inverse_encoding,
    separable_pdo_encoding,
    verify_encoding,
)
from .qspqet import PhaseFactors, find_phases, qsp_matrix
from .simcore import (
    Circuit,
    ContractViolationError,
    DimensionError,
    GateInstance,
    GridSpec,
    ResourceLimitError,
    SolverError,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3

PIPELINES = (
    "generic",
    "separable",
    "fully-separable",
    "lcu",
    "elliptic",
    "inverse",
)


class ConfigError(ValueError):
    """A configuration field is missing or invalid; message names the path."""


# -- config parsing ------------------------------------------------------------


def _require(cfg, key, path):
    if key not in cfg:
        raise ConfigError(f"missing field {path}.{key}")
    return cfg[key]


def _as_complex(v, path):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ConfigError(f"{path} must be a number or an [re, im] pair")


def _poly_func(coeffs, path):
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise ConfigError(f"{path} must be a nonempty coefficient list")
    return lambda y: np.polynomial.polynomial.polyval(np.asarray(y, dtype=float), c)


def _factor_from_config(cfg, path):
    kind = _require(cfg, "kind", path)
    if kind == "exponential":
        return SymbolFactor("exponential", theta=float(_require(cfg, "theta", path)))
    func = _poly_func(_require(cfg, "coeffs", path), f"{path}.coeffs")
    return SymbolFactor(kind, func=func, constant=float(cfg.get("constant", 1.0)))


def _fully_separable_from_config(cfg, path):
    xf = [
        _factor_from_config(f, f"{path}.x_factors[{i}]")
        for i, f in enumerate(_require(cfg, "x_factors", path))
    ]
    kf = [
        _factor_from_config(f, f"{path}.xi_factors[{i}]")
        for i, f in enumerate(_require(cfg, "xi_factors", path))
    ]
    return FullySeparableSymbol(tuple(xf), tuple(kf))


def _generic_from_config(cfg, grid, path):
    table = np.asarray(
        [
            [_as_complex(v, f"{path}.table") for v in row]
            for row in _require(cfg, "table", path)
        ]
    )
    if table.shape != (grid.N, grid.N):
        raise ConfigError(f"{path}.table must be {grid.N} x {grid.N} (x rows, xi columns)")
    c_a = float(_require(cfg, "c_a", path))

    def a(x, xi):
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        ks = np.atleast_1d(np.asarray(xi, dtype=np.int64)) % grid.P
        row = 0
        col = 0
        for k in range(grid.d):
            row += (int(round(xs[k] * grid.P)) % grid.P) << (k * grid.p)
            col += int(ks[k]) << (k * grid.p)
        return table[row, col]

    return GenericSymbol(a, c_a)


def _symbol_from_config(pipeline, cfg, grid):
    path = "symbol"
    if pipeline == "generic":
        return _generic_from_config(_require(cfg, "symbol", "config"), grid, path)
    if pipeline == "separable":
        sym = _require(cfg, "symbol", "config")
        return SeparableSymbol(
            _poly_func(_require(sym, "alpha", path), f"{path}.alpha"),
            _poly_func(_require(sym, "beta", path), f"{path}.beta"),
            float(_require(sym, "c_alpha", path)),
            float(_require(sym, "c_beta", path)),
        )
    if pipeline == "fully-separable":
        return _fully_separable_from_config(_require(cfg, "symbol", "config"), path)
    if pipeline == "lcu":
        sym = _require(cfg, "symbol", "config")
        coeffs = np.asarray(
            [
                _as_complex(v, f"{path}.coefficients")
                for v in _require(sym, "coefficients", path)
            ]
        )
        terms = tuple(
            _fully_separable_from_config(t, f"{path}.terms[{i}]")
            for i, t in enumerate(_require(sym, "terms", path))
        )
        return LinearCombinationSymbol(coeffs, terms)
    if pipeline == "elliptic":
        sym = _require(cfg, "symbol", "config")
        return [
            (_as_complex(c, f"{path}.coefficients"), [int(v) for v in q])
            for c, q in zip(
                _require(sym, "coefficients", path), _require(sym, "q", path)
            )
        ]
    if pipeline == "inverse":
        return None
    raise ConfigError(f"config.pipeline must be one of {', '.join(PIPELINES)}")


def load_config(args) -> dict:
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}")
    if args.pipeline is not None:
        cfg["pipeline"] = args.pipeline
    if args.epsilon is not None:
        cfg["epsilon"] = args.epsilon
    if args.max_wires is not None:
        cfg["max_wires"] = args.max_wires
    if args.out is not None:
        cfg["out"] = args.out
    grid_cfg = _require(cfg, "grid", "config")
    try:
        grid = GridSpec(int(_require(grid_cfg, "p", "config.grid")),
                        int(grid_cfg.get("d", 1)))
    except ContractViolationError as exc:
        raise ConfigError(f"config.grid: {exc}")
    pipeline = _require(cfg, "pipeline", "config")
    if pipeline not in PIPELINES:
        raise ConfigError(f"config.pipeline must be one of {', '.join(PIPELINES)}")
    epsilon = float(_require(cfg, "epsilon", "config"))
    if epsilon <= 0:
        raise ConfigError("config.epsilon must be > 0")
    return {
        "grid": grid,
        "pipeline": pipeline,
        "epsilon": epsilon,
        "symbol": _symbol_from_config(pipeline, cfg, grid),
        "max_wires": int(cfg.get("max_wires", 0)) or None,
        "out": cfg.get("out"),
    }


def build_encoding(run):
    grid, eps, sym = run["grid"], run["epsilon"], run["symbol"]
    pipeline = run["pipeline"]
    if pipeline == "generic":
        be = generic_pdo_encoding(sym, grid, eps)
    elif pipeline == "separable":
        be = separable_pdo_encoding(sym, grid, eps)
    elif pipeline == "fully-separable":
        be = fully_separable_pdo_encoding(sym, grid, eps)
    elif pipeline == "lcu":
        be = lcu_pdo_encoding(sym, grid, eps)
    elif pipeline == "elliptic":
        be = elliptic_encoding(sym, grid, eps)
    else:
        be = radial_multiplier_inverse_encoding(grid, eps)
    if run["max_wires"] and be.circuit.wire_count > run["max_wires"]:
        raise ResourceLimitError(
            f"encoding needs {be.circuit.wire_count} wires, above --max-wires "
            f"{run['max_wires']}"
        )
    return be


def reference_matrix(run) -> np.ndarray:
    grid = run["grid"]
    if run["pipeline"] == "inverse":
        n = np.arange(grid.N)
        xi = grid.fold(grid.coords(n)).astype(float)
        mult = 1.0 / (1.0 + np.sum(xi**2, axis=0))
        f = np.exp(
            2j
            * np.pi
            / grid.P
            * np.einsum("kn,km->nm", grid.coords(n), grid.coords(n))
        ) / np.sqrt(grid.N)
        return f @ np.diag(mult) @ f.conj().T
    spec = (
        elliptic_symbol(run["symbol"], grid)
        if run["pipeline"] == "elliptic"
        else run["symbol"]
    )
    return dense_pdo_matrix(wrap_symbol(spec, grid))


# -- circuit listing -----------------------------------------------------------


def _fmt_complex(z):
    return f"{z.real:.17e},{z.imag:.17e}"


def _fmt_params(g):
    if g.kind in ("RY", "RZ", "GPHASE"):
        return f"{g.param:.17e}"
    if g.kind == "ORACLE_PERM":
        return ",".join(str(int(v)) for v in g.table)
    if g.kind in ("ORACLE_DIAG",):
        return ";".join(_fmt_complex(z) for z in g.table)
    if g.kind == "UNITARY":
        return ";".join(_fmt_complex(z) for z in g.table.reshape(-1))
    return "-"


def circuit_to_text(c: Circuit) -> str:
    """One gate per line: ``KIND targets controls params``.

    Targets are comma-separated wire indices; controls are ``wire:polarity``
    pairs or ``-``; params depend on the kind (angle, permutation table,
    diagonal, or row-major matrix entries as ``re,im``).
    """
    lines = [
        f"# wires={c.wire_count} global_phase={_fmt_complex(complex(c.global_phase))}",
        "# bit order: wire 0 is the least significant bit; register 0 on the "
        "lowest wires",
    ]
    for g in c.gates:
        targets = ",".join(str(w) for w in g.targets)
        controls = ",".join(f"{w}:{pol}" for w, pol in g.controls) or "-"
        lines.append(f"{g.kind} {targets} {controls} {_fmt_params(g)}")
    return "\n".join(lines) + "\n"


def _parse_complex(tok, lineno):
    try:
        re_s, im_s = tok.split(",")
        return complex(float(re_s), float(im_s))
    except ValueError:
        raise ConfigError(f"circuit line {lineno}: bad complex entry {tok!r}")


def circuit_from_text(text: str) -> Circuit:
    """Inverse of :func:`circuit_to_text`."""
    wires = None
    phase = 1.0 + 0.0j
    circ = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if tok.startswith("wires="):
                    wires = int(tok[len("wires="):])
                elif tok.startswith("global_phase="):
                    phase = _parse_complex(tok[len("global_phase="):], lineno)
            continue
        if circ is None:
            if wires is None:
                raise ConfigError("circuit listing lacks a wires= header")
            circ = Circuit(wires)
            circ.global_phase = phase
        parts = line.split()
        if len(parts) != 4:
            raise ConfigError(f"circuit line {lineno}: expected 4 fields")
        kind, tgt_s, ctl_s, par_s = parts
        targets = tuple(int(v) for v in tgt_s.split(","))
        controls = ()
        if ctl_s != "-":
            controls = tuple(
                (int(w), int(pol))
                for w, pol in (tok.split(":") for tok in ctl_s.split(","))
            )
        if kind in ("H", "X", "S", "SWAP"):
            circ.append(GateInstance(kind, targets, controls))
        elif kind in ("RY", "RZ", "GPHASE"):
            circ.append(GateInstance(kind, targets, controls, float(par_s)))
        elif kind == "ORACLE_PERM":
            circ.oracle_perm(targets, [int(v) for v in par_s.split(",")])
        elif kind == "ORACLE_DIAG":
            circ.oracle_diag(
                targets, [_parse_complex(t, lineno) for t in par_s.split(";")]
            )
        elif kind == "UNITARY":
            dim = 1 << len(targets)
            flat = np.array([_parse_complex(t, lineno) for t in par_s.split(";")])
            if flat.size != dim * dim:
                raise ConfigError(f"circuit line {lineno}: matrix size mismatch")
            circ.unitary(targets, flat.reshape(dim, dim), controls=controls)
        else:
            raise ConfigError(f"circuit line {lineno}: unknown gate kind {kind!r}")
    if circ is None:
        if wires is None:
            raise ConfigError("empty circuit listing")
        circ = Circuit(wires)
        circ.global_phase = phase
    return circ


# -- commands ------------------------------------------------------------------


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_encode(run) -> int:
    be = build_encoding(run)
    meta = {
        "pipeline": run["pipeline"],
        "gamma": float(be.gamma),
        "ancillas": len(be.ancilla_wires),
        "epsilon_claimed": float(be.epsilon),
        "wires": be.circuit.wire_count,
        "gates_elementary": be.circuit.elementary_gate_count,
        "oracle_calls": be.circuit.oracle_call_count,
    }
    out = run["out"]
    if out is None:
        sys.stdout.write(json.dumps(meta, indent=2) + "\n")
        sys.stdout.write(circuit_to_text(be.circuit))
    else:
        _write(f"{out}.json", json.dumps(meta, indent=2) + "\n")
        _write(f"{out}.circuit", circuit_to_text(be.circuit))
    if run["pipeline"] == "inverse":
        terms = inverse_multiplier_terms(run["grid"], run["epsilon"])
        _write(f"{out}.expsum" if out else None, terms.to_text())
    return EXIT_PASS


def cmd_verify(run) -> int:
    be = build_encoding(run)
    rep = verify_encoding(be, reference_matrix(run))
    payload = dict(rep.to_dict(), pipeline=run["pipeline"], passed=bool(rep.passed))
    text = json.dumps(payload, indent=2) + "\n"
    _write(f"{run['out']}.report.json" if run["out"] else None, text)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_phases(args) -> int:
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}")
    coeffs = np.asarray(_require(cfg, "coeffs", "config"), dtype=float)
    parity = _require(cfg, "parity", "config")
    target = RealPolynomial(coeffs, parity)
    phases = find_phases(target, seed=args.seed)
    t = target.degree
    nodes = np.cos((2 * np.arange(t + 1) + 1) * np.pi / (2 * max(t + 1, 1)))
    rec = np.array([qsp_matrix(phases, x)[0, 0].real for x in nodes])
    residual = float(np.max(np.abs(rec - target(nodes))))
    lines = [phases.to_text().rstrip("\n"), f"# residual={residual:.17e}"]
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_PASS


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pdoenc",
        description="Build, list, and verify block encodings of discretized "
        "pseudo-differential operators.",
    )
    parser.add_argument("command", choices=("encode", "verify", "phases"))
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--pipeline", choices=PIPELINES, default=None)
    parser.add_argument("--epsilon", type=float, default=None)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--max-wires", type=int, default=None)
    parser.add_argument("--out", default=None)
    args = parser.parse_args(argv)

    try:
        if args.command == "phases":
            return cmd_phases(args)
        run = load_config(args)
        if args.command == "encode":
            return cmd_encode(run)
        return cmd_verify(run)
    except (ConfigError, ContractViolationError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceLimitError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
