"""Command-line front end.

Usage::

    entmeas {validate|measure|spectrum|transfer|metrics} --input FILE
            [--convention prose|printed] [--summary]

Scenario files are JSON. Complex numbers are ``[re, im]`` pairs (a bare real
number is also accepted) and matrices are row-major nested arrays::

    {
      "dimension": 2,
      "entanglement_matrix": [[[1, 0], [0.5, 0]], [[0.5, 0], [1, 0]]],
      "state": {"preset": "max-uncertainty"},
      "pointer_state": {"preset": "basis:0"}
    }

``entanglement_matrix`` may also be ``"standard"``, ``"duplication"`` or
``{"q": [re, im]}`` (qubit family). ``state`` is one of ``{"pure": [...]}``,
``{"density": [[...]]}`` or ``{"preset": ...}`` with presets
``max-uncertainty``, ``basis:k`` (0-based) and ``bell``; a bare preset string
works too. ``transfer`` files add ``"second_system"`` with its own
``dimension``, ``entanglement_matrix`` and optional ``pointer_state``, and
their ``state`` lives on the joint ``A (x) B`` space.

The report is a single JSON line on stdout with sorted keys; ``--summary``
writes a readable table to stderr. Exit status is 0 on success, 1 when the
scenario is invalid or a check fails, 2 on I/O, parse or usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, replace
from importlib.metadata import PackageNotFoundError, version
from typing import Any

import numpy as np

from .entanglement_matrix import (
    EntanglementMatrix,
    check_entanglement_matrix,
    duplication_matrix,
    qubit_family,
    standard_matrix,
)
from .errors import DimensionError, ValidationError
from .info_metrics import (
    entanglement_after_measurement,
    metrics_report,
    negativity,
    von_neumann_entropy,
)
from .measurement_superop import (
    MAX_EXPLICIT_DIM,
    apply,
    compose,
    dubbed_decomposition,
    entangling_measurement,
    measure_product,
    reconstruct,
)
from .operator_core import is_hermitian, partial_trace
from .quantum_state import (
    NORM_TOL,
    PSD_TOL,
    TRACE_TOL,
    DensityMatrix,
    PureState,
    basis_state,
    density_from_pure,
    maximally_entangled_state,
    maximum_uncertainty_state,
)
from .spectral_analysis import (
    canonical_qubit_basis,
    from_basis_coordinates,
    matrix_in_eigen_basis,
    spectral_report,
    verify_qubit_null_forms,
)
from .transfer_experiment import CONVENTIONS, TransferScenario, run_transfer

CHECK_TOL = 1e-9
MAX_SPECTRUM_DIM = 6
COMMANDS = ("validate", "measure", "spectrum", "transfer", "metrics")

try:
    TOOL_VERSION = version("artifact")
except PackageNotFoundError:  # running from a source checkout
    TOOL_VERSION = "0.1.0"


class ParseError(Exception):
    """The scenario file is unreadable or structurally malformed."""


# -- parsing -----------------------------------------------------------------


def _complex(x, where: str) -> complex:
    if isinstance(x, bool):
        raise ParseError(f"{where}: expected a number or [re, im], got {x!r}")
    if isinstance(x, (int, float)):
        return complex(x)
    if (
        isinstance(x, list)
        and len(x) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x)
    ):
        return complex(x[0], x[1])
    raise ParseError(f"{where}: expected a number or [re, im], got {x!r}")


def _vector(x, where: str) -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise ParseError(f"{where}: expected a non-empty array")
    return np.array([_complex(v, f"{where}[{i}]") for i, v in enumerate(x)])


def _matrix(x, where: str) -> np.ndarray:
    if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
        raise ParseError(f"{where}: expected a nested array of rows")
    rows = [_vector(r, f"{where}[{i}]") for i, r in enumerate(x)]
    if len({len(r) for r in rows}) != 1:
        raise ParseError(f"{where}: rows have different lengths")
    return np.array(rows)


@dataclass
class StateSpec:
    """Parsed but not yet validated state description."""

    kind: str  # "pure" | "density" | "preset"
    data: Any


def _state_spec(x, where: str) -> StateSpec:
    if isinstance(x, str):
        return StateSpec("preset", x)
    if not isinstance(x, dict) or len(x) != 1:
        raise ParseError(f"{where}: expected one of pure / density / preset")
    (kind, data), = x.items()
    if kind == "pure":
        return StateSpec(kind, _vector(data, f"{where}.pure"))
    if kind == "density":
        return StateSpec(kind, _matrix(data, f"{where}.density"))
    if kind == "preset":
        if not isinstance(data, str):
            raise ParseError(f"{where}.preset: expected a string")
        return StateSpec(kind, data)
    raise ParseError(f"{where}: unknown state kind {kind!r}")


def _R_spec(x, where: str):
    if isinstance(x, str):
        if x not in ("standard", "duplication"):
            raise ParseError(f"{where}: unknown preset {x!r}")
        return x
    if isinstance(x, dict):
        if set(x) != {"q"}:
            raise ParseError(f"{where}: only {{'q': [re, im]}} is recognised")
        return ("q", _complex(x["q"], f"{where}.q"))
    return _matrix(x, where)


def _dimension(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"{where}: expected an integer")
    return x


@dataclass
class Scenario:
    dimension: int
    R: Any
    state: StateSpec
    pointer: StateSpec | None
    second: "Scenario | None" = None


def parse_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    return _scenario(doc, "", need_state=True)


def _scenario(doc: dict, prefix: str, need_state: bool) -> Scenario:
    for key in ("dimension", "entanglement_matrix") + (("state",) if need_state else ()):
        if key not in doc:
            raise ParseError(f"missing key {prefix}{key!r}")
    second = None
    if "second_system" in doc:
        if not isinstance(doc["second_system"], dict):
            raise ParseError("second_system must be an object")
        second = _scenario(doc["second_system"], "second_system.", need_state=False)
    pointer = doc.get("pointer_state")
    return Scenario(
        dimension=_dimension(doc["dimension"], f"{prefix}dimension"),
        R=_R_spec(doc["entanglement_matrix"], f"{prefix}entanglement_matrix"),
        state=_state_spec(doc["state"], f"{prefix}state") if need_state else None,
        pointer=None if pointer is None else _state_spec(pointer, f"{prefix}pointer_state"),
        second=second,
    )


# -- building domain objects ---------------------------------------------------


def _raw_R_matrix(sc: Scenario) -> np.ndarray:
    if isinstance(sc.R, str):
        D = sc.dimension
        return np.eye(D) if sc.R == "standard" else np.ones((D, D))
    if isinstance(sc.R, tuple):
        q = sc.R[1]
        return np.array([[1, q], [q.conjugate(), 1]])
    return sc.R


def build_R(sc: Scenario) -> EntanglementMatrix:
    D = sc.dimension
    if D < 1:
        raise DimensionError("dimension must be positive")
    if isinstance(sc.R, str):
        return standard_matrix(D) if sc.R == "standard" else duplication_matrix(D)
    if isinstance(sc.R, tuple):
        if D != 2:
            raise DimensionError("the q-family entanglement matrix needs dimension 2")
        return qubit_family(sc.R[1])
    R = EntanglementMatrix(sc.R)
    if R.dim != D:
        raise DimensionError(f"entanglement matrix is {R.dim}x{R.dim}, dimension is {D}")
    return R


def _preset(name: str, D: int, joint: tuple[int, int] | None) -> PureState:
    if name == "max-uncertainty":
        return maximum_uncertainty_state(D)
    if name.startswith("basis:"):
        try:
            k = int(name.split(":", 1)[1])
        except ValueError:
            raise ValidationError("preset", f"bad basis index in {name!r}") from None
        return basis_state(D, k)
    if name == "bell":
        if joint is None or joint[0] != joint[1]:
            raise ValidationError("preset", "'bell' needs a joint state on two equal systems")
        return maximally_entangled_state(joint[0])
    raise ValidationError("preset", f"unknown preset {name!r}")


def build_state(spec: StateSpec, D: int, joint: tuple[int, int] | None = None) -> DensityMatrix:
    """Validated density matrix of side ``D`` (with ``joint`` dims when bipartite)."""
    dims = joint or ()
    if spec.kind == "preset":
        psi = _preset(spec.data, D, joint)
    elif spec.kind == "pure":
        psi = PureState(spec.data)
    else:
        rho = DensityMatrix(spec.data, dims)
        if rho.dim != D:
            raise DimensionError(f"density matrix has side {rho.dim}, expected {D}")
        return rho
    if psi.dim != D:
        raise DimensionError(f"state has {psi.dim} amplitudes, expected {D}")
    return density_from_pure(psi, dims)


def _pointer(sc: Scenario) -> DensityMatrix:
    spec = sc.pointer or StateSpec("preset", "basis:0")
    return build_state(spec, sc.dimension)


# -- JSON encoding -------------------------------------------------------------


def _num(x: float) -> float:
    x = float(x)
    return 0.0 if abs(x) < 1e-14 else x


def _c(z) -> list[float]:
    z = complex(z)
    return [_num(z.real), _num(z.imag)]


def _cmat(m) -> list:
    m = np.asarray(m)
    if m.ndim == 1:
        return [_c(z) for z in m]
    return [[_c(z) for z in row] for row in m]


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


# -- commands ----------------------------------------------------------------


def _state_checks(spec: StateSpec | None, D: int, joint=None) -> dict[str, bool]:
    if spec is None:
        return {}
    if spec.kind == "preset":
        try:
            build_state(spec, D, joint)
            return {"preset": True}
        except (ValidationError, DimensionError):
            return {"preset": False}
    if spec.kind == "pure":
        c = spec.data
        return {
            "dimension": c.size == D,
            "normalization": bool(abs(np.sum(np.abs(c) ** 2) - 1) <= NORM_TOL),
        }
    m = spec.data
    square = m.shape[0] == m.shape[1]
    herm = square and is_hermitian(m)
    psd = herm and bool(np.linalg.eigvalsh((m + m.conj().T) / 2).min() >= -PSD_TOL)
    return {
        "dimension": square and m.shape[0] == D,
        "hermitian": herm,
        "psd": psd,
        "trace": square and bool(abs(np.trace(m) - 1) <= TRACE_TOL),
    }


def _R_checks(sc: Scenario) -> dict[str, bool]:
    m = _raw_R_matrix(sc)
    checks = check_entanglement_matrix(m)
    checks["dimension"] = m.shape == (sc.dimension, sc.dimension)
    if isinstance(sc.R, tuple):
        checks["dimension"] = sc.dimension == 2
    return checks


def cmd_validate(sc: Scenario, args) -> tuple[dict, dict]:
    joint = None
    if sc.second is not None:
        joint = (sc.dimension, sc.second.dimension)
    D_state = sc.dimension * (sc.second.dimension if sc.second else 1)
    checks = {
        "entanglement_matrix": _R_checks(sc),
        "state": _state_checks(sc.state, D_state, joint),
    }
    if sc.pointer is not None:
        checks["pointer_state"] = _state_checks(sc.pointer, sc.dimension)
    if sc.second is not None:
        checks["second_system.entanglement_matrix"] = _R_checks(sc.second)
        if sc.second.pointer is not None:
            checks["second_system.pointer_state"] = _state_checks(
                sc.second.pointer, sc.second.dimension
            )
    failed = sorted(
        f"{group}.{name}" for group, cs in checks.items() for name, ok in cs.items() if not ok
    )
    return {"failed": failed}, checks


def cmd_measure(sc: Scenario, args) -> tuple[dict, dict]:
    R = build_R(sc)
    D = R.dim
    rho_A = build_state(sc.state, D)
    rho_M = _pointer(sc)
    out = measure_product(R, rho_A, rho_M)
    branches = dubbed_decomposition(R, rho_A)
    purity = float(np.real(np.trace(out.matrix @ out.matrix)))
    E = entanglement_after_measurement(R, rho_A)
    results = {
        "output_state": _cmat(out.matrix),
        "decomposition": [{"weight": _num(w), "vector": _cmat(v)} for w, v in branches],
        "purity": _num(purity),
        "is_pure": bool(abs(purity - 1) <= CHECK_TOL),
        "entropy_object": _num(von_neumann_entropy(partial_trace(out.matrix, (D, D), keep=0))),
        "entropy_pointer": _num(von_neumann_entropy(partial_trace(out.matrix, (D, D), keep=1))),
        "entropy_joint": _num(von_neumann_entropy(out)),
        "one_time_E": _num(E),
        "negativity": _num(negativity(out)),
    }
    checks = {
        "trace_preserved": bool(abs(np.trace(out.matrix) - 1) <= CHECK_TOL),
        "decomposition_reconstructs": bool(
            np.max(np.abs(reconstruct(branches, D * D) - out.matrix)) <= CHECK_TOL
        ),
    }
    if D * D <= MAX_EXPLICIT_DIM:
        via_matrix = apply(
            entangling_measurement(R), DensityMatrix(np.kron(rho_A.matrix, rho_M.matrix), (D, D))
        )
        checks["superoperator_agrees"] = bool(
            np.max(np.abs(via_matrix.matrix - out.matrix)) <= CHECK_TOL
        )
    return results, {"measure": checks}


def cmd_spectrum(sc: Scenario, args) -> tuple[dict, dict]:
    R = build_R(sc)
    D = R.dim
    if D > MAX_SPECTRUM_DIM:
        raise DimensionError(f"spectrum needs dimension <= {MAX_SPECTRUM_DIM}, got {D}")
    S = entangling_measurement(R)
    rep = spectral_report(S)
    std = entangling_measurement(standard_matrix(D))
    results = {
        "eigenvalues": [
            {"value": _c(lam), "algebraic": a, "geometric": g}
            for (lam, a), g in zip(rep.spectrum.eigenvalues, rep.spectrum.geometric)
        ],
        "unit_eigenspace_dim": rep.unit_eigenspace_dim,
        "zero_algebraic_dim": rep.zero_algebraic_dim,
        "zero_geometric_dim": rep.zero_geometric_dim,
        "defective": rep.defective,
        "jordan_witnesses": [
            {"operator": _cmat(v), "image": _cmat(mv)} for v, mv in rep.jordan_chain_witnesses
        ],
    }
    checks = {
        "idempotent_to_standard": bool(
            np.max(np.abs(compose(S, S).matrix - std.matrix)) <= CHECK_TOL
        ),
    }
    if D == 2:
        q = complex(R.matrix[0, 1])
        basis = canonical_qubit_basis()
        C = matrix_in_eigen_basis(S, basis)
        results["q"] = _c(q)
        results["canonical_matrix"] = _cmat(C)
        checks["null_forms"] = verify_qubit_null_forms(S, q)
        checks["canonical_reconstructs"] = bool(
            np.max(np.abs(from_basis_coordinates(C, basis).matrix - S.matrix)) <= CHECK_TOL
        )
    return results, {"spectrum": checks}


def cmd_transfer(sc: Scenario, args) -> tuple[dict, dict]:
    if sc.second is None:
        raise ValidationError("second_system", "transfer needs a 'second_system' block")
    R_A, R_B = build_R(sc), build_R(sc.second)
    dA, dB = R_A.dim, R_B.dim
    rho_AB = build_state(sc.state, dA * dB, (dA, dB))
    base = TransferScenario(rho_AB, R_A, R_B, _pointer(sc), _pointer(sc.second))
    conventions = [args.convention] if args.convention else list(CONVENTIONS)
    results = {}
    checks = {}
    for conv in CONVENTIONS:
        rep = run_transfer(replace(base, convention=conv))
        checks[f"no_go_{conv}"] = rep.negativity <= CHECK_TOL
        if conv in conventions:
            results[conv] = {
                "rho_MN": _cmat(rep.rho_MN.matrix),
                "negativity": _num(rep.negativity),
                "mutual_information": _num(rep.mutual_information),
                "is_product": rep.is_product,
                "is_diagonal": rep.is_diagonal,
            }
    return results, {"transfer": checks}


def cmd_metrics(sc: Scenario, args) -> tuple[dict, dict]:
    R = build_R(sc)
    D = R.dim
    rho_A = build_state(sc.state, D)
    rho_M = _pointer(sc)
    rep = metrics_report(R, rho_A, rho_M)
    joint = measure_product(R, rho_A, rho_M)
    results = {
        "entropy_object": _num(rep.entropy_object),
        "entropy_pointer": _num(rep.entropy_pointer),
        "entropy_joint": _num(rep.entropy_joint),
        "one_time_E": _num(rep.one_time_E),
        "coherent_information_two_time": _num(rep.coherent_information_two_time),
        "mutual_information": _num(rep.mutual_information),
        "negativity": _num(negativity(joint)),
    }
    checks = {
        "two_time_zero": abs(rep.coherent_information_two_time) <= CHECK_TOL,
        "E_nonnegative": rep.one_time_E >= -CHECK_TOL,
        "E_consistent": abs(rep.one_time_E - (rep.entropy_pointer - rep.entropy_joint))
        <= CHECK_TOL,
    }
    return results, {"metrics": checks}


HANDLERS = {
    "validate": cmd_validate,
    "measure": cmd_measure,
    "spectrum": cmd_spectrum,
    "transfer": cmd_transfer,
    "metrics": cmd_metrics,
}


# -- entry point ---------------------------------------------------------------


def _summary(report: dict) -> str:
    lines = [f"entmeas {report['version']}  command: {report['command']}"]
    for key, value in sorted(report.get("results", {}).items()):
        if isinstance(value, (int, float, bool, str)):
            lines.append(f"  {key:<32} {value}")
        elif isinstance(value, dict):
            for k2, v2 in sorted(value.items()):
                if isinstance(v2, (int, float, bool, str)):
                    lines.append(f"  {key + '.' + k2:<32} {v2}")
    for group, cs in sorted(report.get("checks", {}).items()):
        for name, ok in sorted(cs.items()):
            lines.append(f"  [{'PASS' if ok else 'FAIL'}] {group}.{name}")
    if "error" in report:
        lines.append(f"  error: {report['error']}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="entmeas", description="Entangling quantum measurement toolkit."
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", required=True, help="scenario JSON file")
    p.add_argument(
        "--convention",
        choices=CONVENTIONS,
        default=None,
        help="transfer only: report a single role convention (default: both)",
    )
    p.add_argument("--summary", action="store_true", help="human-readable table on stderr")
    return p


def run(args: argparse.Namespace) -> tuple[int, dict]:
    """Execute one parsed command; returns ``(exit_code, report)``."""
    report: dict[str, Any] = {
        "tool": "entmeas",
        "version": TOOL_VERSION,
        "command": {"name": args.command, "convention": args.convention},
    }
    try:
        with open(args.input, "rb") as fh:
            raw = fh.read()
        report["input_sha256"] = _digest(raw)
        sc = parse_scenario(raw.decode("utf-8"))
    except (OSError, UnicodeDecodeError, ParseError) as exc:
        report["error"] = str(exc)
        return 2, report

    try:
        results, checks = HANDLERS[args.command](sc, args)
    except (ValidationError, DimensionError) as exc:
        report["error"] = str(exc)
        return 1, report
    report["results"] = results
    report["checks"] = checks
    ok = all(v for cs in checks.values() for v in cs.values())
    report["ok"] = ok
    return (0 if ok else 1), report


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    code, report = run(args)
    sys.stdout.write(json.dumps(report, sort_keys=True, ensure_ascii=False) + "\n")
    if args.summary:
        summary = dict(report)
        summary["command"] = summary["command"]["name"]
        sys.stderr.write(_summary(summary) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
