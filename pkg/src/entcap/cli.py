"""Command-line front end.

Exit codes: 0 success, 1 property failure, 2 input error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import checks
from .canonical import PAULI_LABELS, canonical_form, from_pauli_coefficients
from .capacity import OptimizerConfig, constants, optimize_rate, psi_max, rate, single_shot_no_ancilla
from .commrate import Ensemble, chi_change, comm_rate, ensemble_E1, ensemble_E2
from .conjecture import sweep, sweep_csv
from .qmath import PureState, is_hermitian

EXIT_OK, EXIT_PROPERTY, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3


class InputError(ValueError):
    """Malformed user input; maps to exit code 2."""


# ---------------------------------------------------------------------------
# parsing helpers


def _load_json(text_or_path: str, what: str):
    path = Path(text_or_path)
    try:
        if not text_or_path.lstrip().startswith(("{", "[")) and path.exists():
            text_or_path = path.read_text()
        return json.loads(text_or_path)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: invalid JSON ({exc})") from exc


def _complex_array(data, shape, field_name):
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{field_name}: expected numbers in [re, im] pairs") from exc
    if arr.shape != tuple(shape) + (2,):
        raise InputError(f"{field_name}: expected shape {tuple(shape) + (2,)}, got {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def hamiltonian_from_json(spec) -> np.ndarray:
    """Parse {"canonical": ...} | {"pauli": ...} | {"matrix": ...}."""
    if not isinstance(spec, dict):
        raise InputError("hamiltonian: expected a JSON object")
    variants = [k for k in ("canonical", "pauli", "matrix") if k in spec]
    if len(variants) != 1:
        raise InputError("hamiltonian: exactly one of canonical, pauli, matrix is required")
    kind = variants[0]
    body = spec[kind]
    if kind == "canonical":
        coeffs = np.zeros((4, 4))
        for i, name in enumerate(("mu_x", "mu_y", "mu_z"), start=1):
            try:
                coeffs[i, i] = float(body[name])
            except (KeyError, TypeError, ValueError) as exc:
                raise InputError(f"hamiltonian.canonical.{name}: missing or not a number") from exc
        return from_pauli_coefficients(coeffs)
    if kind == "pauli":
        try:
            coeffs = np.asarray(body, dtype=float)
        except (TypeError, ValueError) as exc:
            raise InputError("hamiltonian.pauli: expected a 4x4 array of numbers") from exc
        if coeffs.shape != (4, 4):
            raise InputError(f"hamiltonian.pauli: expected shape (4, 4), got {coeffs.shape}")
        return from_pauli_coefficients(coeffs)
    mat = _complex_array(body, (4, 4), "hamiltonian.matrix")
    if not is_hermitian(mat, 1e-9):
        raise InputError("hamiltonian.matrix: matrix is not Hermitian")
    return mat


def hamiltonian_from_terms(terms) -> np.ndarray:
    """Parse tokens like ``zz=1`` or ``xi=0.5`` into a Hamiltonian."""
    coeffs = np.zeros((4, 4))
    for tok in terms:
        label, sep, value = tok.partition("=")
        label = label.strip().lower().replace("0", "i")
        if not sep or len(label) != 2 or any(c not in PAULI_LABELS for c in label):
            raise InputError(f"--pauli: cannot parse term {tok!r}; use e.g. zz=1 or xi=0.5")
        try:
            coeffs[PAULI_LABELS.index(label[0]), PAULI_LABELS.index(label[1])] += float(value)
        except ValueError as exc:
            raise InputError(f"--pauli: coefficient of {label!r} is not a number") from exc
    return from_pauli_coefficients(coeffs)


def hamiltonian_from_args(args) -> np.ndarray:
    given = [a for a in ("pauli", "canonical", "hamiltonian") if getattr(args, a, None) is not None]
    if len(given) != 1:
        raise InputError("give exactly one of --pauli, --canonical, --hamiltonian")
    if args.pauli is not None:
        return hamiltonian_from_terms(args.pauli)
    if args.canonical is not None:
        mx, my, mz = args.canonical
        return hamiltonian_from_json({"canonical": {"mu_x": mx, "mu_y": my, "mu_z": mz}})
    return hamiltonian_from_json(_load_json(args.hamiltonian, "--hamiltonian"))


def state_from_json(obj, where: str) -> PureState:
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object with dims and amplitudes")
    try:
        dims = [int(d) for d in obj["dims"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{where}.dims: expected four integers") from exc
    if len(dims) != 4:
        raise InputError(f"{where}.dims: expected four integers, got {len(dims)}")
    amps = _complex_array(obj.get("amplitudes"), (int(np.prod(dims)),), f"{where}.amplitudes")
    try:
        return PureState(tuple(dims), amps)
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from exc


def ensemble_from_json(obj) -> Ensemble:
    if not isinstance(obj, dict) or not isinstance(obj.get("members"), list):
        raise InputError("ensemble.members: expected a list")
    members = []
    for k, m in enumerate(obj["members"]):
        where = f"ensemble.members[{k}]"
        try:
            p = float(m["p"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{where}.p: missing or not a number") from exc
        members.append((p, state_from_json(m, where)))
    try:
        return Ensemble(tuple(members))
    except ValueError as exc:
        raise InputError(f"ensemble: {exc}") from exc


def state_to_json(state: PureState) -> dict:
    return {
        "dims": list(state.dims),
        "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes],
    }


def _clean(obj):
    """Convert numpy scalars/arrays to JSON-safe values; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _optimizer_config(args) -> OptimizerConfig:
    base = {}
    if getattr(args, "config", None):
        base = _load_json(args.config, "--config")
        if not isinstance(base, dict):
            raise InputError("--config: expected a JSON object")
        known = {f.name for f in fields(OptimizerConfig)}
        unknown = set(base) - known
        if unknown:
            raise InputError(f"--config: unknown field {sorted(unknown)[0]!r}")
    if args.seed is not None:
        base["seed"] = args.seed
    if getattr(args, "restarts", None) is not None:
        base["restarts"] = args.restarts
    if getattr(args, "ancilla", None) is not None:
        base["ancilla_a"], base["ancilla_b"] = args.ancilla
    base.setdefault("ancilla_a", 2)
    base.setdefault("ancilla_b", 2)
    try:
        return OptimizerConfig(**base)
    except (TypeError, ValueError) as exc:
        raise InputError(f"--config: {exc}") from exc


# ---------------------------------------------------------------------------
# commands


def cmd_canonical(args) -> tuple[dict, int]:
    h = hamiltonian_from_args(args)
    cf = canonical_form(h)
    err = float(np.max(np.abs(cf.reconstruct() - h)))
    return {"mu_x": cf.mu_x, "mu_y": cf.mu_y, "mu_z": cf.mu_z, "reconstruction_error": err}, EXIT_OK


def cmd_capacity(args) -> tuple[dict, int]:
    h = hamiltonian_from_args(args)
    c = constants()
    out = {
        "closed_form": single_shot_no_ancilla(canonical_form(h)),
        "optimized": None,
        "alpha": c.alpha,
        "x0": c.x0,
    }
    if args.optimize:
        cfg = _optimizer_config(args)
        res = optimize_rate(h, (cfg.ancilla_a, cfg.ancilla_b), cfg)
        out["optimized"] = res.best_rate
        out["optimizer"] = {
            "ancilla": [cfg.ancilla_a, cfg.ancilla_b],
            "restarts": res.restarts,
            "evaluations": res.evaluations,
            "converged": res.converged,
            "best_restart": res.best_restart,
            "history": res.history,
        }
    return out, EXIT_OK


def cmd_rate(args) -> tuple[dict, int]:
    h = hamiltonian_from_args(args)
    state = psi_max() if args.state is None else state_from_json(_load_json(args.state, "--state"), "state")
    r = rate(state, h)
    return {"rate": r.value, "divergent": r.divergent, "schmidt_spectrum": r.schmidt_spectrum}, EXIT_OK


def cmd_commrate(args) -> tuple[dict, int]:
    h = hamiltonian_from_args(args)
    if args.ensemble == "E1":
        ens = ensemble_E1()
    elif args.ensemble == "E2":
        ens = ensemble_E2()
    else:
        ens = ensemble_from_json(_load_json(args.ensemble, "--ensemble"))
    if not args.dt > 0:
        raise InputError("--dt must be positive")
    before, after = chi_change(ens, h, args.dt)
    return {
        "chi_before": before,
        "chi_after": after,
        "rate": comm_rate(ens, h, args.dt, central=args.central),
    }, EXIT_OK


def cmd_sweep(args) -> tuple[dict, int]:
    cfg = _optimizer_config(args)
    points = sweep(args.mu_x, args.mu_y, (cfg.ancilla_a, cfg.ancilla_b), cfg)
    text = sweep_csv(points)
    try:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return {"rows": len(points), "path": str(args.out), "error": str(exc)}, EXIT_IO
    return {"rows": len(points), "path": str(args.out)}, EXIT_OK


def cmd_verify(args) -> tuple[dict, int]:
    if args.trials < 1:
        raise InputError("--trials must be >= 1")
    report = checks.run_suites(args.suite, args.trials, args.seed or 0)
    return report, EXIT_OK if report["all_passed"] else EXIT_PROPERTY


COMMANDS = {
    "canonical": cmd_canonical,
    "capacity": cmd_capacity,
    "rate": cmd_rate,
    "commrate": cmd_commrate,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def _add_hamiltonian(p):
    g = p.add_argument_group("hamiltonian (give exactly one)")
    g.add_argument("--pauli", nargs="+", metavar="TERM", help="terms like zz=1 xx=0.5 iz=0.2")
    g.add_argument("--canonical", nargs=3, type=float, metavar=("MU_X", "MU_Y", "MU_Z"))
    g.add_argument("--hamiltonian", metavar="JSON_OR_PATH", help="Hamiltonian JSON document")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entcap", description="Entanglement capacities of two-qubit Hamiltonians")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("canonical", help="canonical form mu_x >= mu_y >= |mu_z|")
    _add_hamiltonian(p)

    p = sub.add_parser("capacity", help="closed-form and optimized entanglement capacity")
    _add_hamiltonian(p)
    p.add_argument("--optimize", action="store_true")
    p.add_argument("--ancilla", nargs=2, type=int, metavar=("DA", "DB"), help="ancilla dims (default 2 2)")
    p.add_argument("--restarts", type=int)
    p.add_argument("--config", metavar="JSON_OR_PATH", help="optimizer config JSON")

    p = sub.add_parser("rate", help="entanglement rate of a state (default psi_max)")
    _add_hamiltonian(p)
    p.add_argument("--state", metavar="JSON_OR_PATH")

    p = sub.add_parser("commrate", help="Holevo communication rate of an ensemble")
    _add_hamiltonian(p)
    p.add_argument("--ensemble", default="E1", help="E1, E2, or an ensemble JSON document")
    p.add_argument("--dt", type=float, default=1e-5)
    p.add_argument("--central", action="store_true", help="central instead of forward difference")

    p = sub.add_parser("sweep", help="optimized capacity of mu_x XX + mu_y YY + ZZ over a grid")
    p.add_argument("--mu-x", nargs="+", type=float, required=True)
    p.add_argument("--mu-y", nargs="+", type=float, required=True)
    p.add_argument("--ancilla", nargs=2, type=int, metavar=("DA", "DB"))
    p.add_argument("--restarts", type=int)
    p.add_argument("--config", metavar="JSON_OR_PATH")
    p.add_argument("--out", required=True, metavar="PATH")

    p = sub.add_parser("verify", help="randomized property suites")
    p.add_argument("--suite", choices=("bounds", "identities", "all"), default="all")
    p.add_argument("--trials", type=int, default=100)

    for sp in sub.choices.values():
        sp.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    return parser


def _input_hash(args) -> str:
    payload = {k: v for k, v in sorted(vars(args).items())}
    for key in ("hamiltonian", "state", "ensemble", "config"):
        val = payload.get(key)
        if isinstance(val, str) and Path(val).is_file():
            payload[key] = Path(val).read_text()
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    seed = 0 if args.seed is None else args.seed
    start = time.perf_counter()
    try:
        results, code = COMMANDS[args.command](args)
    except ValueError as exc:  # InputError and library domain errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    report = {
        "command": args.command,
        "argv": list(sys.argv[1:] if argv is None else argv),
        "input_hash": _input_hash(args),
        "seed": seed,
        "results": _clean(results),
        "wall_time": time.perf_counter() - start,
    }
    print(json.dumps(report, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
