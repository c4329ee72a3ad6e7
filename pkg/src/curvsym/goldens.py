"""Golden files: frozen values produced by the independent oracles.

The directory defaults to the package's ``goldens/`` folder and can be
overridden with the ``CURVSYM_GOLDENS`` environment variable.  Regenerate
with ``python scripts/make_goldens.py``.
"""
from __future__ import annotations

import json
import os
from itertools import product
from pathlib import Path

import sympy as sp

from . import oracles
from .perm import op_apply, phi
from .polarization import DEFAULT_SEED, nonvacuity_witness, proportionality_check
from .report import jsonable
from .symclass import symmetry_basis
from .tensor import format_rational, inf_norm, tensor_new, tensor_from_dict, tensor_to_dict

DIMS_FILE = "symclass_dims.json"
POLARIZATION_FILE = "polarization_constant.json"
CURVATURE_FILE = "curvature_oracle.json"

FD_BUDGET = 1e-6
CURVATURE_SAMPLE = {"metric": "perturbed-flat", "eps": "1/10", "dim": 3, "point": ["1/2", "0", "0"]}


class GoldenError(RuntimeError):
    pass


def goldens_dir() -> Path:
    env = os.environ.get("CURVSYM_GOLDENS")
    if env:
        return Path(env)
    return Path(__file__).resolve().parent / "goldens"


def load(name: str) -> dict:
    path = goldens_dir() / name
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise GoldenError(f"golden file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise GoldenError(f"golden file {path} is malformed: {exc}") from None


def basis_digest(n: int) -> str:
    basis = symmetry_basis(n)
    return oracles.digest([sorted((c, format_rational(v)) for c, v in vec.items()) for vec in basis.sparse])


def compute_dims(dims=(2, 3, 4, 5, 6)) -> dict:
    out = {"dims": {}, "provenance": {"constraint_nullspace": {}, "projector_image": {}}}
    for n in dims:
        main = symmetry_basis(n).dimension
        other, blocks = oracles.projector_image_dimension(n)
        if main != other:
            raise GoldenError(f"n={n}: constraint nullspace gives {main}, projector image gives {other}")
        out["dims"][str(n)] = main
        out["provenance"]["constraint_nullspace"][str(n)] = basis_digest(n)
        out["provenance"]["projector_image"][str(n)] = oracles.digest(blocks)
    return out


def compute_polarization(dims=(2, 3, 4), trials=50, seed=DEFAULT_SEED) -> dict:
    constants, witnesses = {}, {}
    for n in dims:
        rep = proportionality_check(n, trials, seed)
        if not rep.passed:
            raise GoldenError(f"n={n}: no consistent polarization constant: {rep.witness}")
        constants[str(n)] = format_rational(rep.derived["constant"])
        pos, U, V, X, Y, Z = nonvacuity_witness(n)
        witnesses[str(n)] = {"basis_index": pos, "U": U, "V": V, "X": X, "Y": Y, "Z": Z}
    return {"constant": constants, "seed": seed, "trials": trials, "nonvacuity_witnesses": witnesses}


def compute_curvature_oracle() -> dict:
    sample = CURVATURE_SAMPLE
    n = sample["dim"]
    exact = oracles.perturbed_flat_nabla_R(n, sp.Rational(sample["eps"]), [sp.Rational(p) for p in sample["point"]])
    entries = [str(exact[i][j][k][l][m]) for i, j, k, l, m in product(range(n), repeat=5)]
    T = tensor_new(n, 5, entries)
    tau_exact = inf_norm(T)
    tau_prime_exact = inf_norm(op_apply(phi(), T))
    return {
        **sample,
        "nabla_R": tensor_to_dict(T),
        "nabla_R_norm_exact": format_rational(tau_exact),
        "phi_nabla_R_norm_exact": format_rational(tau_prime_exact),
        # thresholds leave room for the finite-difference error budget
        "tau": float(tau_exact) - FD_BUDGET,
        "tau_prime": float(tau_prime_exact) - 6 * FD_BUDGET,
        "fd_budget": FD_BUDGET,
    }


def curvature_oracle_tensor(data: dict):
    return tensor_from_dict(data["nabla_R"])


def write_all(directory: Path | None = None, include_n6: bool = True) -> list[Path]:
    directory = Path(directory) if directory else goldens_dir()
    directory.mkdir(parents=True, exist_ok=True)
    payloads = {
        DIMS_FILE: compute_dims((2, 3, 4, 5, 6) if include_n6 else (2, 3, 4, 5)),
        POLARIZATION_FILE: compute_polarization(),
        CURVATURE_FILE: compute_curvature_oracle(),
    }
    written = []
    for name, payload in payloads.items():
        path = directory / name
        path.write_text(json.dumps(jsonable(payload), sort_keys=True, indent=2) + "\n", encoding="utf-8")
        written.append(path)
    return written
