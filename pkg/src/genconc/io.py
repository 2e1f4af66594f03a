"""JSON state and density-matrix files.

State file::

    {"kind": "fermion", "L": 2, "N": 4, "basis": "slater",
     "amplitudes": [{"index": [1, 2], "re": 0.7071067811865476, "im": 0.0}, ...]}

``basis`` is ``"product-tensor"`` (index = L single-particle labels),
``"occupation"`` (index = N occupation numbers) or ``"slater"`` (index =
strictly increasing L labels). Labels are 1-based in files.

Density file::

    {"kind": "distinguishable", "L": 2, "N": 2, "matrix": [[[re, im], ...], ...]}

Floats are written with ``repr`` precision, so a write/read cycle is exact.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .states import MixedState, PureState, bosonic_state, slater_state
from .tensor_core import Kind, SystemShape

BASES = ("product-tensor", "occupation", "slater")


def _shape(doc: dict) -> SystemShape:
    try:
        return SystemShape(Kind(doc["kind"]), int(doc["L"]), int(doc["N"]))
    except KeyError as exc:
        raise ValidationError(f"missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad shape fields: {exc}") from None


def _amplitude_map(doc: dict) -> dict[tuple[int, ...], complex]:
    entries = doc.get("amplitudes")
    if not isinstance(entries, list) or not entries:
        raise ValidationError("'amplitudes' must be a nonempty list")
    out: dict[tuple[int, ...], complex] = {}
    for e in entries:
        try:
            idx = tuple(int(i) for i in e["index"])
            z = complex(float(e.get("re", 0.0)), float(e.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed amplitude entry {e!r}: {exc}") from None
        if idx in out:
            raise ValidationError(f"duplicate index {list(idx)}")
        out[idx] = z
    return out


def state_from_dict(doc: dict) -> PureState:
    shape = _shape(doc)
    basis = doc.get("basis", "product-tensor")
    amps = _amplitude_map(doc)
    L, N = shape.L, shape.N
    if basis == "product-tensor":
        v = np.zeros(shape.dim, dtype=complex)
        for idx, z in amps.items():
            if len(idx) != L or any(not 1 <= i <= N for i in idx):
                raise ValidationError(f"index {list(idx)} invalid for L={L}, N={N}")
            v[np.ravel_multi_index(tuple(i - 1 for i in idx), (N,) * L)] = z
        return PureState(shape, v)
    if basis == "occupation":
        if shape.kind is not Kind.BOSON:
            raise ValidationError("occupation basis requires kind 'boson'")
        return bosonic_state(L, N, amps)
    if basis == "slater":
        if shape.kind is not Kind.FERMION:
            raise ValidationError("slater basis requires kind 'fermion'")
        return slater_state(L, N, {tuple(i - 1 for i in idx): z for idx, z in amps.items()})
    raise ValidationError(f"unknown basis {basis!r}; expected one of {BASES}")


def state_to_dict(psi: PureState) -> dict:
    N, L = psi.N, psi.L
    entries = []
    for flat in np.flatnonzero(psi.amplitudes):
        z = psi.amplitudes[flat]
        idx = np.unravel_index(flat, (N,) * L)
        entries.append({"index": [int(i) + 1 for i in idx], "re": float(z.real), "im": float(z.imag)})
    return {"kind": psi.kind.value, "L": L, "N": N, "basis": "product-tensor", "amplitudes": entries}


def density_from_dict(doc: dict) -> MixedState:
    shape = _shape(doc)
    try:
        m = np.array(doc["matrix"], dtype=float)
    except KeyError:
        raise ValidationError("missing field 'matrix'") from None
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix: {exc}") from None
    if m.shape != (shape.dim, shape.dim, 2):
        raise ValidationError(f"matrix must be {shape.dim}x{shape.dim} of [re, im] pairs")
    return MixedState(shape, m[..., 0] + 1j * m[..., 1])


def density_to_dict(rho: MixedState) -> dict:
    m = rho.matrix
    return {"kind": rho.kind.value, "L": rho.L, "N": rho.N,
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m]}


def load_document(path: str | os.PathLike) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from None
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: top level must be an object")
    return doc


def load(path: str | os.PathLike) -> PureState | MixedState:
    """Read either file type; density files are recognized by their ``matrix`` field."""
    doc = load_document(path)
    return density_from_dict(doc) if "matrix" in doc else state_from_dict(doc)


def to_dict(obj: PureState | MixedState) -> dict:
    return state_to_dict(obj) if isinstance(obj, PureState) else density_to_dict(obj)


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def save(obj: PureState | MixedState, path: str | os.PathLike) -> None:
    write_atomic(path, json.dumps(to_dict(obj), indent=1) + "\n")
