"""JSON encodings for matrices, models and control specs.

A complex scalar is ``[re, im]`` and a matrix is a row-major list of rows of
such pairs.  Model files look like::

    {"n_qubits": 1, "hamiltonian": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]],
     "dissipators": [...]}
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .control import ControlSpec, named_generator
from .errors import QRelaxError
from .lindblad import LindbladModel
from .operators import is_hermitian


class SchemaError(QRelaxError, ValueError):
    """A JSON document does not match its schema; ``path`` locates the bad field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _COMPLEX}}

MODEL_SCHEMA = {
    "type": "object",
    "required": ["n_qubits", "hamiltonian", "dissipators"],
    "properties": {
        "n_qubits": {"type": "integer", "minimum": 1, "maximum": 5},
        "hamiltonian": _MATRIX,
        "dissipators": {"type": "array", "items": _MATRIX},
        "description": {"type": "string"},
    },
}

CONTROL_SCHEMA = {
    "type": "object",
    "required": ["generators", "u"],
    "properties": {
        "generators": {"type": "array", "items": {"anyOf": [{"type": "string"}, _MATRIX]}},
        "u": {"type": "array", "items": {"type": "number"}},
    },
}


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise SchemaError(f"matrix must be square N x N x [re, im], got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _validate(doc, schema):
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(exc.message, path) from None


def model_to_dict(model: LindbladModel, description: str | None = None) -> dict:
    doc = {
        "n_qubits": model.n_qubits,
        "hamiltonian": encode_matrix(model.hamiltonian),
        "dissipators": [encode_matrix(L) for L in model.dissipators],
    }
    if description:
        doc["description"] = description
    return doc


def model_from_dict(doc) -> LindbladModel:
    _validate(doc, MODEL_SCHEMA)
    dim = 2 ** doc["n_qubits"]
    h = decode_matrix_at(doc["hamiltonian"], "hamiltonian", dim)
    if not is_hermitian(h, 1e-12):
        raise SchemaError("hamiltonian is not Hermitian", "hamiltonian")
    ls = [decode_matrix_at(L, f"dissipators/{k}", dim) for k, L in enumerate(doc["dissipators"])]
    return LindbladModel(h, tuple(ls))


def decode_matrix_at(data, path: str, dim: int) -> np.ndarray:
    try:
        m = decode_matrix(data)
    except (SchemaError, ValueError) as exc:
        raise SchemaError(str(exc), path) from None
    if m.shape != (dim, dim):
        raise SchemaError(f"expected {dim}x{dim}, got {m.shape[0]}x{m.shape[1]}", path)
    return m


def load_model(path) -> LindbladModel:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    return model_from_dict(doc)


def _dump_matrix(m: list, indent: str) -> str:
    rows = ",\n".join(indent + "  " + json.dumps(row) for row in m)
    return "[\n" + rows + "\n" + indent + "]"


def dumps_model(model: LindbladModel, description: str | None = None) -> str:
    """Model JSON with one matrix row per line."""
    doc = model_to_dict(model, description)
    parts = []
    if description:
        parts.append(f'  "description": {json.dumps(description)}')
    parts.append(f'  "n_qubits": {doc["n_qubits"]}')
    parts.append('  "hamiltonian": ' + _dump_matrix(doc["hamiltonian"], "  "))
    ls = ",\n".join("    " + _dump_matrix(L, "    ") for L in doc["dissipators"])
    parts.append('  "dissipators": [\n' + ls + "\n  ]" if ls else '  "dissipators": []')
    return "{\n" + ",\n".join(parts) + "\n}\n"


def save_model(model: LindbladModel, path, description: str | None = None) -> None:
    Path(path).write_text(dumps_model(model, description))


def control_from_dict(doc, n_qubits: int) -> ControlSpec:
    _validate(doc, CONTROL_SCHEMA)
    gens, labels = [], []
    dim = 2 ** n_qubits
    for k, g in enumerate(doc["generators"]):
        if isinstance(g, str):
            try:
                gens.append(named_generator(g, n_qubits))
            except QRelaxError as exc:
                raise SchemaError(str(exc), f"generators/{k}") from None
            labels.append(g)
        else:
            gens.append(decode_matrix_at(g, f"generators/{k}", dim))
            labels.append(f"G{k}")
    if len(doc["u"]) != len(gens):
        raise SchemaError(f"{len(doc['u'])} amplitudes for {len(gens)} generators", "u")
    return ControlSpec(tuple(gens), doc["u"], tuple(labels))


def load_control(path, n_qubits: int) -> ControlSpec:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    return control_from_dict(doc, n_qubits)


BUNDLED_MODELS = ("one_spin", "two_spin", "dephasing")


def bundled_model_path(name: str) -> Path:
    """Path of a model shipped with the package (``one_spin``, ``two_spin``, ``dephasing``)."""
    if name not in BUNDLED_MODELS:
        raise KeyError(f"no bundled model {name!r}; choose from {BUNDLED_MODELS}")
    return Path(str(resources.files("qrelax") / "data" / f"{name}.json"))


def resolve_model_path(spec: str) -> Path:
    """Accept a file path or ``bundled:<name>``."""
    if spec.startswith("bundled:"):
        return bundled_model_path(spec.split(":", 1)[1])
    return Path(spec)
