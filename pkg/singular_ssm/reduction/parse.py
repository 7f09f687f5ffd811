"""
Model, reduced-model and observation file I/O.

Model files are JSON documents:

    {"kind": "model", "n": 2, "ell": 1, "r": 0, "T": 3,
     "phi": [...], "q": [...], "c": [...], "f": [...], "seed": 7}

Each of phi, q, c, f is either a list of T+1 matrices (nested lists of rows)
or a single matrix, which is repeated at every step.

Reduced-model files store every matrix as {"shape": [rows, cols], "data": [...]}
so that empty blocks keep their shape.

Observation files are CSV with one row per time step and columns y0, y1, ...
(other columns, such as t or x0, are ignored).
"""

import json
from dataclasses import fields
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from singular_ssm.reduction.main import ReducedModel, ReducedStep
from singular_ssm.reduction.model import StateSpaceModel
from singular_ssm.utils.errors import DimensionMismatch, ModelParseError
from singular_ssm.utils.logging import get_logger
from singular_ssm.utils.table import vector_columns, write_table

logger = get_logger()

MODEL_FIELDS = {"phi": "Phi", "q": "Qmat", "c": "Cmat", "f": "Fmat"}


class ModelParser:
    """Parser for model and reduced-model documents."""

    def __init__(self, dtype=None):
        """
        Initialize the parser.

        Args:
            dtype: Floating-point type of parsed matrices. When None, models
                load as float64 and reduced models keep the dtype they were written in.
        """
        self.dtype = dtype

    def _load_json(self, text: str) -> dict:
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise ModelParseError(f"invalid JSON: {e.msg}", line=e.lineno) from e
        if not isinstance(document, dict):
            raise ModelParseError("top level must be an object")
        return document

    def _count(self, document: dict, key: str) -> int:
        if key not in document:
            raise ModelParseError("missing", field=key)
        value = document[key]
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise ModelParseError(f"must be a nonnegative integer, got {value!r}", field=key)
        return value

    def _matrices(self, value: Any, key: str, shape: tuple[int, int], steps: int) -> list[np.ndarray]:
        """Parse a list of T+1 matrices, or a single matrix repeated T+1 times."""
        try:
            array = np.asarray(value, dtype=np.float64 if self.dtype is None else self.dtype)
        except (ValueError, TypeError) as e:
            raise ModelParseError(f"not a rectangular numeric array: {e}", field=key) from e

        if 0 in shape and array.size == 0:
            return [np.zeros(shape, dtype=array.dtype) for _ in range(steps)]
        if array.ndim == 2:
            array = np.broadcast_to(array, (steps,) + array.shape)
        if array.ndim != 3:
            raise ModelParseError(f"expected a matrix or a list of matrices, got {array.ndim}-d data", field=key)
        if array.shape[0] != steps:
            raise ModelParseError(f"expected {steps} matrices (T+1), got {array.shape[0]}", field=key)
        if array.shape[1:] != shape:
            raise ModelParseError(f"matrices have shape {array.shape[1:]}, expected {shape}", field=key)
        return [np.array(a) for a in array]

    def parse_model_text(self, text: str) -> StateSpaceModel:
        """
        Parse a model document.

        Args:
            text: JSON document

        Returns:
            StateSpaceModel

        Raises:
            ModelParseError: with the offending field or line
        """
        document = self._load_json(text)
        kind = document.get("kind", "model")
        if kind != "model":
            raise ModelParseError(f"expected kind 'model', got '{kind}'", field="kind")

        n, ell, r, T = (self._count(document, key) for key in ("n", "ell", "r", "T"))
        if ell + r > n:
            raise ModelParseError(f"need ell + r <= n, got ell={ell}, r={r}, n={n}", field="ell")
        shapes = {"phi": (n, n), "q": (n, n), "c": (ell + r, n), "f": (ell + r, r)}

        mats = {}
        for key, attr in MODEL_FIELDS.items():
            if key not in document:
                raise ModelParseError("missing", field=key)
            mats[attr] = self._matrices(document[key], key, shapes[key], T + 1)

        seed = document.get("seed")
        try:
            return StateSpaceModel(n=n, ell=ell, r=r, T=T, seed=seed, **mats)
        except DimensionMismatch as e:
            raise ModelParseError(str(e)) from e

    def parse_reduced_text(self, text: str) -> ReducedModel:
        """Parse a reduced-model document written by write_reduced."""
        document = self._load_json(text)
        if document.get("kind") != "reduced":
            raise ModelParseError(f"expected kind 'reduced', got '{document.get('kind')}'", field="kind")
        n, ell, r, T = (self._count(document, key) for key in ("n", "ell", "r", "T"))
        try:
            dtype = np.dtype(document.get("dtype", "float64") if self.dtype is None else self.dtype)
        except TypeError as e:
            raise ModelParseError(f"unknown dtype: {e}", field="dtype") from e

        raw_steps = document.get("steps")
        if not isinstance(raw_steps, list) or len(raw_steps) != T + 1:
            raise ModelParseError(f"expected a list of {T + 1} steps", field="steps")

        steps = []
        for t, raw in enumerate(raw_steps):
            entries = {}
            for f in fields(ReducedStep):
                encoded = raw.get(f.name)
                if encoded is None:
                    entries[f.name] = None
                    continue
                try:
                    entries[f.name] = np.asarray(encoded["data"], dtype=dtype).reshape(encoded["shape"])
                except (KeyError, TypeError, ValueError) as e:
                    raise ModelParseError(f"malformed matrix at step {t}: {e}", field=f.name) from e
            try:
                steps.append(ReducedStep(**entries))
            except TypeError as e:
                raise ModelParseError(f"incomplete step {t}: {e}", field="steps") from e

        return ReducedModel(n=n, ell=ell, r=r, T=T, steps=tuple(steps))

    def parse_file(self, path: str | Path) -> StateSpaceModel | ReducedModel:
        """
        Read a model or a reduced model, dispatching on the document's kind.

        Args:
            path: Path to the JSON file

        Returns:
            StateSpaceModel or ReducedModel
        """
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise ModelParseError(f"cannot read {path}: {e}") from e

        kind = self._load_json(text).get("kind", "model")
        if kind == "reduced":
            result = self.parse_reduced_text(text)
        else:
            result = self.parse_model_text(text)
        logger.info(f"Loaded {kind} from {path} (n={result.n}, ell={result.ell}, r={result.r}, T={result.T})")
        return result


def _encode(matrix: np.ndarray | None) -> dict | None:
    if matrix is None:
        return None
    return {"shape": list(matrix.shape), "data": matrix.reshape(-1).tolist()}


def model_document(model: StateSpaceModel) -> dict:
    """JSON-ready document of a model."""
    document = {"kind": "model", "n": model.n, "ell": model.ell, "r": model.r, "T": model.T}
    for key, attr in MODEL_FIELDS.items():
        document[key] = [mat.tolist() for mat in getattr(model, attr)]
    if model.seed is not None:
        document["seed"] = model.seed
    return document


def write_model(model: StateSpaceModel, path: str | Path) -> Path:
    """Write a model file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(model_document(model)))
    return path


def write_reduced(red: ReducedModel, path: str | Path) -> Path:
    """Write a reduced-model file (floats in shortest round-trip form)."""
    document = {
        "kind": "reduced",
        "n": red.n, "ell": red.ell, "r": red.r, "T": red.T,
        "dtype": str(red[0].Vc.dtype),
        "steps": [{f.name: _encode(getattr(step, f.name)) for f in fields(ReducedStep)} for step in red.steps],
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document))
    return path


def read_observations(path: str | Path, m: int, steps: int, dtype=np.float64) -> np.ndarray:
    """
    Read observations from CSV.

    Args:
        path: CSV file with columns y0..y{m-1} (extra columns are ignored)
        m: Observation dimension
        steps: Expected number of rows (T+1)
        dtype: Floating-point type of the result

    Returns:
        steps x m array

    Raises:
        ModelParseError: missing columns, wrong row count or an entry that is not a finite number
    """
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except (OSError, ValueError, pd.errors.ParserError) as e:
        raise ModelParseError(f"cannot read observations from {path}: {e}") from e

    columns = vector_columns("y", m)
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise ModelParseError(f"missing observation columns {missing}", field=missing[0])
    if len(frame) != steps:
        raise ModelParseError(f"expected {steps} observation rows (T+1), got {len(frame)}", line=len(frame) + 1)

    values = frame[columns]
    numeric = values.apply(pd.to_numeric, errors="coerce")
    bad = ~np.isfinite(numeric.to_numpy(dtype=np.float64))
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise ModelParseError("missing, non-numeric or non-finite entry", field=columns[col], line=int(row) + 2)
    return numeric.to_numpy(dtype=dtype)


def write_trajectory(x: np.ndarray, y: np.ndarray, path: str | Path) -> Path:
    """Write states and observations as CSV with columns t, x0.., y0.."""
    frame = pd.DataFrame({"t": np.arange(y.shape[0])})
    frame = pd.concat([
        frame,
        pd.DataFrame(x, columns=vector_columns("x", x.shape[1])),
        pd.DataFrame(y, columns=vector_columns("y", y.shape[1])),
    ], axis=1)
    return write_table(frame, path)
