"""
Export utilities for trajectories, success tables and run summaries
"""
import json
import math
import sys
from typing import Any, Optional, Sequence, Tuple

import numpy as np
import pandas as pd


def csv_text(df: pd.DataFrame, schema: Tuple[str, int], columns: Sequence[str]) -> str:
    """
    Render a DataFrame as versioned CSV text

    Args:
        df: Data to export
        schema: (name, version) written as a leading '# schema:' comment
        columns: Fixed column order

    Returns:
        CSV text with LF line endings
    """
    name, version = schema
    body = df[list(columns)].to_csv(index=False, lineterminator='\n')
    return f"# schema: {name} v{version}\n{body}"


def export_to_csv(
    df: pd.DataFrame,
    schema: Tuple[str, int],
    columns: Sequence[str],
    path: Optional[str] = None
) -> str:
    """
    Write versioned CSV to a file (UTF-8, LF) or stdout

    Args:
        df: Data to export
        schema: (name, version)
        columns: Fixed column order
        path: Output file; stdout when None

    Returns:
        The CSV text written
    """
    text = csv_text(df, schema, columns)
    _write(text, path)
    return text


def _json_default(value: Any):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def _finite_or_null(value: Any):
    if isinstance(value, dict):
        return {key: _finite_or_null(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite_or_null(item) for item in value]
    if isinstance(value, np.ndarray):
        return _finite_or_null(value.tolist())
    if isinstance(value, (float, np.floating)) and not math.isfinite(value):
        return None
    return value


def json_text(payload: Any) -> str:
    """Deterministic JSON (sorted keys, numpy-aware, non-finite floats written as null)"""
    return json.dumps(_finite_or_null(payload), indent=2, sort_keys=True, allow_nan=False, default=_json_default) + "\n"


def export_to_json(payload: Any, path: Optional[str] = None) -> str:
    """
    Write JSON to a file (UTF-8, LF) or stdout

    Args:
        payload: JSON-serializable data (numpy values allowed)
        path: Output file; stdout when None

    Returns:
        The JSON text written
    """
    text = json_text(payload)
    _write(text, path)
    return text


def _write(text: str, path: Optional[str]):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text)
