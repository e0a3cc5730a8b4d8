"""File formats: pgf and polynomial JSON, CSV matrices, byte-stable reports."""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .errors import StructuralError
from .pgf import JointPGF, make_pgf
from .poly import Polynomial

SIG_DIGITS = 12


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(s) -> Fraction:
    try:
        return Fraction(str(s).strip())
    except (ValueError, ZeroDivisionError):
        raise StructuralError(f"not an exact rational: {s!r}") from None


# -- pgf / polynomial JSON ----------------------------------------------------

def pgf_to_dict(f: JointPGF) -> dict:
    return {"dim": f.dim,
            "terms": [{"exp": list(r), "p": fraction_str(p)} for r, p in f.items()]}


def pgf_from_dict(d: dict) -> JointPGF:
    try:
        dim = int(d["dim"])
        terms = [(tuple(int(x) for x in t["exp"]), parse_fraction(t["p"])) for t in d["terms"]]
    except (KeyError, TypeError) as exc:
        raise StructuralError(f"malformed pgf JSON: missing {exc}") from None
    return make_pgf(dim, terms)


def poly_to_dict(p: Polynomial) -> dict:
    return {"coeffs": [fraction_str(c) for c in p.coeffs]}


def poly_from_dict(d: dict) -> Polynomial:
    try:
        return Polynomial(parse_fraction(c) for c in d["coeffs"])
    except (KeyError, TypeError):
        raise StructuralError("malformed polynomial JSON: expected {\"coeffs\": [...]}") from None


def read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise StructuralError(f"{path}: invalid JSON ({exc})") from None


def read_pgf(path) -> JointPGF:
    return pgf_from_dict(read_json(path))


def read_polynomial(path) -> Polynomial:
    d = read_json(path)
    if "coeffs" not in d and "terms" in d:
        return pgf_from_dict(d).to_polynomial()
    return poly_from_dict(d)


# -- CSV ------------------------------------------------------------------------

def _rows(path) -> list[list[str]]:
    with open(path, newline="") as fh:
        return [[c.strip() for c in row] for row in csv.reader(fh) if any(c.strip() for c in row)]


def read_matrix(path) -> list[list[Fraction]] | np.ndarray:
    """Square matrix from CSV; exact Fractions when every cell parses as one."""
    rows = _rows(path)
    if not rows or any(len(r) != len(rows) for r in rows):
        raise StructuralError(f"{path}: expected a square matrix")
    try:
        return [[Fraction(c) for c in r] for r in rows]
    except (ValueError, ZeroDivisionError):
        try:
            return np.array([[float(c) for c in r] for r in rows])
        except ValueError as exc:
            raise StructuralError(f"{path}: {exc}") from None


def parse_complex(s: str) -> complex:
    """'re+imi' style entries, e.g. '0.5', '0.25-0.1i', '-1e-3+2i'."""
    t = s.strip().replace(" ", "")
    if t.endswith("i"):
        t = t[:-1] + "j"
    try:
        return complex(t)
    except ValueError:
        raise StructuralError(f"not a complex number: {s!r}") from None


def read_kernel(path) -> np.ndarray:
    rows = _rows(path)
    if not rows or any(len(r) != len(rows) for r in rows):
        raise StructuralError(f"{path}: expected a square kernel")
    return np.array([[parse_complex(c) for c in r] for r in rows])


def format_complex(z: complex) -> str:
    return f"{z.real:.{SIG_DIGITS}g}{z.imag:+.{SIG_DIGITS}g}i"


# -- byte-stable JSON --------------------------------------------------------------

def _round(x: float):
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.{SIG_DIGITS}g}")


def to_jsonable(obj):
    """Plain JSON types with floats rounded to 12 significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _round(obj.real), "im": _round(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, JointPGF):
        return pgf_to_dict(obj)
    if isinstance(obj, Polynomial):
        return poly_to_dict(obj)
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"
