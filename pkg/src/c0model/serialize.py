"""JSON file formats for every public type.

Complex scalars are ``[re, im]`` pairs and every float is written with 17
significant digits, so ``loads(dumps(x))`` reproduces the stored doubles
bit for bit.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .corona import CoronaSolution
from .equivalence import MaximalityEntry, MaximalityReport, SimilarityCertificate
from .errors import InvalidInput
from .inner import BlaschkeProduct, RationalFunction, Zero
from .modelspace import JordanModel
from .operators import ContractionOperator

__all__ = [
    "dumps",
    "format_float",
    "to_jsonable",
    "from_jsonable",
    "blaschke_to_dict",
    "blaschke_from_dict",
    "rational_to_dict",
    "rational_from_dict",
    "symbol_from_dict",
    "matrix_to_dict",
    "matrix_from_dict",
    "operator_from_dict",
    "jordan_to_dict",
    "jordan_from_dict",
    "corona_to_dict",
    "corona_from_dict",
    "certificate_to_dict",
    "certificate_from_dict",
    "maximality_to_dict",
    "maximality_from_dict",
    "load",
    "save",
]


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise InvalidInput(f"cannot serialize non-finite value {x}")
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def dumps(obj, indent: int | None = 2) -> str:
    """Serialize plain JSON data (dicts, lists, str, int, float, bool, None)
    with floats at 17 significant digits.  Key order is preserved."""
    out: list[str] = []
    _emit(to_jsonable(obj), out, indent, 0)
    return "".join(out)


def _emit(obj, out, indent, level):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = ", " if indent is None else ","
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            out.append((sep if i else "") + pad + json.dumps(str(k)) + ": ")
            _emit(v, out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        # keep numeric leaves such as [re, im] on one line
        flat = all(isinstance(v, (int, float)) for v in obj)
        out.append("[")
        for i, v in enumerate(obj):
            out.append((", " if flat else sep) if i else "")
            if not flat:
                out.append(pad)
            _emit(v, out, indent, level + 1)
        out.append("]" if flat else end + "]")
    else:
        raise InvalidInput(f"cannot serialize {type(obj).__name__}")


def _pair(z) -> list:
    z = complex(z)
    # + 0.0 folds -0.0 into 0.0 so equal values print identically
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def _complex(p) -> complex:
    if not (isinstance(p, (list, tuple)) and len(p) == 2):
        raise InvalidInput(f"expected a [re, im] pair, got {p!r}")
    return complex(float(p[0]), float(p[1]))


def to_jsonable(obj):
    """Recursively convert numpy values, complex numbers and package types."""
    if isinstance(obj, BlaschkeProduct):
        return blaschke_to_dict(obj)
    if isinstance(obj, RationalFunction):
        return rational_to_dict(obj)
    if isinstance(obj, ContractionOperator):
        return matrix_to_dict(obj.matrix)
    if isinstance(obj, JordanModel):
        return jordan_to_dict(obj)
    if isinstance(obj, CoronaSolution):
        return corona_to_dict(obj)
    if isinstance(obj, SimilarityCertificate):
        return certificate_to_dict(obj)
    if isinstance(obj, MaximalityReport):
        return maximality_to_dict(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return _pair(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise InvalidInput(f"cannot serialize {type(obj).__name__}")


def _require(d, *keys):
    if not isinstance(d, dict):
        raise InvalidInput(f"expected a JSON object, got {type(d).__name__}")
    missing = [k for k in keys if k not in d]
    if missing:
        raise InvalidInput(f"missing field(s): {', '.join(missing)}")


# -- inner functions ---------------------------------------------------------


def blaschke_to_dict(b: BlaschkeProduct) -> dict:
    return {
        "constant": _pair(b.constant),
        "zeros": [
            {"re": zz.location.real + 0.0, "im": zz.location.imag + 0.0, "mult": zz.multiplicity} for zz in b.zeros
        ],
    }


def blaschke_from_dict(d) -> BlaschkeProduct:
    _require(d, "constant", "zeros")
    zeros = []
    for z in d["zeros"]:
        _require(z, "re", "im")
        mult = z.get("mult", 1)
        if isinstance(mult, bool) or not isinstance(mult, int):
            raise InvalidInput(f"multiplicity must be an integer, got {mult!r}")
        zeros.append(Zero(complex(float(z["re"]), float(z["im"])), mult))
    return BlaschkeProduct(_complex(d["constant"]), tuple(zeros))


def rational_to_dict(u: RationalFunction) -> dict:
    return {"num": [_pair(c) for c in u.numerator], "den": [_pair(c) for c in u.denominator]}


def rational_from_dict(d) -> RationalFunction:
    _require(d, "num", "den")
    num = [_complex(c) for c in d["num"]]
    den = [_complex(c) for c in d["den"]]
    if not num or not den:
        raise InvalidInput("num and den must be non-empty")
    return RationalFunction(num, den, reduce=False)


def symbol_from_dict(d):
    """A rational record or a Blaschke record, whichever `d` is."""
    if isinstance(d, dict) and "num" in d:
        return rational_from_dict(d)
    return blaschke_from_dict(d)


# -- operators -----------------------------------------------------------------


def matrix_to_dict(a) -> dict:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInput("only square matrices have a file format")
    return {"n": int(a.shape[0]), "data": [_pair(v) for v in a.ravel()]}


def matrix_from_dict(d) -> np.ndarray:
    _require(d, "n", "data")
    n = d["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InvalidInput(f"n must be a positive integer, got {n!r}")
    if len(d["data"]) != n * n:
        raise InvalidInput(f"expected {n * n} entries, got {len(d['data'])}")
    return np.array([_complex(p) for p in d["data"]], dtype=complex).reshape(n, n)


def operator_from_dict(d) -> ContractionOperator:
    return ContractionOperator(matrix_from_dict(d))


def jordan_to_dict(m: JordanModel) -> dict:
    return {"blocks": [blaschke_to_dict(b) for b in m.blocks]}


def jordan_from_dict(d) -> JordanModel:
    _require(d, "blocks")
    return JordanModel(tuple(blaschke_from_dict(b) for b in d["blocks"]))


# -- results -------------------------------------------------------------------


def corona_to_dict(s: CoronaSolution) -> dict:
    return {
        "u1": rational_to_dict(s.u1),
        "u2": rational_to_dict(s.u2),
        "residual": s.residual,
        "norm1": s.norm1,
        "norm2": s.norm2,
        "delta": s.delta,
    }


def corona_from_dict(d) -> CoronaSolution:
    _require(d, "u1", "u2", "residual", "norm1", "norm2", "delta")
    return CoronaSolution(
        rational_from_dict(d["u1"]),
        rational_from_dict(d["u2"]),
        float(d["residual"]),
        float(d["norm1"]),
        float(d["norm2"]),
        float(d["delta"]),
    )


def certificate_to_dict(c: SimilarityCertificate) -> dict:
    return {
        "X": matrix_to_dict(c.X),
        "residual": c.residual,
        "normX": c.norm_x,
        "normXinv": c.norm_xinv,
        "beta": c.beta,
        "betaPrime": c.beta_prime,
        "trace": to_jsonable(c.trace),
    }


def certificate_from_dict(d) -> SimilarityCertificate:
    _require(d, "X", "residual", "normX", "normXinv", "beta", "betaPrime")
    return SimilarityCertificate(
        matrix_from_dict(d["X"]),
        float(d["residual"]),
        float(d["normX"]),
        float(d["normXinv"]),
        float(d["beta"]),
        float(d["betaPrime"]),
        d.get("trace", {}),
    )


def maximality_to_dict(r: MaximalityReport) -> dict:
    return {
        "theta": blaschke_to_dict(r.theta),
        "entries": [
            {
                "psi": blaschke_to_dict(e.psi),
                "zero": _pair(e.zero),
                "opnorm": e.opnorm,
                "sigma2": e.sigma2,
                "xi": [_pair(v) for v in e.xi],
                "cyclic": bool(e.cyclic),
            }
            for e in r.entries
        ],
    }


def maximality_from_dict(d) -> MaximalityReport:
    _require(d, "theta", "entries")
    entries = []
    for e in d["entries"]:
        _require(e, "psi", "zero", "opnorm", "sigma2", "xi", "cyclic")
        entries.append(
            MaximalityEntry(
                blaschke_from_dict(e["psi"]),
                _complex(e["zero"]),
                float(e["opnorm"]),
                float(e["sigma2"]),
                np.array([_complex(v) for v in e["xi"]], dtype=complex),
                bool(e["cyclic"]),
            )
        )
    return MaximalityReport(blaschke_from_dict(d["theta"]), tuple(entries))


_READERS = {
    "blaschke": blaschke_from_dict,
    "rational": rational_from_dict,
    "symbol": symbol_from_dict,
    "matrix": matrix_from_dict,
    "operator": operator_from_dict,
    "jordan": jordan_from_dict,
    "corona": corona_from_dict,
    "certificate": certificate_from_dict,
    "maximality": maximality_from_dict,
}


def from_jsonable(kind: str, d):
    try:
        reader = _READERS[kind]
    except KeyError:
        raise InvalidInput(f"unknown record kind {kind!r}") from None
    try:
        return reader(d)
    except (TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, InvalidInput):
            raise
        raise InvalidInput(f"malformed {kind} record: {exc}") from exc


def load(path, kind: str):
    """Read a JSON file and parse it as `kind` (see ``_READERS``)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return from_jsonable(kind, data)


def save(obj, path) -> None:
    path = Path(path)
    try:
        path.write_text(dumps(obj) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
