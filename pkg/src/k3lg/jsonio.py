"""JSON payloads.  Rationals are always written as strings ``"p/q"``."""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .arith import format_rational, parse_rational
from .errors import InvalidInput, ParseError
from .hodge import PeriodVector, RealField
from .k3lattice import IntegralLattice, PrimitiveSublattice
from .quadform import INF, QuadSpace


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None


def plain(obj):
    """Recursively convert to JSON-safe values (Fractions become strings)."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if obj is INF:
        return "inf"
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, float):
        raise TypeError("refusing to serialize a float")
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(plain(obj), sort_keys=True, indent=2)


def digest(obj) -> str:
    return hashlib.sha256(json.dumps(plain(obj), sort_keys=True).encode()).hexdigest()


def _matrix(rows, what):
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InvalidInput(f"{what} must be a list of rows")
    return [[parse_rational(x) for x in r] for r in rows]


def quadspace_from_dict(d) -> QuadSpace:
    if not isinstance(d, dict) or "gram" not in d:
        raise InvalidInput('expected {"n": ..., "gram": [[...]]}')
    g = _matrix(d["gram"], "gram")
    if "n" in d and d["n"] != len(g):
        raise InvalidInput(f"n = {d['n']} does not match the Gram matrix size {len(g)}")
    return QuadSpace(g)


def quadspace_to_dict(V: QuadSpace) -> dict:
    return {"n": V.n, "gram": plain(V.gram)}


def lattice_from_dict(d) -> IntegralLattice:
    if not isinstance(d, dict) or "gram" not in d:
        raise InvalidInput('expected {"rank": ..., "gram": [[...]]}')
    g = _matrix(d["gram"], "gram")
    if "rank" in d and d["rank"] != len(g):
        raise InvalidInput(f"rank = {d['rank']} does not match the Gram matrix size {len(g)}")
    return IntegralLattice(g)


def lattice_to_dict(L: IntegralLattice) -> dict:
    return {"rank": L.rank, "gram": [list(r) for r in L.gram]}


def sublattice_to_dict(T: PrimitiveSublattice) -> dict:
    return {
        "rank": T.rank,
        "ambient_rank": T.ambient_rank,
        "basis": [list(r) for r in T.basis],
        "gram": [list(r) for r in T.gram],
        "elementary_divisors": list(T.elementary_divisors),
    }


def _element(K: RealField, v):
    # a rational, or a list of rationals c0, c1, ... meaning c0 + c1 alpha + ...
    if isinstance(v, list):
        return K.element([parse_rational(c) for c in v])
    return K.element(parse_rational(v))


def period_from_dict(d) -> PeriodVector:
    if not isinstance(d, dict):
        raise InvalidInput("period must be a JSON object")
    mode = d.get("mode")
    x, y = d.get("x"), d.get("y")
    if not isinstance(x, list) or not isinstance(y, list):
        raise InvalidInput("period needs lists x and y")
    if mode == "exact":
        fd = d.get("field")
        K = RealField.rationals() if fd is None else RealField(
            [parse_rational(c) for c in fd["min_poly"]], [parse_rational(t) for t in fd["interval"]]
        )
        return PeriodVector("exact", tuple(_element(K, v) for v in x), tuple(_element(K, v) for v in y),
                            K, _element(K, d.get("d", "1")))
    if mode == "approx":
        tau = parse_rational(d["tau"]) if "tau" in d else None
        return PeriodVector.approx([parse_rational(v) for v in x], [parse_rational(v) for v in y],
                                   *(() if tau is None else (tau,)))
    raise InvalidInput("period mode must be 'exact' or 'approx'")


def period_to_dict(w: PeriodVector) -> dict:
    if w.mode == "approx":
        return {"mode": "approx", "x": plain(w.x), "y": plain(w.y), "tau": plain(w.tau)}
    K = w.field

    def el(e):
        return plain(e[0]) if K.degree == 1 else plain(list(e))

    out = {"mode": "exact", "x": [el(v) for v in w.x], "y": [el(v) for v in w.y], "d": el(w.d)}
    if K.degree > 1:
        out["field"] = {"min_poly": plain(K.min_poly), "interval": plain(K.interval)}
    return out
