"""Loading of the JSON file formats consumed by the CLI.

Matrix-spec object:
    { "rows": "inf" | int, "cols": "inf" | int,
      "kind": "dense" | "expr" | "banded" | "diag" | "finite-support",
      "expr": "<formula in i, j>"            (kinds expr, diag, finite-support)
      "bands": {"<signed offset>": "<formula>"}   (kind banded)
      "data": [[...], ...]                    (kind dense)
      "support": {"rows": int, "cols": int}   (kind finite-support)
      "decay": {"kind": "geometric", "C": num, "r": num}   (optional) }

Vector object: {"kind": "expr", "expr": "<formula in i>"} or
               {"kind": "dense", "data": [...]}
System file:   {"A": <matrix>, "b": <vector>, "wanted": [ints]?}
Family file:   {"count": "inf" | int, "vectors": <matrix-like, i = vector
                index, j = coordinate index>}
"""

import json

import numpy as np

from . import expr_dsl
from .algebra import Vector
from .bases_orth import BasisFamily
from .errors import SchemaError
from .matrix_core import (DecayCertificate, DenseMatrix, Extent, INFINITE,
                          MatrixSpec, banded_spec, diagonal_spec,
                          entrywise_spec, finite_support_spec,
                          is_finite_extent, spot_check_decay)

_MATRIX_KINDS = ("dense", "expr", "banded", "diag", "finite-support")


def _load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from exc


def _parse_extent(value, name) -> Extent:
    if value == "inf":
        return INFINITE
    if isinstance(value, int) and not isinstance(value, bool) and value >= 1:
        return value
    raise SchemaError(f"{name} must be a positive integer or \"inf\", got {value!r}")


def _require(obj, key, ctx):
    if key not in obj:
        raise SchemaError(f"{ctx}: missing required field {key!r}")
    return obj[key]


def matrix_from_obj(obj, ctx="matrix spec") -> MatrixSpec:
    if not isinstance(obj, dict):
        raise SchemaError(f"{ctx}: expected an object")
    kind = _require(obj, "kind", ctx)
    if kind not in _MATRIX_KINDS:
        raise SchemaError(f"{ctx}: unknown kind {kind!r}")

    if kind == "dense":
        data = _require(obj, "data", ctx)
        try:
            dm = DenseMatrix(data)
        except Exception as exc:
            raise SchemaError(f"{ctx}: bad dense data ({exc})") from exc
        for axis, declared in (("rows", dm.m), ("cols", dm.n)):
            if axis in obj and obj[axis] != declared:
                raise SchemaError(f"{ctx}: {axis} = {obj[axis]} does not match "
                                  f"data shape {dm.m}x{dm.n}")
        spec = dm.as_spec()
    else:
        rows = _parse_extent(_require(obj, "rows", ctx), "rows")
        cols = _parse_extent(_require(obj, "cols", ctx), "cols")
        if kind == "expr":
            oracle = expr_dsl.compile_entry(_require(obj, "expr", ctx))
            spec = entrywise_spec(oracle, rows, cols)
        elif kind == "diag":
            entry2 = expr_dsl.compile_entry(_require(obj, "expr", ctx))

            def diag_fn(i, _e=entry2):
                return _e(i, i)

            spec = diagonal_spec(diag_fn, rows)
        elif kind == "banded":
            raw = _require(obj, "bands", ctx)
            if not isinstance(raw, dict) or not raw:
                raise SchemaError(f"{ctx}: bands must be a non-empty object")
            bands = {}
            for off_text, formula in raw.items():
                try:
                    off = int(off_text)
                except ValueError:
                    raise SchemaError(f"{ctx}: band offset {off_text!r} is not an integer")
                bands[off] = expr_dsl.compile_entry(formula)
            spec = banded_spec(bands, rows, cols)
        else:  # finite-support
            sup = _require(obj, "support", ctx)
            if not (isinstance(sup, dict) and "rows" in sup and "cols" in sup):
                raise SchemaError(f"{ctx}: support must carry rows and cols")
            oracle = expr_dsl.compile_entry(_require(obj, "expr", ctx))
            spec = finite_support_spec(oracle, int(sup["rows"]), int(sup["cols"]),
                                       rows, cols)

    if "decay" in obj and obj["decay"] is not None:
        d = obj["decay"]
        if not isinstance(d, dict) or d.get("kind") != "geometric":
            raise SchemaError(f"{ctx}: decay must be {{kind: geometric, C, r}}")
        try:
            cert = DecayCertificate(float(_require(d, "C", ctx)),
                                    float(_require(d, "r", ctx)))
        except Exception as exc:
            raise SchemaError(f"{ctx}: bad decay certificate ({exc})") from exc
        spec = MatrixSpec(spec.rows, spec.cols, spec.entry, structure=spec.structure,
                          decay=cert, bandwidth=spec.bandwidth, support=spec.support)
        spot_check_decay(spec, samples=32, rng=np.random.default_rng(12345))
    return spec


def load_matrix_file(path) -> MatrixSpec:
    return matrix_from_obj(_load_json(path), ctx=str(path))


def vector_from_obj(obj, extent: Extent, ctx="vector spec") -> Vector:
    if not isinstance(obj, dict):
        raise SchemaError(f"{ctx}: expected an object")
    kind = _require(obj, "kind", ctx)
    if kind == "dense":
        data = list(_require(obj, "data", ctx))
        if is_finite_extent(extent):
            if len(data) != extent:
                raise SchemaError(f"{ctx}: expected {extent} entries, got {len(data)}")
            return Vector.from_values(data)
        values = np.array(data, dtype=float)

        def entry(i, _v=values):
            return float(_v[i - 1]) if i <= len(_v) else 0.0

        return Vector(INFINITE, entry)
    if kind == "expr":
        oracle = expr_dsl.compile_index(_require(obj, "expr", ctx))
        return Vector(extent, oracle)
    raise SchemaError(f"{ctx}: unknown vector kind {kind!r}")


def load_system_file(path):
    obj = _load_json(path)
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: expected an object")
    A = matrix_from_obj(_require(obj, "A", str(path)), ctx=f"{path}: A")
    b = vector_from_obj(_require(obj, "b", str(path)), A.rows, ctx=f"{path}: b")
    wanted = obj.get("wanted")
    if wanted is not None:
        if (not isinstance(wanted, list) or
                any(not isinstance(w, int) or isinstance(w, bool) or w < 1
                    for w in wanted)):
            raise SchemaError(f"{path}: wanted must be a list of indices >= 1")
    return A, b, wanted


def family_from_obj(obj, ctx="family spec") -> BasisFamily:
    if not isinstance(obj, dict):
        raise SchemaError(f"{ctx}: expected an object")
    count = _parse_extent(_require(obj, "count", ctx), "count")
    vectors = _require(obj, "vectors", ctx)
    if not isinstance(vectors, dict):
        raise SchemaError(f"{ctx}: vectors must be an object")
    kind = _require(vectors, "kind", ctx)
    if kind == "dense":
        dm = DenseMatrix(_require(vectors, "data", ctx))
        if is_finite_extent(count) and dm.m != count:
            raise SchemaError(f"{ctx}: count {count} does not match {dm.m} rows")

        def vec_at_dense(i, _dm=dm):
            return Vector.from_values(_dm.data[i - 1])

        return BasisFamily(dm.m, vec_at_dense)
    if kind == "expr":
        oracle = expr_dsl.compile_entry(_require(vectors, "expr", ctx))

        def vec_at(i, _o=oracle):
            def entry(j, _i=i):
                return _o(_i, j)

            return Vector(INFINITE, entry)

        return BasisFamily(count, vec_at)
    raise SchemaError(f"{ctx}: unknown vectors kind {kind!r}")


def load_family_file(path) -> BasisFamily:
    return family_from_obj(_load_json(path), ctx=str(path))
