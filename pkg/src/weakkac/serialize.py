"""JSON file format for algebras, actions, crossed products and reports.

Complex entries are stored as two-element [re, im] lists; floats use the
shortest decimal that round-trips, so serialize-then-parse reproduces every
tensor bit for bit.  Malformed input raises ParseError with the document
path of the offending node.
"""

from __future__ import annotations

import json
import math
import sys
from typing import Any

import numpy as np

from .algebra import FiniteStarAlgebra
from .config import ParseError, ToleranceConfig
from .crossed import ActionSpec, CrossedProduct
from .report import Check, Report
from .weak_kac import WeakKacAlgebra

FORMAT_VERSION = "1"

_KINDS = ("star_algebra", "weak_kac", "action", "crossed_product", "report")


def _encode_array(arr: np.ndarray) -> Any:
    a = np.asarray(arr, complex)
    if a.ndim == 0:
        re, im = float(a.real), float(a.imag)
        if not (math.isfinite(re) and math.isfinite(im)):
            raise ParseError("refusing to serialize a non-finite entry")
        return [re, im]
    return [_encode_array(sub) for sub in a]


def _decode_array(node: Any, shape: tuple[int, ...], path: str) -> np.ndarray:
    if not shape:
        if (not isinstance(node, list) or len(node) != 2
                or not all(isinstance(x, (int, float)) and
                           not isinstance(x, bool) for x in node)):
            raise ParseError(f"{path}: expected a 2-element [re, im] pair")
        re, im = float(node[0]), float(node[1])
        if not (math.isfinite(re) and math.isfinite(im)):
            raise ParseError(f"{path}: non-finite entry")
        return np.complex128(complex(re, im))
    if not isinstance(node, list):
        raise ParseError(f"{path}: expected an array of length {shape[0]}")
    if len(node) != shape[0]:
        raise ParseError(f"{path}: expected length {shape[0]}, got {len(node)}")
    out = np.empty(shape, dtype=complex)
    for i, sub in enumerate(node):
        out[i] = _decode_array(sub, shape[1:], f"{path}[{i}]")
    return out


def _jsonify(value: Any) -> Any:
    """Plain JSON value for report payloads; complex becomes [re, im]."""
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        out = float(value)
        if not math.isfinite(out):
            raise ParseError("refusing to serialize a non-finite value")
        return out
    if isinstance(value, (complex, np.complexfloating)):
        return _encode_array(np.asarray(value))
    if isinstance(value, np.ndarray):
        return _encode_array(value)
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    return str(value)


def _get(doc: dict, key: str, kind: Any, path: str) -> Any:
    if key not in doc:
        raise ParseError(f"{path}: missing field '{key}'")
    val = doc[key]
    label = kind.__name__ if isinstance(kind, type) else "number"
    if isinstance(val, bool) and kind is not bool:
        raise ParseError(f"{path}.{key}: expected {label}")
    if not isinstance(val, kind):
        raise ParseError(f"{path}.{key}: expected {label}")
    return val


def _name_of(doc: dict) -> str:
    meta = doc.get("metadata")
    if isinstance(meta, dict) and isinstance(meta.get("name"), str):
        return meta["name"]
    return ""


def _with_meta(doc: dict, name: str) -> dict:
    if name:
        doc["metadata"] = {"name": name}
    return doc


def _encode_star_algebra(alg: FiniteStarAlgebra) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "star_algebra",
        "dim": alg.dim,
        "tensors": {
            "mult": _encode_array(alg.mult),
            "unit": _encode_array(alg.unit),
            "invol": _encode_array(alg.invol),
        },
    }
    return _with_meta(doc, alg.name)


def _decode_star_algebra(doc: dict, path: str) -> FiniteStarAlgebra:
    d = _get(doc, "dim", int, path)
    if d <= 0:
        raise ParseError(f"{path}.dim: must be positive")
    tensors = _get(doc, "tensors", dict, path)
    tp = f"{path}.tensors"
    return FiniteStarAlgebra(
        mult=_decode_array(_get(tensors, "mult", list, tp), (d, d, d),
                           f"{tp}.mult"),
        unit=_decode_array(_get(tensors, "unit", list, tp), (d,),
                           f"{tp}.unit"),
        invol=_decode_array(_get(tensors, "invol", list, tp), (d, d),
                            f"{tp}.invol"),
        name=_name_of(doc),
    )


def _encode_weak_kac(wka: WeakKacAlgebra) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "weak_kac",
        "dim": wka.dim,
        "tensors": {
            "mult": _encode_array(wka.alg.mult),
            "unit": _encode_array(wka.alg.unit),
            "invol": _encode_array(wka.alg.invol),
            "comult": _encode_array(wka.comult),
            "counit": _encode_array(wka.counit),
            "antipode": _encode_array(wka.antipode),
        },
    }
    return _with_meta(doc, wka.name)


def _decode_weak_kac(doc: dict, path: str) -> WeakKacAlgebra:
    d = _get(doc, "dim", int, path)
    if d <= 0:
        raise ParseError(f"{path}.dim: must be positive")
    tensors = _get(doc, "tensors", dict, path)
    tp = f"{path}.tensors"
    name = _name_of(doc)
    alg = FiniteStarAlgebra(
        mult=_decode_array(_get(tensors, "mult", list, tp), (d, d, d),
                           f"{tp}.mult"),
        unit=_decode_array(_get(tensors, "unit", list, tp), (d,),
                           f"{tp}.unit"),
        invol=_decode_array(_get(tensors, "invol", list, tp), (d, d),
                            f"{tp}.invol"),
        name=name,
    )
    return WeakKacAlgebra(
        alg=alg,
        comult=_decode_array(_get(tensors, "comult", list, tp), (d, d, d),
                             f"{tp}.comult"),
        counit=_decode_array(_get(tensors, "counit", list, tp), (d,),
                             f"{tp}.counit"),
        antipode=_decode_array(_get(tensors, "antipode", list, tp), (d, d),
                               f"{tp}.antipode"),
        name=name,
    )


def _encode_action(act: ActionSpec) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "action",
        "side": act.side,
        "acting": _encode_weak_kac(act.wka),
        "module": _encode_star_algebra(act.module),
        "tensor": _encode_array(act.tensor),
    }
    return _with_meta(doc, act.name)


def _decode_action(doc: dict, path: str) -> ActionSpec:
    side = _get(doc, "side", str, path)
    if side not in ("left", "right"):
        raise ParseError(f"{path}.side: expected 'left' or 'right'")
    wka = _decode_weak_kac(_get(doc, "acting", dict, path), f"{path}.acting")
    module = _decode_star_algebra(_get(doc, "module", dict, path),
                                  f"{path}.module")
    tensor = _decode_array(_get(doc, "tensor", list, path),
                           (wka.dim, module.dim, module.dim), f"{path}.tensor")
    return ActionSpec(wka, module, tensor, side=side, name=_name_of(doc))


def _encode_crossed(cp: CrossedProduct) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "crossed_product",
        "action": _encode_action(cp.action),
        "algebra": _encode_star_algebra(cp.algebra),
        "projection": _encode_array(cp.projection),
        "section": _encode_array(cp.section),
        "relations": _encode_array(cp.relations),
    }


def _decode_crossed(doc: dict, path: str) -> CrossedProduct:
    act = _decode_action(_get(doc, "action", dict, path), f"{path}.action")
    alg = _decode_star_algebra(_get(doc, "algebra", dict, path),
                               f"{path}.algebra")
    nk, na, q = act.wka.dim, act.module.dim, alg.dim
    n_raw = na * nk
    proj = _decode_array(_get(doc, "projection", list, path), (q, n_raw),
                         f"{path}.projection")
    sec = _decode_array(_get(doc, "section", list, path), (n_raw, q),
                        f"{path}.section")
    rel_node = _get(doc, "relations", list, path)
    rel = _decode_array(rel_node, (len(rel_node), n_raw), f"{path}.relations")
    if act.side == "left":
        ia_raw = np.kron(np.eye(na), act.wka.alg.unit[:, None])
        ik_raw = np.kron(act.module.unit[:, None], np.eye(nk))
    else:
        ia_raw = np.kron(act.wka.alg.unit[:, None], np.eye(na))
        ik_raw = np.kron(np.eye(nk), act.module.unit[:, None])
    rep = Report(title="parsed crossed product")
    rep.values["parsed"] = True
    return CrossedProduct(action=act, algebra=alg, section=sec,
                          projection=proj, relations=rel,
                          include_module=proj @ ia_raw,
                          include_kac=proj @ ik_raw, report=rep)


def _encode_report(rep: Report) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "report",
        "title": rep.title,
        "checks": [{"name": c.name, "residual": _jsonify(c.residual),
                    "passed": bool(c.passed)} for c in rep.checks],
        "values": _jsonify(rep.values),
        "warnings": list(rep.warnings),
        "text": getattr(rep, "stored_text", None) or rep.render(),
    }


def _decode_report(doc: dict, path: str) -> Report:
    rep = Report(title=_get(doc, "title", str, path))
    checks = _get(doc, "checks", list, path)
    for i, node in enumerate(checks):
        cp = f"{path}.checks[{i}]"
        if not isinstance(node, dict):
            raise ParseError(f"{cp}: expected an object")
        rep.checks.append(Check(name=_get(node, "name", str, cp),
                                residual=float(_get(node, "residual",
                                                    (int, float), cp)),
                                passed=bool(node.get("passed"))))
    rep.values.update(_get(doc, "values", dict, path))
    rep.warnings.extend(_get(doc, "warnings", list, path))
    # keep the original rendering so re-serializing is byte identical
    rep.stored_text = _get(doc, "text", str, path)
    return rep


def to_document(obj: Any) -> dict:
    if isinstance(obj, WeakKacAlgebra):
        return _encode_weak_kac(obj)
    if isinstance(obj, FiniteStarAlgebra):
        return _encode_star_algebra(obj)
    if isinstance(obj, ActionSpec):
        return _encode_action(obj)
    if isinstance(obj, CrossedProduct):
        return _encode_crossed(obj)
    if isinstance(obj, Report):
        return _encode_report(obj)
    raise ParseError(f"cannot serialize object of type {type(obj).__name__}")


def to_json(obj: Any) -> str:
    return json.dumps(to_document(obj), indent=1, allow_nan=False) + "\n"


def _reject_constant(token: str) -> float:
    raise ParseError(f"non-finite number token '{token}' is not allowed")


def from_document(doc: Any) -> Any:
    if not isinstance(doc, dict):
        raise ParseError("$: top level must be an object")
    kind = doc.get("kind")
    if kind not in _KINDS:
        raise ParseError(f"$.kind: unknown kind {kind!r}; expected one of "
                         + ", ".join(_KINDS))
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ParseError(f"$.format_version: unsupported version {version!r}")
    decoder = {
        "star_algebra": _decode_star_algebra,
        "weak_kac": _decode_weak_kac,
        "action": _decode_action,
        "crossed_product": _decode_crossed,
        "report": _decode_report,
    }[kind]
    return decoder(doc, "$")


def from_json(text: str) -> Any:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}")
    return from_document(doc)


def parse(path: str) -> Any:
    """Reads an object from a file path, or stdin when path is '-'."""
    if path == "-":
        return from_json(sys.stdin.read())
    with open(path, "r", encoding="utf-8") as fh:
        return from_json(fh.read())


def serialize(obj: Any, path: str) -> None:
    """Writes an object to a file path, or stdout when path is '-'."""
    text = to_json(obj)
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
