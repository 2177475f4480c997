"""Instance documents (JSON) and report renderings (JSON or CSV).

An instance document looks like::

    {
      "atoms": [{"id": "a", "measure": "2/1"}, {"id": "b", "measure": "1/1"}],
      "weight": {"a": "5/1", "b": "1/1"},
      "basis": [{"name": "B", "atoms": ["a", "b"]}]
    }

Every number is a string ``"p/q"`` (``"p"`` is accepted too).  JSON
numbers are rejected so that nothing passes through a float.
"""
from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

from .conditions import ConstantReport
from .errors import ValidationError
from .families import LiftedInstance
from .measure import Instance, as_rational, format_rational
from .relations import FamilyProfile, TableReport


class DocumentError(ValidationError):
    """Malformed document; ``line``/``column`` are set for syntax errors."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


def _rational(value, where: str) -> Fraction:
    if not isinstance(value, str):
        raise DocumentError(f"{where}: expected a 'p/q' string, got {json.dumps(value)}")
    try:
        return as_rational(value)
    except ValueError as e:
        raise DocumentError(f"{where}: {e}") from None


def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(e.msg, e.lineno, e.colno) from None


def _field(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise DocumentError(f"{where}: missing field {key!r}")
    value = obj[key]
    if not isinstance(value, kind):
        raise DocumentError(f"{where}: field {key!r} has the wrong type")
    return value


def parse_instance(document: str) -> Instance:
    """Build an :class:`Instance` from a JSON document; atom order is document order."""
    doc = _loads(document)
    if not isinstance(doc, dict):
        raise DocumentError("top level must be an object")
    atoms = _field(doc, "atoms", list, "document")
    weight = _field(doc, "weight", dict, "document")
    basis = _field(doc, "basis", list, "document")
    ids, measures = [], []
    for k, a in enumerate(atoms):
        where = f"atoms[{k}]"
        ids.append(_field(a, "id", str, where))
        measures.append(_rational(_field(a, "measure", str | int | float, where), f"{where}.measure"))
    unknown = sorted(set(weight) - set(ids))
    if unknown:
        raise DocumentError(f"weight given for unknown atom {unknown[0]!r}")
    missing = [i for i in ids if i not in weight]
    if missing:
        raise DocumentError(f"no weight for atom {missing[0]!r}")
    weights = [_rational(weight[i], f"weight[{i!r}]") for i in ids]
    names, members = [], []
    position = {aid: k for k, aid in enumerate(ids)}
    for k, b in enumerate(basis):
        where = f"basis[{k}]"
        names.append(_field(b, "name", str, where))
        refs = _field(b, "atoms", list, where)
        try:
            members.append(tuple(position[r] for r in refs))
        except (KeyError, TypeError):
            bad = next(r for r in refs if not isinstance(r, str) or r not in position)
            raise DocumentError(f"{where}: unknown atom {bad!r}") from None
    return Instance.from_indexed(ids, measures, weights, names, members)


def instance_document(instance: Instance) -> dict:
    return {
        "atoms": [{"id": i, "measure": format_rational(m)} for i, m in zip(instance.ids, instance.measures)],
        "weight": {i: format_rational(w) for i, w in zip(instance.ids, instance.weights)},
        "basis": [{"name": n, "atoms": [instance.ids[k] for k in idx]}
                  for n, idx in zip(instance.base_names, instance.members)],
    }


def serialize_instance(instance: Instance) -> str:
    return json.dumps(instance_document(instance), indent=1)


def lifted_document(lifted: LiftedInstance) -> dict:
    return {
        "intervals": [{"left": format_rational(a), "right": format_rational(b), "weight": format_rational(w)}
                      for a, b, w in lifted.intervals],
        "basis": [{"name": n, "intervals": list(idx)} for n, idx in lifted.basis],
    }


def parse_lifted(document: str) -> LiftedInstance:
    doc = _loads(document)
    intervals = tuple(
        tuple(_rational(_field(iv, key, str, f"intervals[{k}]"), f"intervals[{k}].{key}")
              for key in ("left", "right", "weight"))
        for k, iv in enumerate(_field(doc, "intervals", list, "document"))
    )
    basis = tuple((_field(b, "name", str, f"basis[{k}]"), tuple(_field(b, "intervals", list, f"basis[{k}]")))
                  for k, b in enumerate(_field(doc, "basis", list, "document")))
    return LiftedInstance(intervals, basis)


# -- report rendering --------------------------------------------------------------


def format_value(v) -> str:
    """Fractions as ``p/q``, floats with 17 significant digits, infinity as ``inf``."""
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, int) and not isinstance(v, bool):
        return f"{v}/1"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    raise TypeError(f"cannot format {v!r}")


def parse_value(text: str):
    """Inverse of :func:`format_value`."""
    if text in ("inf", "-inf"):
        return float(text)
    if "/" in text:
        return as_rational(text)
    return float(text)


def _plain(obj):
    if isinstance(obj, (Fraction, float)) or (isinstance(obj, int) and not isinstance(obj, bool)):
        return format_value(obj)
    if isinstance(obj, dict):
        return {k if isinstance(k, str) else format_value(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _params(params) -> dict:
    return {name: _plain(v) for name, v in params.items()}


def _witness(report: ConstantReport) -> dict:
    w = report.witness
    out = {"base": w.base_name}
    if w.subset is not None:
        out["subset"] = list(w.subset)
    for name in ("level", "lam", "s"):
        v = getattr(w, name)
        if v is not None:
            out[name] = format_value(v)
    return out


def report_document(report: ConstantReport) -> dict:
    return {
        "condition": report.condition,
        "params": _params(report.params),
        "backend": report.backend,
        "overall": format_value(report.overall),
        "witness": _witness(report),
        "per_base": [{"base": n, "constant": format_value(v)}
                     for n, v in zip(report.instance.base_names, report.values)],
        "detail": _plain(dict(report.detail)),
    }


def report_csv(report: ConstantReport) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["condition", "params", "base", "constant", "backend"])
    params = str(report.params)
    for n, v in zip(report.instance.base_names, report.values):
        out.writerow([report.condition, params, n, format_value(v), report.backend])
    out.writerow([report.condition, params, "*", format_value(report.overall), report.backend])
    return buf.getvalue()


def _verdict(profile: FamilyProfile) -> dict:
    v = profile.verdict
    out = {"kind": v.kind, "text": str(v)}
    if v.rate_kind is not None:
        out["rate_kind"] = v.rate_kind
        out["rate"] = format_value(v.rate)
    return out


def profile_document(profile: FamilyProfile) -> dict:
    return {
        "family": profile.family,
        "mode": profile.mode,
        "condition": profile.condition,
        "params": _params(profile.params),
        "rows": [{"n": n, "constant": format_value(v), "backend": b} for n, v, b in profile.rows],
        "verdict": _verdict(profile),
    }


def profile_csv(profile: FamilyProfile) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["family", "n", "condition", "params", "constant", "backend"])
    for n, v, b in profile.rows:
        out.writerow([profile.family, n, profile.condition, str(profile.params), format_value(v), b])
    return buf.getvalue()


def _entry(entry, verified) -> dict:
    out = {"source": entry.source, "target": entry.target, "status": entry.status,
           "provenance": entry.provenance, "new": entry.new}
    if entry.note:
        out["note"] = entry.note
    if verified is not None:
        out["verified"] = verified
    return out


def table_document(report: TableReport) -> dict:
    verified = {r.cell: r.passed for r in report.witnesses}
    return {
        "ok": report.ok,
        "threshold": format_value(Fraction(report.threshold)),
        "cells": [_entry(e, verified.get((e.source, e.target))) for e in report.entries],
        "witnesses": [
            {
                "cell": list(r.cell),
                "family": r.check.family,
                "source": profile_document(r.source_profile),
                "bound": format_value(r.check.bound),
                "target": profile_document(r.target_profile),
                "passed": r.passed,
                "failures": [msg for _, _, msg in r.failures],
            }
            for r in report.witnesses
        ],
    }


def table_csv(report: TableReport) -> str:
    verified = {r.cell: r.passed for r in report.witnesses}
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["source", "target", "status", "new", "verified", "provenance"])
    for e in report.entries:
        v = verified.get((e.source, e.target))
        out.writerow([e.source, e.target, e.status, int(e.new), "" if v is None else int(v), e.provenance])
    return buf.getvalue()


def lifted_csv(lifted: LiftedInstance) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["record", "name", "left", "right", "weight", "intervals"])
    for k, (a, b, w) in enumerate(lifted.intervals):
        out.writerow(["interval", k, format_value(a), format_value(b), format_value(w), ""])
    for name, idx in lifted.basis:
        out.writerow(["base", name, "", "", "", ";".join(map(str, idx))])
    return buf.getvalue()


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1) + "\n"
