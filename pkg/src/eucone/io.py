"""
Problem files and reports.

Problem files are UTF-8 JSON validated against ``schemas/problem.schema.json``;
reports share the envelope in ``schemas/report.schema.json``.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from functools import lru_cache
from importlib import resources

import jsonschema

from .errors import (
    DuplicateIdError,
    MalformedJSONError,
    ProblemFileError,
    SchemaViolationError,
)
from .problems import FiniteProblem, SmoothProblem, builtin_smooth

SCHEMA_VERSION = 1


@lru_cache(maxsize=None)
def load_schema(name):
    text = resources.files("eucone").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def _json_path(parts):
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def parse_problem(text):
    """Parse problem-file bytes or text into a FiniteProblem or SmoothProblem.

    Smooth problems come back with their grid resolution attached; call
    ``discretize()`` for the derived finite problem.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedJSONError(f"not UTF-8: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJSONError(f"{exc.msg} (line {exc.lineno}, column {exc.colno})") from None

    validator = jsonschema.Draft202012Validator(load_schema("problem"))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise SchemaViolationError(err.message, _json_path(err.absolute_path))

    n = doc["n"]
    if doc["kind"] == "finite":
        return _parse_finite(doc, n)
    return _parse_smooth(doc, n)


def _parse_finite(doc, n):
    seen = set()
    ids, F, X = [], [], []
    for pos, d in enumerate(doc["decisions"]):
        if len(d["F"]) != n:
            raise SchemaViolationError(
                f"expected {n} utilities, got {len(d['F'])}", f"$.decisions[{pos}].F"
            )
        if d["id"] in seen:
            raise DuplicateIdError(d["id"], f"$.decisions[{pos}].id")
        seen.add(d["id"])
        ids.append(d["id"])
        F.append(d["F"])
        X.append(d["x"])
    return FiniteProblem(ids, F, X, provenance=doc.get("provenance", "file"))


def _parse_smooth(doc, n):
    base = builtin_smooth(doc["generator"])
    if base.n != n:
        raise SchemaViolationError(
            f"generator {base.name!r} has {base.n} objectives, file says {n}", "$.n"
        )
    grid = doc["grid"]
    if len(grid) != base.k:
        raise SchemaViolationError(f"expected {base.k} grid resolutions, got {len(grid)}", "$.grid")
    lower, upper = base.lower, base.upper
    if "box" in doc:
        lower, upper = doc["box"]["lower"], doc["box"]["upper"]
        for key, vals in (("lower", lower), ("upper", upper)):
            if len(vals) != base.k:
                raise SchemaViolationError(f"expected {base.k} bounds, got {len(vals)}", f"$.box.{key}")
        if not all(a < b for a, b in zip(lower, upper)):
            raise SchemaViolationError("lower bounds must be below upper bounds", "$.box")
    return base.with_options(lower=lower, upper=upper, grid=tuple(grid))


def load_problem(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc.strerror}") from None
    return parse_problem(data)


def problem_to_dict(problem):
    if isinstance(problem, SmoothProblem):
        doc = {
            "schema_version": SCHEMA_VERSION,
            "n": problem.n,
            "kind": "smooth",
            "generator": problem.name,
            "box": {"lower": problem.lower.tolist(), "upper": problem.upper.tolist()},
        }
        if problem.grid is not None:
            doc["grid"] = list(problem.grid)
        return doc
    return {
        "schema_version": SCHEMA_VERSION,
        "n": problem.n,
        "kind": "finite",
        "provenance": problem.provenance,
        "decisions": [
            {"id": i, "x": list(x), "F": u.tolist()}
            for i, x, u in zip(problem.ids, problem.points, problem.utilities)
        ],
    }


def serialize_problem(problem):
    return json.dumps(problem_to_dict(problem), indent=2)


def as_finite(problem):
    if isinstance(problem, SmoothProblem):
        return problem.discretize()
    return problem


# ---------------------------------------------------------------------------
# reports


def problem_summary(problem):
    if problem is None:
        return None
    if isinstance(problem, SmoothProblem):
        size = math.prod(problem.grid) if problem.grid else 0
        return {"provenance": f"smooth:{problem.name}", "n": problem.n, "size": size}
    return {"provenance": problem.provenance, "n": problem.n, "size": len(problem)}


def make_report(command, problem, parameters, result, exit_status):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "problem": problem_summary(problem),
        "parameters": parameters,
        "result": result,
        "exit_status": exit_status,
    }


def validate_report(report):
    jsonschema.Draft202012Validator(load_schema("report")).validate(report)


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".eucone-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
