"""Module documents, JSON payloads, CSV emission, and the bundled corpus.

The on-disk module format is a small JSON document:

    {
      "schema_version": 1,
      "name": "optional",
      "description": "optional",
      "ring": {"variables": ["x", "y"]},
      "free_module": {"shifts": [0]},
      "generators": [{"exponents": [2, 0], "basis": 0}, ...]
    }

Validation failures carry the offending field path.  All emitted JSON is
deterministic (sorted keys, exact rationals as "p/q" strings, no timestamps)
so cached and fresh runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from importlib import resources
from typing import Optional

from .core import (
    GradedFreeModule,
    InputError,
    RankMismatchError,
    RingSpec,
    TermModule,
    term_module,
)
from .counting import LengthTable
from .density import ChamberDecomposition, DensityGrid
from .dependence import DependenceVerdict
from .multiplicity import MultiplicityReport

SCHEMA_VERSION = 1


# -- fractions ----------------------------------------------------------------


def fraction_str(value) -> str:
    f = Fraction(value)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def polynomial_str(coeffs) -> str:
    """Human-readable one-variable polynomial from low-to-high coefficients."""
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = Fraction(coeffs[i])
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = fraction_str(mag)
        else:
            var = "x" if i == 1 else f"x^{i}"
            if mag == 1:
                body = var
            elif mag.denominator == 1:
                body = f"{mag}{var}"
            else:
                body = f"({fraction_str(mag)}){var}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts) if parts else "0"


def parse_fraction(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        try:
            return Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational number: {text!r}") from exc
    raise InputError(f"not a rational number: {text!r}")


def jsonable(obj):
    """Recursively convert exact values into JSON-safe structures."""
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str, float)):
        return obj
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, TermModule):
        return serialize_module(obj)
    return str(obj)


def dump_json(payload: dict) -> str:
    return json.dumps(jsonable(payload), sort_keys=True, indent=2) + "\n"


def write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_json(payload))


# -- module documents ----------------------------------------------------------


def _expect(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise InputError(f"{path}: {message}")


def parse_module(doc) -> TermModule:
    """Validate a module document and build the level-1 TermModule.

    Diagnostics name the failing field path.  The free module's rank must be
    covered by the generators: the invariants computed downstream assume a
    versal embedding with rank M = rank F, so unused basis vectors are
    rejected rather than silently accepted.
    """
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise InputError(f"document: invalid JSON ({exc})") from exc
    _expect(isinstance(doc, dict), "document", "must be a JSON object")
    version = doc.get("schema_version")
    _expect(version == SCHEMA_VERSION, "schema_version",
            f"must be {SCHEMA_VERSION}, got {version!r}")
    ring = doc.get("ring")
    _expect(isinstance(ring, dict), "ring", "must be an object")
    variables = ring.get("variables")
    _expect(
        isinstance(variables, list)
        and variables
        and all(isinstance(v, str) and v for v in variables),
        "ring.variables",
        "must be a non-empty list of variable names",
    )
    _expect(len(set(variables)) == len(variables), "ring.variables",
            "variable names must be distinct")
    free = doc.get("free_module")
    _expect(isinstance(free, dict), "free_module", "must be an object")
    shifts = free.get("shifts")
    _expect(
        isinstance(shifts, list)
        and shifts
        and all(isinstance(s, int) and not isinstance(s, bool) for s in shifts),
        "free_module.shifts",
        "must be a non-empty list of integers",
    )
    gens = doc.get("generators")
    _expect(isinstance(gens, list), "generators", "must be a list")
    _expect(bool(gens), "generators", "must be non-empty")
    d = len(variables)
    e = len(shifts)
    parsed = []
    seen_basis = set()
    for idx, gen in enumerate(gens):
        path = f"generators[{idx}]"
        _expect(isinstance(gen, dict), path, "must be an object")
        exponents = gen.get("exponents")
        _expect(
            isinstance(exponents, list)
            and len(exponents) == d
            and all(isinstance(v, int) and not isinstance(v, bool) for v in exponents),
            f"{path}.exponents",
            f"must be a list of {d} integers",
        )
        _expect(all(v >= 0 for v in exponents), f"{path}.exponents",
                "exponents must be nonnegative")
        basis = gen.get("basis")
        _expect(
            isinstance(basis, int) and not isinstance(basis, bool) and 0 <= basis < e,
            f"{path}.basis",
            f"must be an integer in [0, {e})",
        )
        degree = sum(exponents) + shifts[basis]
        _expect(degree >= 0, path,
                f"generator has negative degree {degree}; "
                "the module must be nonnegatively graded")
        seen_basis.add(basis)
        unit = tuple(1 if k == basis else 0 for k in range(e))
        parsed.append((tuple(exponents), unit))
    if len(seen_basis) != e:
        missing = sorted(set(range(e)) - seen_basis)
        raise RankMismatchError(
            f"generators: basis vectors {missing} unused; the free module must "
            "be a versal embedding with rank M = rank F (drop unused basis "
            "vectors or add generators)"
        )
    ambient = GradedFreeModule(RingSpec(tuple(variables)), tuple(shifts))
    return term_module(ambient, 1, parsed)


def serialize_module(
    m: TermModule, name: Optional[str] = None, description: Optional[str] = None
) -> dict:
    if m.level != 1:
        raise InputError("only level-1 modules serialize to module documents")
    gens = []
    for term in m.generators():
        basis = term.basis_exponents.index(1)
        gens.append({"exponents": list(term.exponents), "basis": basis})
    gens.sort(key=lambda g: (g["basis"], g["exponents"]))
    doc = {
        "schema_version": SCHEMA_VERSION,
        "ring": {"variables": list(m.ambient.ring.variables)},
        "free_module": {"shifts": list(m.ambient.shifts)},
        "generators": gens,
    }
    if name:
        doc["name"] = name
    if description:
        doc["description"] = description
    return doc


def load_module_file(path) -> TermModule:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read module file {path}: {exc}") from exc
    return parse_module(text)


# -- corpus --------------------------------------------------------------------


def corpus_names() -> list[str]:
    root = resources.files("reesdensity.corpus")
    return sorted(
        entry.name[: -len(".json")]
        for entry in root.iterdir()
        if entry.name.endswith(".json")
    )


def load_corpus_module(name: str) -> TermModule:
    root = resources.files("reesdensity.corpus")
    entry = root / f"{name}.json"
    if not entry.is_file():
        raise InputError(
            f"unknown corpus module {name!r}; available: {', '.join(corpus_names())}"
        )
    return parse_module(entry.read_text(encoding="utf-8"))


def corpus_description(name: str) -> str:
    root = resources.files("reesdensity.corpus")
    entry = root / f"{name}.json"
    if not entry.is_file():
        return ""
    return json.loads(entry.read_text(encoding="utf-8")).get("description", "")


# -- payloads ------------------------------------------------------------------


def grid_payload(grid: DensityGrid) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": grid.kind,
        "xs": [fraction_str(x) for x in grid.xs],
        "ladder": list(grid.ladder),
        "samples": {
            str(n): [fraction_str(v) for v in grid.samples[n]] for n in grid.ladder
        },
        "extrapolated": [fraction_str(v) for v in grid.extrapolated],
        "diagnostics": [
            None if v is None else fraction_str(v) for v in grid.diagnostics
        ],
        "support": jsonable(grid.support),
        "meta": jsonable(grid.meta),
    }


def length_table_payload(table: LengthTable) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "total": table.total,
        "lengths": {str(k): v for k, v in sorted(table.lengths.items())},
        "max_degree": table.max_degree,
    }


def report_payload(report: MultiplicityReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": report.kind,
        "status": report.status,
        "values": jsonable(report.values),
        "ladder": list(report.ladder),
        "diagnostics": jsonable(report.diagnostics),
    }


def verdict_payload(verdict: DependenceVerdict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "verdict": verdict.verdict,
        "certificate": verdict.certificate,
        "c": verdict.c,
        "n_max": verdict.n_max,
        "consistent": verdict.consistent,
        "criteria": [
            {
                "name": cr.name,
                "label": cr.label,
                "left": jsonable(cr.left),
                "right": jsonable(cr.right),
                "usable": cr.usable,
                "match": cr.match,
                "stand_in": cr.stand_in,
                "detail": jsonable(cr.detail),
            }
            for cr in verdict.criteria
        ],
        "diagnostics": jsonable(verdict.diagnostics),
    }


def chambers_payload(fit: ChamberDecomposition) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "breakpoints": [fraction_str(b) for b in fit.breakpoints],
        "chambers": [
            {
                "interval": str(ch),
                "polynomial": [fraction_str(c) for c in poly],
            }
            for ch, poly in zip(fit.chambers, fit.polynomials)
        ],
        "top_degree": fit.top_degree,
        "continuity": jsonable(fit.continuity),
        "diagnostics": jsonable(fit.diagnostics),
    }


# -- CSV -----------------------------------------------------------------------


def write_density_csv(grid: DensityGrid, path) -> None:
    """One row per grid x: x, value at each ladder n, extrapolated, diagnostic.

    Cells are floats for plotting convenience; the JSON payload keeps the
    exact rationals.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["x"] + [f"n={n}" for n in grid.ladder] + ["extrapolated", "diagnostic"]
        )
        for col, x in enumerate(grid.xs):
            row = [float(x)]
            row.extend(float(grid.samples[n][col]) for n in grid.ladder)
            row.append(float(grid.extrapolated[col]))
            diag = grid.diagnostics[col]
            row.append("" if diag is None else float(diag))
            writer.writerow(row)
