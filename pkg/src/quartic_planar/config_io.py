"""Config files and result documents for the command-line surface.

One JSON schema covers both directions: a model config is

    {
      "eigenvalues":    [1.0, 2.0],
      "multiplicities": [1, 1],
      "lambda":         0.1,
      "matrix_size":    null,          # optional, defaults to sum(mult)
      "solver":         {"tolerance": 1e-12, ...},   # optional
      "format":         "json"         # optional, "json" or "csv"
    }

and a result document echoes the inputs next to the outputs so a stored
file is self-describing.  Complex numbers appear as [re, im] pairs
everywhere.  Serialization is canonical (sorted keys, fixed separators),
so identical inputs produce byte-identical documents once the timing
field is excluded.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidSpectrum, ParseError, ValidationError
from .spectrum import SolverOptions, Spectrum

CONFIG_DIR_ENV = "QUARTIC_PLANAR_CONFIG_DIR"
FORMATS = ("json", "csv")


def complex_pair(z):
    """[re, im] encoding used for every complex value in documents."""
    z = complex(z)
    return [z.real, z.imag]


def parse_complex(text):
    """Accept 're,im' or a bare real; used by CLI flags and configs."""
    if isinstance(text, (list, tuple)):
        if len(text) != 2:
            raise ParseError(f"complex pair needs two entries, got {len(text)}")
        return complex(float(text[0]), float(text[1]))
    parts = str(text).split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ParseError(f"cannot parse complex value from {text!r}")


@dataclass(frozen=True)
class ModelConfig:
    """Validated input bundle: spectrum, coupling, solver knobs, format."""

    spectrum: Spectrum
    lam: float
    solver: SolverOptions = field(default_factory=SolverOptions)
    output_format: str = "json"

    def with_lambda(self, lam):
        return replace(self, lam=float(lam))

    def to_dict(self):
        return {
            "eigenvalues": [float(x) for x in self.spectrum.eigenvalues],
            "multiplicities": [int(x) for x in self.spectrum.multiplicities],
            "matrix_size": int(self.spectrum.matrix_size),
            "lambda": float(self.lam),
            "solver": {
                "tolerance": self.solver.tolerance,
                "max_newton_iters": self.solver.max_newton_iters,
                "max_continuation_steps": self.solver.max_continuation_steps,
            },
            "format": self.output_format,
        }


def _require(mapping, key, kinds, where):
    if key not in mapping:
        raise ParseError(f"{where}: missing field '{key}'")
    value = mapping[key]
    if not isinstance(value, kinds):
        raise ParseError(
            f"{where}: field '{key}' has type {type(value).__name__}"
        )
    return value


def config_from_dict(raw, where="config"):
    """Build a ModelConfig from parsed JSON, naming the offending field
    on shape errors and the violated invariant on value errors."""
    if not isinstance(raw, dict):
        raise ParseError(f"{where}: top level must be an object")
    eig = _require(raw, "eigenvalues", list, where)
    mult = _require(raw, "multiplicities", list, where)
    lam = _require(raw, "lambda", (int, float), where)
    if isinstance(lam, bool):
        raise ParseError(f"{where}: field 'lambda' has type bool")
    if not np.isfinite(float(lam)):
        raise ValidationError("lambda not finite")
    size = raw.get("matrix_size")
    if size is not None and not isinstance(size, int):
        raise ParseError(f"{where}: field 'matrix_size' must be an integer")
    fmt = raw.get("format", "json")
    if fmt not in FORMATS:
        raise ValidationError(f"format must be one of {FORMATS}, got {fmt!r}")

    solver_raw = raw.get("solver", {})
    if not isinstance(solver_raw, dict):
        raise ParseError(f"{where}: field 'solver' must be an object")
    known = {"tolerance", "max_newton_iters", "max_continuation_steps"}
    extra = set(solver_raw) - known
    if extra:
        raise ParseError(f"{where}: unknown solver field '{sorted(extra)[0]}'")
    solver = SolverOptions(
        tolerance=float(solver_raw.get("tolerance", 1e-12)),
        max_newton_iters=int(solver_raw.get("max_newton_iters", 50)),
        max_continuation_steps=int(solver_raw.get("max_continuation_steps", 4096)),
    )
    try:
        solver.validate()
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    try:
        spectrum = Spectrum(eig, mult, matrix_size=size)
    except InvalidSpectrum as exc:
        raise ValidationError(str(exc)) from exc
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from exc
    return ModelConfig(
        spectrum=spectrum, lam=float(lam), solver=solver, output_format=fmt
    )


def load_config(path):
    """Read and validate a JSON model config.

    ParseError carries the line/column of malformed JSON or the name of
    a missing/mistyped field; ValidationError names the violated model
    invariant verbatim (e.g. "eigenvalues not increasing").
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    return config_from_dict(raw, where=str(path))


@dataclass
class ResultDocument:
    """Self-describing output bundle of one CLI run.

    ``results`` holds the command's payload, ``diagnostics`` the residuals
    and defects that certify it, and ``table`` an optional columnar view
    of the payload used by the CSV exporter.  ``canonical_json`` excludes
    the timing field so byte-identity is meaningful across runs.
    """

    command: str
    inputs: dict
    results: dict
    diagnostics: dict
    version: str
    timing_seconds: float = 0.0
    table: dict | None = None

    def to_dict(self, with_timing=True):
        doc = {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "diagnostics": self.diagnostics,
            "version": self.version,
        }
        if self.table is not None:
            doc["table"] = self.table
        if with_timing:
            doc["timing_seconds"] = self.timing_seconds
        return doc

    def to_json(self, with_timing=True):
        return json.dumps(
            self.to_dict(with_timing=with_timing),
            sort_keys=True,
            indent=2,
            separators=(",", ": "),
        )

    def canonical_json(self):
        return self.to_json(with_timing=False)

    def to_csv(self):
        """Columnar export of the table view; falls back to flattened
        key/value rows when the command has no natural table."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if self.table is not None:
            writer.writerow(self.table["columns"])
            for row in self.table["rows"]:
                writer.writerow(row)
        else:
            writer.writerow(["key", "value"])
            for key, value in sorted(_flatten(self.results).items()):
                writer.writerow([key, value])
        return buf.getvalue()

    @classmethod
    def from_dict(cls, doc):
        return cls(
            command=doc["command"],
            inputs=doc["inputs"],
            results=doc["results"],
            diagnostics=doc["diagnostics"],
            version=doc["version"],
            timing_seconds=doc.get("timing_seconds", 0.0),
            table=doc.get("table"),
        )

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(
                f"result document: line {exc.lineno}: {exc.msg}"
            ) from exc
        except KeyError as exc:
            raise ParseError(f"result document: missing field {exc}") from exc


def _flatten(tree, prefix=""):
    flat = {}
    for key, value in tree.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, name + "."))
        else:
            flat[name] = value
    return flat
