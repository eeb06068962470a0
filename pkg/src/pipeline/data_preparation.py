"""
Data preparation module for the surgery pipeline.

Handles:
- Reading JSON input documents with line/column context on parse errors
- Detecting the kind of a document (complex, algebra, candidate, surgery,
  bimodule, morphism)
- Building Pyfloer objects with truncation and unit-convention defaults
- Writing the bundled example scenarios as input sets
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from Pyfloer import examples
from Pyfloer.ainfty import Cochain, CurvedAInftyAlgebra
from Pyfloer.cellular import CellComplex, CellularError
from Pyfloer.cone import BimoduleAtlas, ConeError, bimodule_from_json
from Pyfloer.mc import MCCandidate
from Pyfloer.novikov import format_exponent, monomial, parse_exponent
from Pyfloer.surgery import SurgeryData, SurgeryError

from utils.logging import print_success
from utils.validation import validate_path_readable, ValidationError

KINDS = ("complex", "algebra", "candidate", "surgery", "bimodule", "morphism")
EXAMPLE_NAMES = ("immersed-circle", "embedded-pair-cone", "dim3-synthetic")


class InputError(Exception):
    """Input file cannot be read or does not describe a valid object."""

    def __init__(self, path: Any, message: str, line: Optional[int] = None,
                 column: Optional[int] = None):
        self.path = Path(path) if path is not None else None
        self.line = line
        self.column = column
        where = str(path) if path is not None else "<input>"
        if line is not None:
            where += f":{line}:{column}"
        super().__init__(f"{where}: {message}")


class UnknownExample(ValueError):
    pass


def read_json(path: Path) -> Dict[str, Any]:
    """
    Read one JSON document.

    Raises:
        InputError: file missing or unreadable, malformed JSON (with line and
            column), or a top level that is not an object
    """
    path = Path(path)
    try:
        validate_path_readable(path, "Input file")
    except ValidationError as e:
        raise InputError(path, str(e))
    with open(path) as f:
        text = f.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(path, e.msg, e.lineno, e.colno)
    if not isinstance(data, dict):
        raise InputError(path, "top level must be a JSON object")
    return data


def detect_kind(data: Dict[str, Any]) -> str:
    """Kind of a document: its "kind" key, or inferred from its fields."""
    if "kind" in data:
        kind = str(data["kind"])
        if kind not in KINDS:
            raise ValueError(f"unknown kind '{kind}', expected one of {KINDS}")
        return kind
    if "minus" in data and "plus" in data:
        return "bimodule"
    if "atlas" in data:
        return "algebra"
    if "cells" in data:
        return "complex"
    if "balls" in data:
        return "surgery"
    if "b" in data:
        return "morphism" if "area" in data else "candidate"
    raise ValueError("cannot infer the kind of this document; add a \"kind\" key")


def candidate_from_json(data: Dict[str, Any]) -> MCCandidate:
    if "b" not in data:
        raise KeyError("b")
    return MCCandidate(Cochain.from_json(data["b"]), parse_exponent(data.get("delta", 0)))


def candidate_to_json(cand: MCCandidate) -> Dict[str, Any]:
    return {"kind": "candidate", "b": cand.b.to_json(), "delta": format_exponent(cand.delta)}


class InputLoader:
    """
    Build Pyfloer objects from input documents.

    Args:
        default_truncation: truncation for documents that carry none
        truncation_override: truncation forced onto every algebra (--trunc)
        unit_convention: default strict-unit sign rule for algebras without one
    """

    def __init__(self, default_truncation: Any = Fraction(6), truncation_override: Any = None,
                 unit_convention: Optional[str] = None):
        self.default_truncation = default_truncation
        self.truncation_override = truncation_override
        self.unit_convention = unit_convention

    def _truncation(self, data: Dict[str, Any]) -> Any:
        if self.truncation_override is not None:
            return self.truncation_override
        return data.get("truncation", self.default_truncation)

    def build(self, kind: str, data: Dict[str, Any]) -> Any:
        if kind == "complex":
            return CellComplex.from_json(data)
        if kind == "algebra":
            convention = data.get("unit_convention", self.unit_convention)
            return CurvedAInftyAlgebra.from_json(data, self._truncation(data), convention)
        if kind == "candidate":
            return candidate_from_json(data)
        if kind == "surgery":
            return SurgeryData.from_json(data)
        if kind == "bimodule":
            return bimodule_from_json(data, self._truncation(data))
        if kind == "morphism":
            return candidate_from_json(data)
        raise ValueError(f"unknown kind '{kind}'")

    def load(self, path: Path, expected: Optional[str] = None) -> Tuple[str, Any, Dict[str, Any]]:
        """
        Load one input file.

        Returns:
            (kind, object, raw document)

        Raises:
            InputError: parse errors and field errors, with the file name and
                the field path reported by the library
        """
        data = read_json(path)
        try:
            kind = detect_kind(data)
            if expected is not None and kind != expected:
                raise ValueError(f"expected a {expected} document, found {kind}")
            obj = self.build(kind, data)
        except KeyError as e:
            raise InputError(path, f"missing field {e}")
        except (TypeError, ValueError, ZeroDivisionError, CellularError, SurgeryError, ConeError) as e:
            raise InputError(path, str(e))
        return kind, obj, data

    def load_algebra(self, path: Path) -> CurvedAInftyAlgebra:
        return self.load(path, "algebra")[1]

    def load_candidate(self, path: Path) -> MCCandidate:
        return self.load(path, "candidate")[1]

    def load_surgery(self, path: Path) -> Tuple[SurgeryData, Dict[str, Any]]:
        _, surgery, data = self.load(path, "surgery")
        return surgery, data

    def load_bimodule(self, path: Path) -> BimoduleAtlas:
        return self.load(path, "bimodule")[1]

    def load_morphism(self, path: Path) -> Tuple[MCCandidate, Dict[str, Any]]:
        _, cand, data = self.load(path, "morphism")
        return cand, data


# ---------------------------------------------------------------------------
# bundled examples


def _tagged(kind: str, data: Dict[str, Any]) -> Dict[str, Any]:
    return {"kind": kind, **data}


def example_documents(name: str) -> Dict[str, Dict[str, Any]]:
    """
    Input documents of a bundled scenario, keyed by file name.

    Raises:
        UnknownExample: name is not one of EXAMPLE_NAMES
    """
    if name == "immersed-circle":
        case = examples.worked_example()
        surgery = _tagged("surgery", case.surgery.to_json())
        surgery.update({"example_mode": True, "local_system_form": "Lshift"})
        return {
            "algebra.json": _tagged("algebra", case.algebra.to_json()),
            "candidate.json": candidate_to_json(case.candidate),
            "surgery.json": surgery,
            "surgered.json": _tagged("algebra", case.surgered.to_json()),
        }
    if name == "dim3-synthetic":
        case = examples.dim3_synthetic()
        return {
            "algebra.json": _tagged("algebra", case.algebra.to_json()),
            "candidate.json": candidate_to_json(case.candidate),
            "surgery.json": _tagged("surgery", case.surgery.to_json()),
        }
    if name == "embedded-pair-cone":
        morphism = Cochain({"x": monomial(1, Fraction(-1, 2))})
        return {
            "bimodule.json": _tagged("bimodule", examples.embedded_pair_cone().to_json()),
            "morphism.json": {"kind": "morphism", "b": morphism.to_json(), "delta": "1",
                              "x": "x", "xbar": "xbar", "area": "1/2"},
        }
    raise UnknownExample(f"unknown example '{name}', expected one of {EXAMPLE_NAMES}")


def write_example(name: str, out_dir: Path, verbose: bool = True) -> List[Path]:
    """Write the documents of a bundled scenario into out_dir."""
    documents = example_documents(name)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for filename, document in documents.items():
        path = out_dir / filename
        with open(path, "w") as f:
            json.dump(document, f, indent=2)
        written.append(path)
    if verbose:
        print_success(f"Wrote example '{name}' ({len(written)} files) to {out_dir}")
    return written
