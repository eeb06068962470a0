"""
Formatting module for the surgery pipeline.

Handles:
- Turning library reports (violations, potentials, curve identity rows,
  rank certificates, cone comparisons, batch results) into pandas tables
- CSV export and plain-text rendering of those tables
- JSON export of Pyfloer objects (b_eps, transformed atlases)
"""

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import pandas as pd

from Pyfloer.cellular import Violation
from Pyfloer.floer import RankCertificate
from Pyfloer.novikov import NovikovElement, format_exponent, val_q
from Pyfloer.surgery import CurveIdentityReport

from utils.validation import ValidationError, validate_report


def format_element(a: NovikovElement) -> str:
    """Novikov element as 'c q^e + ...' without the class wrapper."""
    text = repr(a)
    prefix = "NovikovElement["
    return text[len(prefix):-1] if text.startswith(prefix) else text


def format_valuation(a: NovikovElement) -> str:
    return "inf" if a.is_zero() else format_exponent(val_q(a))


# ---------------------------------------------------------------------------
# tables


def violations_table(source: str, complex_violations: Sequence[Violation] = (),
                     atlas_problems: Sequence[str] = (),
                     admissibility: Sequence[str] = ()) -> pd.DataFrame:
    """One row per violation found by the structural checks of one input."""
    rows = []
    for v in complex_violations:
        rows.append({"source": source, "check": v.rule, "detail": str(v)})
    for problem in atlas_problems:
        check = "curvature gap" if "curvature disk" in problem else \
            "corner gap" if "delta_gap" in problem else "atlas"
        rows.append({"source": source, "check": check, "detail": problem})
    for reason in admissibility:
        rows.append({"source": source, "check": "admissibility", "detail": reason})
    return pd.DataFrame(rows, columns=["source", "check", "detail"])


def potentials_table(entries: Iterable[Dict[str, Any]]) -> pd.DataFrame:
    """entries: {"stage", "W" (NovikovElement), "flat"}; W rendered as text."""
    rows = []
    for e in entries:
        W = e["W"]
        rows.append({"stage": e["stage"], "W": format_element(W),
                     "val_W": format_valuation(W), "flat": bool(e["flat"])})
    return pd.DataFrame(rows, columns=["stage", "W", "val_W", "flat"])


def curve_identity_table(report: CurveIdentityReport, label: str = "") -> pd.DataFrame:
    df = pd.DataFrame(report.to_records(),
                      columns=["generator", "lhs", "rhs", "difference", "tail_bound", "passed"])
    for col in ("lhs", "rhs"):
        df[col] = df[col].str.replace(r"^NovikovElement\[(.*)\]$", r"\1", regex=True)
    if label:
        df.insert(0, "case", label)
    return df


def hf_table(entries: Iterable[Dict[str, Any]]) -> pd.DataFrame:
    """entries: {"stage", "dimension", "certificate" (RankCertificate), "generators"}."""
    rows = []
    for e in entries:
        cert: RankCertificate = e["certificate"]
        rows.append({"stage": e["stage"], "generators": e.get("generators"),
                     "dimension": e["dimension"], "rank": cert.rank,
                     "margin": format_exponent(cert.margin),
                     "safety_gap": format_exponent(cert.safety_gap),
                     "stable": cert.stable})
    return pd.DataFrame(rows, columns=["stage", "generators", "dimension", "rank",
                                       "margin", "safety_gap", "stable"])


def cone_table(report: Dict[str, Any]) -> pd.DataFrame:
    rows = []
    for row in report["rows"]:
        rows.append({"word": " ".join(row["word"]) or "()",
                     "cone": _format_cochain(row["cone"]),
                     "surgered": _format_cochain(row["surgered"]),
                     "discrepancy": row["discrepancy"]})
    return pd.DataFrame(rows, columns=["word", "cone", "surgered", "discrepancy"])


def resummation_table(rows: Iterable[Dict[str, Any]], label: str = "") -> pd.DataFrame:
    records = [{"case": label, "kind": r["kind"], "difference": r["difference"],
                "series_difference": r["series_difference"], "tail_bound": r["tail_bound"],
                "passed": r["passed"]} for r in rows]
    return pd.DataFrame(records, columns=["case", "kind", "difference", "series_difference",
                                          "tail_bound", "passed"])


def _format_cochain(c: Any) -> str:
    items = sorted(c.items())
    if not items:
        return "0"
    return " + ".join(f"[{format_element(v)}] {name}" for name, v in items)


# ---------------------------------------------------------------------------
# export


class ReportWriter:
    """
    Write report tables and objects into one output directory.

    Tables are kept in insertion order so that summary.txt lists them in
    the order the pipeline produced them.
    """

    def __init__(self, out_dir: Path, formats: Sequence[str] = ("csv", "txt")):
        self.out_dir = Path(out_dir)
        self.formats = tuple(formats)
        self.tables: Dict[str, pd.DataFrame] = {}
        self.written: List[Path] = []

    def add(self, name: str, df: pd.DataFrame, kind: Optional[str] = None) -> pd.DataFrame:
        """Register a table; kind triggers validate_report on it."""
        if kind is not None:
            validate_report(df, kind)
        self.tables[name] = df
        return df

    def write_json(self, filename: str, document: Dict[str, Any]) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / filename
        with open(path, "w") as f:
            json.dump(document, f, indent=2)
        self.written.append(path)
        return path

    def write(self) -> List[Path]:
        """Write every table as CSV and the plain-text summary."""
        if not self.tables:
            raise ValidationError("No report tables to write")
        self.out_dir.mkdir(parents=True, exist_ok=True)
        if "csv" in self.formats:
            for name, df in self.tables.items():
                path = self.out_dir / f"{name}.csv"
                df.to_csv(path, index=False)
                self.written.append(path)
        if "txt" in self.formats:
            path = self.out_dir / "summary.txt"
            with open(path, "w") as f:
                f.write(render_tables(self.tables))
            self.written.append(path)
        return self.written


def render_tables(tables: Dict[str, pd.DataFrame]) -> str:
    """Plain-text rendering of several tables, one block per table."""
    blocks = []
    for name, df in tables.items():
        body = "(empty)" if df.empty else df.to_string(index=False)
        blocks.append(f"== {name} ==\n{body}\n")
    return "\n".join(blocks)
