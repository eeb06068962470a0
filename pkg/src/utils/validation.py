"""
Shared validation utilities for pipeline modules.

Provides:
- Path checks for input files and output directories
- Configuration validation (sections, ranges, enumerations)
- Report table checks
- Report comparison for determinism checks
"""

import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd


class ValidationError(Exception):
    """Custom exception for validation failures."""
    pass


REQUIRED_SECTIONS = ["NOVIKOV", "TRUNCATION", "SURGERY", "ALGEBRA", "VERIFICATION", "OUTPUT"]
UNIT_CONVENTIONS = ("literal", "koszul")
LOCAL_SYSTEM_FORMS = (None, "Lshift", "Mshift")


def validate_path_readable(path: Path, name: str = "File") -> None:
    if not path.exists():
        raise ValidationError(f"{name} does not exist: {path}")
    if not os.access(path, os.R_OK):
        raise ValidationError(f"{name} is not readable: {path}")


def validate_dataframe(df: pd.DataFrame, required_cols: List[str] = None, allow_empty: bool = False) -> None:
    """Validate DataFrame structure."""
    if not isinstance(df, pd.DataFrame):
        raise ValidationError("Expected DataFrame")

    if df.empty and not allow_empty:
        raise ValidationError("DataFrame is empty")

    if required_cols:
        missing = [col for col in required_cols if col not in df.columns]
        if missing:
            raise ValidationError(f"Missing columns: {missing}")


def _positive_fraction(value: Any, where: str) -> Fraction:
    try:
        parsed = Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"{where} must be a rational number, got {value!r}")
    if parsed <= 0:
        raise ValidationError(f"{where} must be positive, got {value!r}")
    return parsed


def validate_config(config: Dict) -> None:
    """Validate CONFIG dictionary."""
    missing = [sec for sec in REQUIRED_SECTIONS if sec not in config]
    if missing:
        raise ValidationError(f"Missing CONFIG sections: {missing}")

    novikov = config["NOVIKOV"]
    if float(novikov.get("zero_tol", 1e-12)) < 0:
        raise ValidationError(f"NOVIKOV.zero_tol must be non-negative, got {novikov['zero_tol']}")
    _positive_fraction(novikov.get("default_precision", 6), "NOVIKOV.default_precision")
    if not isinstance(novikov.get("log_branch", 0), int):
        raise ValidationError(f"NOVIKOV.log_branch must be an integer, got {novikov['log_branch']!r}")

    if str(config["TRUNCATION"].get("order", "6")).strip().lower() not in ("inf", "+inf", "infinity"):
        _positive_fraction(config["TRUNCATION"].get("order", 6), "TRUNCATION.order")

    surgery = config["SURGERY"]
    caps = surgery.get("caps", [12, 12])
    if len(caps) != 2 or any(not isinstance(c, int) or c < 0 for c in caps):
        raise ValidationError(f"SURGERY.caps must be two non-negative integers, got {caps}")
    for key, sign in surgery.get("sign_flags", {}).items():
        if key not in ("longitude", "meridian"):
            raise ValidationError(f"Unknown SURGERY.sign_flags key: {key}")
        if sign not in (1, -1):
            raise ValidationError(f"SURGERY.sign_flags.{key} must be +1 or -1, got {sign}")
    if surgery.get("local_system_form") not in LOCAL_SYSTEM_FORMS:
        raise ValidationError(f"SURGERY.local_system_form must be one of {LOCAL_SYSTEM_FORMS}, "
                              f"got {surgery['local_system_form']!r}")

    if config["ALGEBRA"].get("unit_convention", "literal") not in UNIT_CONVENTIONS:
        raise ValidationError(f"ALGEBRA.unit_convention must be one of {UNIT_CONVENTIONS}")

    verification = config["VERIFICATION"]
    if not (0 < float(verification.get("tolerance", 1e-9)) < 1):
        raise ValidationError(f"VERIFICATION.tolerance {verification['tolerance']} outside (0, 1)")
    _positive_fraction(verification.get("safety_gap", "1/2"), "VERIFICATION.safety_gap")
    for key in ("n_random", "n_gauge"):
        if int(verification.get(key, 1)) < 0:
            raise ValidationError(f"VERIFICATION.{key} must be non-negative")


def validate_report(df: pd.DataFrame, kind: str) -> Dict[str, Any]:
    """Check a report table has the columns of its kind and summarize it."""
    required = {
        "violations": ["source", "check", "detail"],
        "potentials": ["stage", "W", "flat"],
        "curve_identity": ["generator", "difference", "tail_bound", "passed"],
        "hf": ["stage", "dimension", "rank", "margin", "stable"],
        "cone": ["word", "discrepancy"],
    }
    if kind not in required:
        raise ValidationError(f"Unknown report kind: {kind}")
    validate_dataframe(df, required[kind], allow_empty=(kind == "violations"))

    stats: Dict[str, Any] = {"rows": len(df)}
    if "passed" in df.columns:
        stats["failed"] = int((~df["passed"].astype(bool)).sum())
    if "difference" in df.columns and len(df):
        stats["max_difference"] = float(df["difference"].max())
    return stats


def compare_reports(report1: pd.DataFrame, report2: pd.DataFrame,
                    tolerance: float = 1e-12) -> Dict[str, Any]:
    """Compare two report tables column by column."""
    result = {
        "rows_match": len(report1) == len(report2),
        "columns_match": list(report1.columns) == list(report2.columns),
        "column_diffs": {},
    }
    if not (result["rows_match"] and result["columns_match"]):
        result["identical"] = False
        return result

    for col in report1.columns:
        left, right = report1[col].reset_index(drop=True), report2[col].reset_index(drop=True)
        if pd.api.types.is_numeric_dtype(left) and pd.api.types.is_numeric_dtype(right):
            result["column_diffs"][col] = bool(np.allclose(left.to_numpy(dtype=float),
                                                           right.to_numpy(dtype=float),
                                                           atol=tolerance, rtol=0, equal_nan=True))
        else:
            result["column_diffs"][col] = bool((left.astype(str) == right.astype(str)).all())
    result["identical"] = all(result["column_diffs"].values())
    return result


def first_failure(df: pd.DataFrame) -> Optional[Dict[str, Any]]:
    """First row with passed == False, as a dict."""
    if "passed" not in df.columns:
        return None
    failed = df[~df["passed"].astype(bool)]
    return None if failed.empty else failed.iloc[0].to_dict()
