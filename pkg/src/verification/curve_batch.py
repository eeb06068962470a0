"""
Seeded verification batches.

Handles:
- Curve identity on random surgery cases, with the resummation oracle on
  every case
- Gauge invariance of flatness and of the potential on seeded toy algebras
- Aggregation into pandas tables for the pipeline reports
"""

import logging
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd

from Pyfloer.examples import gauge_toy, random_surgery_case
from Pyfloer.mc import MCCandidate, gauge_integrate, potential
from Pyfloer.novikov import max_abs_difference
from Pyfloer.surgery import DEFAULT_CAPS, resummation_check, transform_atlas, verify_curve_identity

from pipeline.formatting import curve_identity_table, format_element, resummation_table
from utils.logging import ProgressTracker

logger = logging.getLogger(__name__)


def run_curve_batch(n_cases: int, seed: int = 2024, caps: Tuple[int, int] = DEFAULT_CAPS,
                    tol: float = 1e-9, progress: bool = True) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    Transform n_cases seeded atlases and check the curve identity and the
    resummation oracle on each.

    Args:
        n_cases: number of random surgery cases
        seed: seed of the numpy Generator shared by all cases
        caps: (R, S) multiplicity caps for transform_atlas
        tol: coefficient tolerance on top of the tail bounds

    Returns:
        (curve identity rows, resummation rows), one "case" column per table
    """
    rng = np.random.default_rng(seed)
    tracker = ProgressTracker(n_cases, "Curve identity", enabled=progress)
    tracker.start()
    curve_frames: List[pd.DataFrame] = []
    resum_frames: List[pd.DataFrame] = []
    for k in range(n_cases):
        case = random_surgery_case(rng)
        A_eps = transform_atlas(case.algebra, case.surgery, caps, case.candidate, tol)
        report = verify_curve_identity(case.algebra, A_eps, case.surgery, case.candidate, tol=tol)
        rows = resummation_check(case.candidate, case.surgery, caps, tol)
        label = f"random-{k}"
        curve_frames.append(curve_identity_table(report, label))
        resum_frames.append(resummation_table(rows, label))
        failed = not report.passed or not all(r["passed"] for r in rows)
        if failed:
            logger.warning("case %s failed (max difference %.3e)", label, report.max_difference())
        tracker.update(failed=failed)
    tracker.finish()
    return _concat(curve_frames), _concat(resum_frames)


def run_gauge_batch(n_pairs: int, seed: int = 2024, tol: float = 1e-9,
                    progress: bool = True) -> pd.DataFrame:
    """
    Gauge pairs (b0, b1) on seeded flat toy algebras.

    The gauge flow moves b0 along the two edges feeding the same vertex; b1
    must stay flat with the potential of b0.  "moved" is the size of b1 - b0,
    so a pair that the flow did not move shows up as 0.
    """
    rng = np.random.default_rng(seed)
    tracker = ProgressTracker(n_pairs, "Gauge invariance", enabled=progress)
    tracker.start()
    rows: List[Dict] = []
    for k in range(n_pairs):
        A, cand, h = gauge_toy(rng)
        b1 = gauge_integrate(A, cand.b, h, cand.delta)
        W0, flat0 = potential(A, cand, tol)
        W1, flat1 = potential(A, MCCandidate(b1, cand.delta), tol)
        difference = max_abs_difference(W0, W1)
        moved = (b1 - cand.b).max_abs()
        passed = flat0 and flat1 and moved > tol and difference <= tol
        rows.append({"case": f"gauge-{k}", "W0": format_element(W0), "W1": format_element(W1),
                     "flat0": flat0, "flat1": flat1, "moved": moved,
                     "difference": difference, "passed": passed})
        tracker.update(failed=not passed)
    tracker.finish()
    return pd.DataFrame(rows, columns=["case", "W0", "W1", "flat0", "flat1", "moved", "difference", "passed"])


def summarize(curve: pd.DataFrame, resummation: pd.DataFrame, gauge: pd.DataFrame) -> pd.DataFrame:
    """One row per batch: checks, failures and the largest deviation."""
    records = []
    for name, df in (("curve identity", curve), ("resummation", resummation), ("gauge", gauge)):
        records.append({
            "batch": name,
            "checks": len(df),
            "failed": int((~df["passed"].astype(bool)).sum()) if len(df) else 0,
            "max_difference": float(df["difference"].max()) if len(df) else 0.0,
        })
    return pd.DataFrame(records, columns=["batch", "checks", "failed", "max_difference"])


def _concat(frames: List[pd.DataFrame]) -> pd.DataFrame:
    if not frames:
        return pd.DataFrame()
    return pd.concat(frames, ignore_index=True)
