"""
Orchestration module for the surgery pipeline.

Coordinates execution of all pipeline phases (0-5):
- Phase 0: Setup, configuration and Novikov settings
- Phase 1: Input loading and structural validation
- Phase 2: Potential and admissibility of the immersed candidate
- Phase 3: Surgery (b_eps and the transformed atlas) and the surgered potential
- Phase 4: Verification (curve identity, constant disks, resummation)
- Phase 5: Floer cohomology report and export

Provides a unified entry point for running the complete workflow.
"""

import time
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from Pyfloer.ainfty import AlgebraError, Cochain, CurvedAInftyAlgebra, NotAdmissible, validate_atlas
from Pyfloer.cellular import validate_complex
from Pyfloer.floer import FloerError, hf_dimension
from Pyfloer.mc import MCCandidate, admissibility_report, potential
from Pyfloer.novikov import max_abs_difference
from Pyfloer.surgery import (SurgeryData, constant_disk_report, psi, psi_local_system_variant,
                             resummation_check, transform_atlas, verify_curve_identity)

from pipeline.config import (ConfigManager, apply_novikov_settings, get_surgery_params,
                             get_truncation, get_verification_params, print_config)
from pipeline.data_preparation import InputLoader, candidate_to_json
from pipeline.formatting import (ReportWriter, curve_identity_table, hf_table, potentials_table,
                                 resummation_table, violations_table)
from utils.logging import Logger, Timer, print_header, print_stats, print_success, print_warning
from utils.validation import ValidationError, first_failure
from verification.curve_batch import run_curve_batch, run_gauge_batch, summarize


class SurgeryOrchestrator:
    """Orchestrate execution of all pipeline phases."""

    def __init__(self, config_path: Optional[Path] = None, config_dict: Optional[Dict] = None,
                 truncation_override: Any = None, verbose: bool = True):
        """
        Initialize orchestrator.

        Args:
            config_path: Path to config JSON/YAML file
            config_dict: Config overrides merged on top of the file or defaults
            truncation_override: truncation forced onto every loaded algebra
            verbose: print phase banners and status lines
        """
        if config_path:
            self.config_manager = ConfigManager.from_file(Path(config_path))
        else:
            self.config_manager = ConfigManager()
        if config_dict:
            self.config_manager.update(config_dict)
        self.config = self.config_manager.config
        self.truncation_override = truncation_override
        self.verbose = verbose
        self.log = Logger("pipeline.orchestration", echo=verbose)

        self.state = {f'phase{k}_complete': False for k in range(6)}

        self.loader: Optional[InputLoader] = None
        self.writer: Optional[ReportWriter] = None
        self.algebra: Optional[CurvedAInftyAlgebra] = None
        self.candidate: Optional[MCCandidate] = None
        self.surgery: Optional[SurgeryData] = None
        self.surgery_doc: Dict[str, Any] = {}
        self.surgered_input: Optional[CurvedAInftyAlgebra] = None
        self.example_mode = False
        self.violations: Optional[pd.DataFrame] = None
        self.potentials: List[Dict[str, Any]] = []
        self.b_eps: Optional[Cochain] = None
        self.algebra_eps: Optional[CurvedAInftyAlgebra] = None
        self.checks_failed = 0

    def _banner(self, text: str) -> None:
        if self.verbose:
            print_header(text)

    def _require(self, phase: int) -> None:
        if not self.state[f'phase{phase}_complete']:
            raise ValidationError(f"Phase {phase} must complete before Phase {phase + 1}")

    # -- phases -------------------------------------------------------------

    def run_phase0_setup(self, out_dir: Optional[Path] = None) -> Path:
        """
        Phase 0: apply Novikov settings, prepare the loader and output directory.

        Returns:
            Output directory
        """
        self._banner("PHASE 0: SETUP & CONFIGURATION")
        if self.verbose:
            print_config(self.config)
        apply_novikov_settings(self.config)
        self.loader = InputLoader(
            default_truncation=get_truncation(self.config),
            truncation_override=self.truncation_override,
            unit_convention=self.config['ALGEBRA']['unit_convention'],
        )
        out_dir = Path(out_dir or self.config['OUTPUT']['out_dir'])
        self.writer = ReportWriter(out_dir, self.config['OUTPUT']['formats'])
        self.log.success(f"Setup complete, reports go to {out_dir}")
        self.state['phase0_complete'] = True
        return out_dir

    def run_phase1_inputs(self, algebra_path: Path, candidate_path: Path,
                          surgery_path: Optional[Path] = None,
                          surgered_path: Optional[Path] = None) -> pd.DataFrame:
        """
        Phase 1: load inputs and run the structural checks.

        Returns:
            Violations table (empty when every check passes)
        """
        self._require(0)
        self._banner("PHASE 1: INPUTS & VALIDATION")
        sg = get_surgery_params(self.config)
        with Timer("Load inputs", self.verbose):
            self.algebra = self.loader.load_algebra(algebra_path)
            self.candidate = self.loader.load_candidate(candidate_path)
            if surgery_path:
                self.surgery, self.surgery_doc = self.loader.load_surgery(surgery_path)
                if sg['sign_flags'] and not self.surgery.sign_flags:
                    self.surgery = replace(self.surgery, sign_flags=sg['sign_flags'])
            if surgered_path:
                self.surgered_input = self.loader.load_algebra(surgered_path)
        self.example_mode = sg['example_mode'] or bool(self.surgery_doc.get('example_mode', False))

        tables = [violations_table(str(algebra_path), validate_complex(self.algebra.complex),
                                   validate_atlas(self.algebra))]
        if self.surgery is not None:
            reasons = admissibility_report(self.candidate.b, self.surgery.x, self.surgery.xbar,
                                           self.candidate.delta, self.surgery.dim, self.example_mode)
            tables.append(violations_table(str(candidate_path), admissibility=reasons))
        if self.surgered_input is not None:
            tables.append(violations_table(str(surgered_path),
                                           validate_complex(self.surgered_input.complex),
                                           validate_atlas(self.surgered_input)))
        self.violations = pd.concat(tables, ignore_index=True)
        self.writer.add("violations", self.violations, "violations")
        if self.violations.empty:
            self.log.success("All structural checks passed")
        else:
            self.log.warning(f"{len(self.violations)} violations found")
        self.state['phase1_complete'] = True
        return self.violations

    def run_phase2_potential(self) -> Dict[str, Any]:
        """Phase 2: potential W(b0) and flatness of the immersed candidate."""
        self._require(1)
        self._banner("PHASE 2: POTENTIAL OF THE IMMERSED CANDIDATE")
        tol = get_verification_params(self.config)['tolerance']
        with Timer("Maurer-Cartan residual", self.verbose):
            W, flat = potential(self.algebra, self.candidate, tol)
        entry = {"stage": "immersed", "W": W, "flat": flat}
        self.potentials.append(entry)
        if flat:
            self.log.success(f"W(b0) = {W!r}")
        else:
            self.log.warning("b0 is not projectively flat; potentials are reported, not compared")
        self.state['phase2_complete'] = True
        return entry

    def run_phase3_surgery(self) -> Dict[str, Any]:
        """
        Phase 3: surgered candidate, transformed atlas and surgered potential.

        In example mode (or with a local-system form) the holonomy updates are
        applied to the supplied surgered algebra, or to the transformed atlas.
        """
        self._require(2)
        if self.surgery is None:
            raise ValidationError("Phase 3 needs surgery data")
        self._banner("PHASE 3: SURGERY")
        sg = get_surgery_params(self.config)
        tol = get_verification_params(self.config)['tolerance']
        branch = self.config['NOVIKOV']['log_branch']
        form = sg['local_system_form'] or self.surgery_doc.get('local_system_form')
        if self.example_mode and form is None:
            form = "Lshift"

        with Timer("Surgered atlas", self.verbose):
            if self.surgered_input is not None:
                A_eps = self.surgered_input
            else:
                A_eps = transform_atlas(self.algebra, self.surgery, sg['caps'], self.candidate, tol, branch)

        updates: Dict[str, Any] = {}
        if form is None:
            b_eps = psi(self.candidate, self.surgery, self.example_mode, branch)
        else:
            one_chain = self.surgery_doc.get('one_chain')
            b_eps, updates = psi_local_system_variant(
                self.candidate, self.surgery, form,
                one_chain=Cochain.from_json(one_chain) if one_chain else None,
                complex0=self.algebra.complex, example_mode=self.example_mode, branch=branch)
            local = dict(A_eps.local_system)
            for label, factor in updates.items():
                local[label] = local[label] * factor if label in local else factor
            A_eps = A_eps.with_changes(local_system=local)

        self.b_eps, self.algebra_eps = b_eps, A_eps
        W, flat = potential(A_eps, MCCandidate(b_eps, self.candidate.delta), tol)
        entry = {"stage": "surgered", "W": W, "flat": flat}
        self.potentials.append(entry)
        self.writer.add("potentials", potentials_table(self.potentials), "potentials")
        self.writer.write_json("b_eps.json", candidate_to_json(MCCandidate(b_eps, self.candidate.delta)))
        self.writer.write_json("algebra_eps.json", {"kind": "algebra", **A_eps.to_json()})
        if updates:
            self.log.info(f"Holonomy updates on {sorted(updates)}")
        before = self.potentials[0]
        if not before["flat"]:
            self.log.info(f"W(b_eps) = {W!r}")
        elif flat and max_abs_difference(before["W"], W) <= tol:
            self.log.success(f"W(b_eps) = {W!r} = W(b0)")
        else:
            self.checks_failed += 1
            self.log.error(f"Potential not preserved: W(b0) = {before['W']!r}, W(b_eps) = {W!r}, "
                           f"flat after surgery: {flat}")
        self.state['phase3_complete'] = True
        return entry

    def run_phase4_verification(self) -> Optional[pd.DataFrame]:
        """
        Phase 4: curve identity for every generator, the constant-disk report
        and the resummation oracle.  Skipped below dimension two.
        """
        self._require(3)
        self._banner("PHASE 4: VERIFICATION")
        if self.surgery.dim < 2:
            self.log.info("Dimension below two: the curve identity does not apply, skipping")
            self.state['phase4_complete'] = True
            return None
        sg = get_surgery_params(self.config)
        tol = get_verification_params(self.config)['tolerance']
        with Timer("Curve identity", self.verbose):
            report = verify_curve_identity(self.algebra, self.algebra_eps, self.surgery,
                                           self.candidate, tol=tol)
        curve = curve_identity_table(report)
        self.writer.add("curve_identity", curve, "curve_identity")
        resum = resummation_table(resummation_check(self.candidate, self.surgery, sg['caps'], tol))
        self.writer.add("resummation", resum)
        constants = constant_disk_report(self.algebra, self.algebra_eps, self.surgery, self.candidate,
                                         self.b_eps)

        failed = int((~curve["passed"]).sum()) + int((~resum["passed"]).sum())
        self.checks_failed += failed
        if failed:
            row = first_failure(curve) or first_failure(resum)
            self.log.error(f"{failed} verification rows failed, first: {row}")
        else:
            self.log.success(f"Curve identity holds on {len(curve)} generators")
        if constants["branch_tension"]:
            self.log.warning(f"n = 2: constant disks differ from the longitude term by "
                             f"{constants['difference']:.3e} (branch constant)")
        elif constants["difference"] > tol:
            self.checks_failed += 1
            self.log.error(f"Constant disks differ by {constants['difference']:.3e}")
        self.state['phase4_complete'] = True
        return curve

    def run_phase5_hf(self) -> Optional[pd.DataFrame]:
        """Phase 5: HF dimension before and after surgery when b is projectively flat."""
        self._require(4)
        self._banner("PHASE 5: FLOER COHOMOLOGY & EXPORT")
        safety_gap = get_verification_params(self.config)['safety_gap']
        tol = get_verification_params(self.config)['tolerance']
        entries = []
        for stage, A, b in (("immersed", self.algebra, self.candidate.b),
                            ("surgered", self.algebra_eps, self.b_eps)):
            try:
                dim, cert = hf_dimension(A, b, self.candidate.delta, safety_gap, tol)
            except (FloerError, AlgebraError) as e:
                self.log.warning(f"HF {stage}: {e}")
                continue
            entries.append({"stage": stage, "dimension": dim, "certificate": cert,
                            "generators": len(A.generators)})
            self.log.info(f"HF {stage}: dimension {dim}, rank {cert.rank}")
        table = None
        if entries:
            table = self.writer.add("hf", hf_table(entries), "hf")
        self.state['phase5_complete'] = True
        return table

    def run_batches(self, n_random: Optional[int] = None, n_gauge: Optional[int] = None) -> pd.DataFrame:
        """
        Seeded acceptance batches: curve identity with resummation on random
        atlases, and gauge invariance of the potential.

        Returns:
            batch summary table, also registered as batch_summary
        """
        self._require(0)
        self._banner("VERIFICATION BATCHES")
        vp = get_verification_params(self.config)
        caps = get_surgery_params(self.config)['caps']
        n_random = vp['n_random'] if n_random is None else n_random
        n_gauge = vp['n_gauge'] if n_gauge is None else n_gauge
        curve, resum = run_curve_batch(n_random, vp['seed'], caps, vp['tolerance'], progress=self.verbose)
        gauge = run_gauge_batch(n_gauge, vp['seed'], vp['tolerance'], progress=self.verbose)
        summary = summarize(curve, resum, gauge)
        for name, df in (("curve_batch", curve), ("resummation_batch", resum), ("gauge_batch", gauge),
                         ("batch_summary", summary)):
            if not df.empty:
                self.writer.add(name, df)
        failed = int(summary["failed"].sum())
        self.checks_failed += failed
        if failed:
            self.log.error(f"{failed} batch checks failed")
        else:
            self.log.success(f"{int(summary['checks'].sum())} batch checks passed")
        return summary

    def export(self) -> List[Path]:
        paths = self.writer.write()
        self.log.success(f"Wrote {len(paths)} files to {self.writer.out_dir}")
        if self.verbose:
            print_stats(self.log.get_summary(), "Pipeline messages")
        return paths

    def run_full_pipeline(self, algebra_path: Path, candidate_path: Path, surgery_path: Path,
                          surgered_path: Optional[Path] = None,
                          out_dir: Optional[Path] = None, batches: bool = False) -> Dict[str, Any]:
        """
        Execute the full pipeline (Phases 0-5), with the seeded batches when
        batches is set.

        Returns:
            Dictionary with phase outputs, output files and timing info
        """
        start_time = time.time()
        try:
            self.run_phase0_setup(out_dir)
            violations = self.run_phase1_inputs(algebra_path, candidate_path, surgery_path, surgered_path)
            if not violations.empty:
                self.export()
                inadmissible = violations[violations["check"] == "admissibility"]
                if not inadmissible.empty:
                    raise NotAdmissible("; ".join(inadmissible["detail"]))
                return self._result(False, start_time)
            self.run_phase2_potential()
            self.run_phase3_surgery()
            self.run_phase4_verification()
            self.run_phase5_hf()
            if batches:
                self.run_batches()
            self.export()
        except Exception as e:
            print_warning(f"Pipeline execution failed: {e}")
            raise
        success = self.checks_failed == 0
        if success and self.verbose:
            print_success(f"Pipeline complete in {time.time() - start_time:.1f}s")
        return self._result(success, start_time)

    def _result(self, success: bool, start_time: float) -> Dict[str, Any]:
        return {
            'success': success,
            'total_time': time.time() - start_time,
            'violations': self.violations,
            'potentials': list(self.potentials),
            'b_eps': self.b_eps,
            'algebra_eps': self.algebra_eps,
            'tables': dict(self.writer.tables),
            'files': list(self.writer.written),
        }


def run_pipeline(
    algebra_path: Path,
    candidate_path: Path,
    surgery_path: Path,
    surgered_path: Optional[Path] = None,
    config_path: Optional[Path] = None,
    config_dict: Optional[Dict] = None,
    out_dir: Optional[Path] = None,
    truncation_override: Any = None,
    batches: bool = False,
    verbose: bool = True,
) -> Dict[str, Any]:
    """
    Run the complete surgery pipeline.

    Args:
        algebra_path, candidate_path, surgery_path: input documents
        surgered_path: optional hand-built surgered algebra (dimension one)
        config_path: Path to config JSON/YAML file
        config_dict: Config overrides
        out_dir: report directory (OUTPUT.out_dir by default)

    Returns:
        Dictionary with all outputs and results
    """
    orchestrator = SurgeryOrchestrator(config_path=config_path, config_dict=config_dict,
                                       truncation_override=truncation_override, verbose=verbose)
    return orchestrator.run_full_pipeline(algebra_path, candidate_path, surgery_path,
                                          surgered_path, out_dir, batches)
