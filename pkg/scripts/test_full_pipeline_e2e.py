#!/usr/bin/env python3
"""
End-to-end pipeline test: Phase 0 → Phase 5 on the bundled worked example.

This script walks the COMPLETE pipeline:
0. Phase 0: Configuration, Novikov settings, output directory
1. Phase 1: Load the immersed circle and validate complex, atlas and b0
2. Phase 2: Potential W(b0)
3. Phase 3: Surgery at x in the longitude local-system form, W(b_eps)
4. Phase 4: Verification (skipped in dimension one)
5. Phase 5: HF report, then the seeded batches on random n = 4 atlases

Inputs are written fresh by the example bundle into a temporary directory.
"""

import sys
import tempfile
import time
from pathlib import Path

# Ensure proper path resolution
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root / "src"))
sys.path.insert(0, str(project_root / "Pyfloer_lib" / "src"))

from pipeline.data_preparation import write_example
from pipeline.formatting import format_element
from pipeline.orchestration import SurgeryOrchestrator


def main():
    print("\n" + "="*70)
    print("COMPLETE END-TO-END PIPELINE TEST (Phase 0 → Phase 5)")
    print("="*70)

    work = Path(tempfile.mkdtemp(prefix="surgery_e2e_"))
    inputs = work / "inputs"
    write_example("immersed-circle", inputs)

    config = {"VERIFICATION": {"n_random": 10, "n_gauge": 5}}
    print(f"\n📋 Inputs: {inputs}")
    print(f"  Batches: {config['VERIFICATION']['n_random']} curve cases, "
          f"{config['VERIFICATION']['n_gauge']} gauge pairs")

    try:
        start_total = time.time()
        orchestrator = SurgeryOrchestrator(config_dict=config)
        timings = {}

        start = time.time()
        orchestrator.run_phase0_setup(work / "results")
        timings['Phase 0 (Setup)'] = time.time() - start

        start = time.time()
        violations = orchestrator.run_phase1_inputs(inputs / "algebra.json", inputs / "candidate.json",
                                                    inputs / "surgery.json", inputs / "surgered.json")
        timings['Phase 1 (Validation)'] = time.time() - start
        if not violations.empty:
            print(violations.to_string(index=False))
            raise RuntimeError(f"{len(violations)} violations on the bundled inputs")

        start = time.time()
        before = orchestrator.run_phase2_potential()
        timings['Phase 2 (Potential)'] = time.time() - start
        print(f"  W(b0)    = {format_element(before['W'])}")

        start = time.time()
        after = orchestrator.run_phase3_surgery()
        timings['Phase 3 (Surgery)'] = time.time() - start
        print(f"  W(b_eps) = {format_element(after['W'])}")

        start = time.time()
        orchestrator.run_phase4_verification()
        timings['Phase 4 (Verification)'] = time.time() - start

        start = time.time()
        orchestrator.run_phase5_hf()
        timings['Phase 5 (HF)'] = time.time() - start

        start = time.time()
        summary = orchestrator.run_batches()
        timings['Batches'] = time.time() - start
        print(summary.to_string(index=False))

        files = orchestrator.export()

        total_time = time.time() - start_total
        print(f"\n{'='*70}")
        print("PIPELINE SUMMARY")
        print(f"{'='*70}")
        print(f"\n⏱️ Timing Breakdown:")
        for name, seconds in timings.items():
            print(f"  {name:<28} {seconds:.2f}s")
        print(f"  {'─'*45}")
        print(f"  Total Pipeline Time:         {total_time:.2f}s")

        print(f"\n📁 Output Files:")
        for path in files:
            print(f"  {path}")

        if orchestrator.checks_failed:
            print(f"\n❌ {orchestrator.checks_failed} checks failed")
            return 1

        print(f"\n{'='*70}")
        print("✅ COMPLETE END-TO-END PIPELINE TEST PASSED")
        print(f"{'='*70}\n")
        return 0

    except Exception as e:
        print(f"\n❌ Pipeline test failed: {e}")
        import traceback
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
