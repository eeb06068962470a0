#!/usr/bin/env python
"""
Command-line entry point for the surgery pipeline.

Thin wrapper over pipeline.cli.main; see `--help` for the subcommands.

Usage:
    python scripts/run_surgery_pipeline.py example immersed-circle --out inputs
    python scripts/run_surgery_pipeline.py surger inputs/algebra.json inputs/candidate.json \\
        inputs/surgery.json --surgered inputs/surgered.json --out results
    python scripts/run_surgery_pipeline.py validate inputs/*.json
"""

import sys
from pathlib import Path

# Add src and the library to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root / "src"))
sys.path.insert(0, str(project_root / "Pyfloer_lib" / "src"))

from pipeline.cli import main


if __name__ == '__main__':
    sys.exit(main())
