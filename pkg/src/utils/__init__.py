"""Utility modules for the surgery pipeline."""

from .logging import (
    ProgressTracker, Timer, configure_logging,
    print_header, print_section, print_success, print_warning, print_error, print_info,
    Logger, print_stats, format_duration
)
from .validation import (
    ValidationError, validate_config, validate_dataframe, validate_path_readable,
    validate_report, compare_reports, first_failure
)

__all__ = [
    "ProgressTracker", "Timer", "configure_logging",
    "print_header", "print_section", "print_success", "print_warning", "print_error", "print_info",
    "Logger", "print_stats", "format_duration",
    "ValidationError", "validate_config", "validate_dataframe", "validate_path_readable",
    "validate_report", "compare_reports", "first_failure",
]
