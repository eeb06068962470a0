"""
Shared logging utilities for pipeline modules.

Provides:
- Console headers and status lines for pipeline phases
- Timing of phases and verification batches
- Progress line for seeded batches, with a running failure count
- Run log that keeps records for the end-of-run summary and forwards them
  to stdlib logging
"""

import logging
import sys
import time
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional

LOGGER_NAMES = ("Pyfloer", "pipeline", "verification")


def configure_logging(level: str = "INFO") -> None:
    """Attach one stream handler to the library and pipeline loggers."""
    numeric = getattr(logging, level.upper(), None)
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level: {level}")
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    for name in LOGGER_NAMES:
        logger = logging.getLogger(name)
        logger.handlers = [handler]
        logger.setLevel(numeric)
        logger.propagate = False


class ProgressTracker:
    """
    One-line progress display for a batch of seeded cases.

    The line shows cases done, failures so far and elapsed time; it is
    redrawn at most every `interval` seconds and finished with a newline.
    """

    WIDTH = 30

    def __init__(self, total: int, name: str = "Verifying", enabled: bool = True,
                 interval: float = 0.5):
        self.total = total
        self.name = name
        self.enabled = enabled and total > 0
        self.interval = interval
        self.done = 0
        self.failures = 0
        self._t0: Optional[float] = None
        self._drawn_at = float("-inf")

    @property
    def elapsed(self) -> float:
        return 0.0 if self._t0 is None else time.perf_counter() - self._t0

    def start(self) -> None:
        self._t0 = time.perf_counter()
        self.done = self.failures = 0
        self._drawn_at = float("-inf")

    def update(self, count: int = 1, failed: bool = False, force: bool = False) -> None:
        """Count finished cases; failed marks the last of them as a failure."""
        if self._t0 is None:
            self.start()
        self.done = min(self.done + count, self.total)
        self.failures += int(failed)
        if force or self.elapsed - self._drawn_at >= self.interval:
            self._draw()
            self._drawn_at = self.elapsed

    def finish(self) -> float:
        self.done = self.total
        self._draw(end="\n")
        return self.elapsed

    def _draw(self, end: str = "") -> None:
        if not self.enabled:
            return
        filled = self.WIDTH * self.done // self.total
        bar = "#" * filled + "." * (self.WIDTH - filled)
        sys.stdout.write(f"\r{self.name}: [{bar}] {self.done}/{self.total} "
                         f"failed {self.failures}  {format_duration(self.elapsed)}{end}")
        sys.stdout.flush()


class Timer:
    """Context manager timing one pipeline step."""

    def __init__(self, name: str = "Operation", verbose: bool = True):
        self.name = name
        self.verbose = verbose
        self.elapsed: Optional[float] = None
        self._t0 = 0.0

    def __enter__(self) -> "Timer":
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, *exc_info) -> None:
        self.elapsed = time.perf_counter() - self._t0
        if self.verbose:
            print(f"  ✓ {self.name}: {format_duration(self.elapsed)}")


def print_header(text: str, width: int = 60):
    rule = "=" * width
    print(f"\n{rule}\n{text}\n{rule}\n")


def print_section(text: str):
    print(f"\n## {text}\n")


def print_success(text: str):
    print(f"✓ {text}")


def print_warning(text: str):
    print(f"⚠ {text}")


def print_error(text: str):
    print(f"✗ {text}", file=sys.stderr)


def print_info(text: str):
    print(f"ℹ {text}")


@dataclass
class LogRecord:
    level: str
    message: str
    context: Dict[str, Any] = field(default_factory=dict)
    timestamp: str = field(default_factory=lambda: datetime.now().isoformat())


class Logger:
    """
    Run log for pipeline phases.

    Every record is kept for the end-of-run summary and forwarded to the
    stdlib logger of the same name; with echo=True it is also printed with
    the console helpers.  SUCCESS is a pipeline level and goes to stdlib as INFO.
    """

    _ROUTES = {
        "INFO": (logging.INFO, print_info),
        "SUCCESS": (logging.INFO, print_success),
        "WARNING": (logging.WARNING, print_warning),
        "ERROR": (logging.ERROR, print_error),
    }

    def __init__(self, name: str, echo: bool = True):
        self.name = name
        self.echo = echo
        self.records: List[LogRecord] = []
        self._logger = logging.getLogger(name)

    def _emit(self, level: str, msg: str, context: Dict[str, Any]) -> None:
        self.records.append(LogRecord(level, msg, context))
        stdlib_level, printer = self._ROUTES[level]
        self._logger.log(stdlib_level, msg)
        if self.echo:
            printer(msg)

    def info(self, msg: str, **context):
        self._emit("INFO", msg, context)

    def success(self, msg: str, **context):
        self._emit("SUCCESS", msg, context)

    def warning(self, msg: str, **context):
        self._emit("WARNING", msg, context)

    def error(self, msg: str, **context):
        self._emit("ERROR", msg, context)

    def get_summary(self) -> Dict[str, int]:
        """Number of records per level."""
        return dict(Counter(r.level for r in self.records))


def print_stats(stats: dict, name: str = "Statistics"):
    print(f"\n{name}:")
    for key, value in stats.items():
        print(f"  {key}: {value}")


def format_duration(seconds: Optional[float]) -> str:
    if seconds is None:
        return "-"
    if seconds < 1:
        return f"{seconds * 1000:.0f}ms"
    if seconds < 60:
        return f"{seconds:.1f}s"
    minutes, rest = divmod(seconds, 60)
    return f"{int(minutes)}m {rest:.0f}s"
