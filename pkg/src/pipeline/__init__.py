"""Pipeline modules: configuration, input loading, reports, orchestration and the CLI."""

__all__ = ["config", "data_preparation", "formatting", "orchestration", "cli"]
