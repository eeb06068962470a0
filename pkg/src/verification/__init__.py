"""Seeded verification batches for the acceptance runs."""
