"""FastAPI service exposing sweeps, gate reports, and verification suites."""

from .app import create_app

__all__ = ["create_app"]
