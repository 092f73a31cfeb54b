"""HTTP service over the analyzer, engine, and monitor."""
from .app import app

__all__ = ["app"]
