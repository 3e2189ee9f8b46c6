"""HTTP service wrapping the toolchain (FastAPI)."""

from .app import app, create_app

__all__ = ["app", "create_app"]
