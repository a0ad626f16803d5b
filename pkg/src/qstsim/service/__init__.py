"""HTTP service layer: FastAPI app and request/response schemas."""

from .app import app

__all__ = ["app"]
