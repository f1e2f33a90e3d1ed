"""HTTP front end: FastAPI application over a single parameter store."""

from __future__ import annotations

from pndb.service.app import create_app

__all__ = ["create_app"]
