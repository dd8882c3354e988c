"""HTTP service exposing the toolkit; see :mod:`bergnum.service.app`."""

from .app import create_app

__all__ = ["create_app"]
